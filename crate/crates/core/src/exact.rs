//! Exact integer and rational arithmetic.
//!
//! [`ExactRational`] wraps a reduced `BigRational` and gives it the canonical
//! `p/q` text form used by every table and report. The Bernoulli numbers are
//! memoized in a process-wide table guarded by an `RwLock`.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use num_bigint::BigInt as Integer;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("negative argument {0} to factorial")]
    NegativeFactorial(i64),
    #[error("binomial({0}, {1}) requires 0 <= b <= a")]
    BinomialRange(i64, i64),
    #[error("malformed rational literal {0:?}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
}

/// Arbitrary-precision rational in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, ExactError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Self(BigRational::new(numer.into(), denom)))
    }

    /// Panicking shorthand for literals known to be valid.
    pub fn frac(numer: i64, denom: i64) -> Self {
        Self::new(numer, denom).expect("nonzero denominator")
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Self(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Self, ExactError> {
        Self::one().checked_div(self)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, exp: i32) -> Self {
        Self(num_traits::Pow::pow(&self.0, exp))
    }

    /// `Some(n)` when the value is an integer fitting in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<i32> for ExactRational {
    fn from(n: i32) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigInt> for ExactRational {
    fn from(n: BigInt) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ExactRational {
    type Err = ExactError;

    /// Accepts `p` or `p/q` with optional sign on `p`; `q` must be nonzero.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExactError::Parse(s.to_string());
        let t = s.trim();
        let int = |x: &str| -> Result<BigInt, ExactError> {
            let x = x.trim();
            let digits = x.strip_prefix(['-', '+']).unwrap_or(x);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            x.parse::<BigInt>().map_err(|_| bad())
        };
        match t.split_once('/') {
            None => Ok(Self::from_integer(int(t)?)),
            Some((p, q)) => {
                if q.trim().starts_with(['-', '+']) {
                    return Err(bad());
                }
                let q = int(q)?;
                if q.is_zero() {
                    return Err(bad());
                }
                Self::new(int(p)?, q)
            }
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &ExactRational) -> ExactRational {
                ExactRational($tr::$m(&self.0, &rhs.0))
            }
        }
        impl $tr<ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: ExactRational) -> ExactRational {
                ExactRational($tr::$m(self.0, rhs.0))
            }
        }
        impl $tr<&ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &ExactRational) -> ExactRational {
                ExactRational($tr::$m(self.0, &rhs.0))
            }
        }
        impl $atr<&ExactRational> for ExactRational {
            fn $am(&mut self, rhs: &ExactRational) {
                $atr::$am(&mut self.0, &rhs.0);
            }
        }
        impl $atr<ExactRational> for ExactRational {
            fn $am(&mut self, rhs: ExactRational) {
                $atr::$am(&mut self.0, rhs.0);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, MulAssign, mul_assign);

/// Panics on a zero divisor; use [`ExactRational::checked_div`] otherwise.
impl Div<&ExactRational> for &ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: &ExactRational) -> ExactRational {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Div<ExactRational> for ExactRational {
    type Output = ExactRational;
    fn div(self, rhs: ExactRational) -> ExactRational {
        &self / &rhs
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-&self.0)
    }
}

impl Sum for ExactRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl Product for ExactRational {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::one(), |a, b| a * b)
    }
}

pub fn factorial(k: i64) -> Result<BigInt, ExactError> {
    if k < 0 {
        return Err(ExactError::NegativeFactorial(k));
    }
    Ok((2..=k).fold(BigInt::one(), |acc, i| acc * i))
}

pub fn binomial(a: i64, b: i64) -> Result<BigInt, ExactError> {
    if b < 0 || a < 0 || b > a {
        return Err(ExactError::BinomialRange(a, b));
    }
    let b = b.min(a - b);
    // running product stays integral: C(a, i+1) = C(a, i) * (a - i) / (i + 1)
    Ok((0..b).fold(BigInt::one(), |acc, i| acc * (a - i) / (i + 1)))
}

static BERNOULLI: RwLock<Vec<ExactRational>> = RwLock::new(Vec::new());

/// Bernoulli number with `B_1 = -1/2`, `B_q = 0` for `q < 0`.
///
/// Computed from `sum_{j=0}^{q} C(q+1, j) B_j = 0` and memoized up to the
/// largest index requested so far. Odd indices above 1 are zero; they are
/// still stored so the table stays indexable by `q`.
pub fn bernoulli(q: i64) -> ExactRational {
    if q < 0 {
        return ExactRational::zero();
    }
    let idx = q as usize;
    if let Some(b) = BERNOULLI.read().expect("bernoulli table poisoned").get(idx) {
        return b.clone();
    }
    let mut table = BERNOULLI.write().expect("bernoulli table poisoned");
    while table.len() <= idx {
        let n = table.len() as i64;
        let next = if n == 0 {
            ExactRational::one()
        } else if n > 1 && n % 2 == 1 {
            ExactRational::zero()
        } else {
            let s: ExactRational = table
                .iter()
                .enumerate()
                .map(|(j, b)| b * &ExactRational::from(binomial(n + 1, j as i64).expect("in range")))
                .sum();
            -s / ExactRational::from(n + 1)
        };
        table.push(next);
    }
    table[idx].clone()
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn rat() -> impl Strategy<Value = ExactRational> {
        (-50i64..50, 1i64..20).prop_map(|(p, q)| ExactRational::frac(p, q))
    }

    proptest! {
        #[test]
        fn field_axioms(a in rat(), b in rat(), c in rat()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn normal_form(p in -1000i64..1000, q in 1i64..1000) {
            let r = ExactRational::frac(p, q);
            prop_assert!(r.denom() > &BigInt::zero());
            prop_assert!(num_integer::Integer::gcd(r.numer(), r.denom()) == BigInt::one() || r.is_zero());
            let again: ExactRational = r.to_string().parse().unwrap();
            prop_assert_eq!(again, r);
        }
    }
}
