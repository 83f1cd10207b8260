//! Characteristic-class calculus over a graded ring.
//!
//! Total Chern classes are [`ChernSeries`] (with `c_0 = 1` implicit), Chern
//! characters are [`ChSeries`]. The two are related by Newton's identities
//! `ch_k = p_k / k!` with `p_k` the power sums of the Chern roots.
//!
//! Determinants and Pfaffians are expanded with memoization over the set of
//! remaining indices, so an `n x n` matrix costs `O(n^2 2^n)` ring products
//! rather than `n!`.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::exact::{factorial, ExactRational};
use crate::ring::{GradedPoly, Ring, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymfunError {
    #[error("partition parts must be positive and weakly decreasing, got {0:?}")]
    BadPartition(Vec<u32>),
    #[error("class of index {index} is not homogeneous of weight {index}")]
    WrongWeight { index: u32 },
    #[error("Chern character component of degree {0} is missing")]
    MissingComponent(u32),
    #[error("matrix is not square")]
    NotSquare,
    #[error("Pfaffian needs even dimension, got {0}")]
    OddDimension(usize),
    #[error("matrix is not skew-symmetric at ({0}, {1})")]
    NotSkew(usize, usize),
    #[error("matrix dimension {0} exceeds the supported 32")]
    TooLarge(usize),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, SymfunError> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(SymfunError::BadPartition(parts));
        }
        Ok(Self(parts))
    }

    /// `part` repeated `rows` times; empty when either is zero.
    pub fn rectangle(rows: u32, part: u32) -> Self {
        if part == 0 {
            return Self::default();
        }
        Self(vec![part; rows as usize])
    }

    /// `(n, n-1, ..., 1)`.
    pub fn staircase(n: u32) -> Self {
        Self((1..=n).rev().collect())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_weight(p: &GradedPoly, index: u32) -> Result<(), SymfunError> {
    match p.homogeneous_weight() {
        Ok(None) => Ok(()),
        Ok(Some(w)) if w == index => Ok(()),
        _ => Err(SymfunError::WrongWeight { index }),
    }
}

/// Total Chern class `1 + c_1 + c_2 + ...`; `classes[i - 1]` is `c_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChernSeries {
    ring: Ring,
    classes: Vec<GradedPoly>,
}

impl ChernSeries {
    pub fn new(ring: &Ring, classes: Vec<GradedPoly>) -> Result<Self, SymfunError> {
        for (i, c) in classes.iter().enumerate() {
            if !std::sync::Arc::ptr_eq(c.ring(), ring) && **c.ring() != **ring {
                return Err(RingError::RingMismatch.into());
            }
            check_weight(c, i as u32 + 1)?;
        }
        let mut s = Self { ring: ring.clone(), classes };
        s.trim();
        Ok(s)
    }

    /// The generic series `c1, ..., ck` read from generators of those names.
    pub fn from_generators(ring: &Ring, names: &[&str]) -> Result<Self, SymfunError> {
        let classes = names.iter().map(|n| GradedPoly::generator(ring, n)).collect::<Result<_, _>>()?;
        Self::new(ring, classes)
    }

    pub fn one(ring: &Ring) -> Self {
        Self { ring: ring.clone(), classes: Vec::new() }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// `c_i`, with `c_0 = 1` and `c_i = 0` for negative or unstored `i`.
    pub fn get(&self, i: i64) -> GradedPoly {
        match i {
            0 => GradedPoly::one(&self.ring),
            i if i < 0 || i as usize > self.classes.len() => GradedPoly::zero(&self.ring),
            i => self.classes[i as usize - 1].clone(),
        }
    }

    /// Highest stored index.
    pub fn len(&self) -> u32 {
        self.classes.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    fn trim(&mut self) {
        let top = self.ring.top_weight().map(|t| t as usize).unwrap_or(usize::MAX);
        self.classes.truncate(top);
        while self.classes.last().is_some_and(|c| c.is_zero()) {
            self.classes.pop();
        }
    }
}

/// Chern character components by degree; degree 0 is the rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChSeries {
    ring: Ring,
    components: BTreeMap<u32, GradedPoly>,
}

impl ChSeries {
    pub fn new(ring: &Ring, components: BTreeMap<u32, GradedPoly>) -> Result<Self, SymfunError> {
        for (&k, c) in &components {
            if !std::sync::Arc::ptr_eq(c.ring(), ring) && **c.ring() != **ring {
                return Err(RingError::RingMismatch.into());
            }
            check_weight(c, k)?;
        }
        Ok(Self { ring: ring.clone(), components })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn get(&self, k: u32) -> Option<&GradedPoly> {
        self.components.get(&k)
    }

    /// Component `k`, reading an absent degree as zero.
    pub fn get_or_zero(&self, k: u32) -> GradedPoly {
        self.components.get(&k).cloned().unwrap_or_else(|| GradedPoly::zero(&self.ring))
    }

    pub fn components(&self) -> &BTreeMap<u32, GradedPoly> {
        &self.components
    }

    pub fn max_degree(&self) -> u32 {
        self.components.keys().next_back().copied().unwrap_or(0)
    }

    /// Applies `f` to every component.
    pub fn map(&self, mut f: impl FnMut(u32, &GradedPoly) -> GradedPoly) -> Self {
        let components = self.components.iter().map(|(&k, c)| (k, f(k, c))).collect();
        Self { ring: self.ring.clone(), components }
    }
}

/// Inverse of `c` in the ring of series, up to weight `top`.
pub fn series_inverse(c: &ChernSeries, top: u32) -> ChernSeries {
    let ring = c.ring.clone();
    let mut inv: Vec<GradedPoly> = Vec::with_capacity(top as usize);
    for k in 1..=top as i64 {
        // d_k = -sum_{i=1}^{k} c_i d_{k-i}
        let mut acc = GradedPoly::zero(&ring);
        for i in 1..=k.min(c.len() as i64) {
            let prev = if i == k { GradedPoly::one(&ring) } else { inv[(k - i - 1) as usize].clone() };
            acc = &acc + &(&c.get(i) * &prev);
        }
        inv.push(-acc);
    }
    let mut s = ChernSeries { ring, classes: inv };
    s.trim();
    s
}

pub fn series_product(c: &ChernSeries, d: &ChernSeries) -> Result<ChernSeries, SymfunError> {
    if **c.ring() != **d.ring() {
        return Err(RingError::RingMismatch.into());
    }
    let n = c.len() + d.len();
    let classes = (1..=n as i64)
        .map(|k| {
            (0..=k).fold(GradedPoly::zero(&c.ring), |acc, i| &acc + &(&c.get(i) * &d.get(k - i)))
        })
        .collect();
    let mut s = ChernSeries { ring: c.ring.clone(), classes };
    s.trim();
    Ok(s)
}

/// `c_i(E^) = (-1)^i c_i(E)`.
pub fn dualize(c: &ChernSeries) -> ChernSeries {
    let classes = c
        .classes
        .iter()
        .enumerate()
        .map(|(i, x)| if i % 2 == 0 { -x } else { x.clone() })
        .collect();
    ChernSeries { ring: c.ring.clone(), classes }
}

/// `ch_k(E^) = (-1)^k ch_k(E)`.
pub fn dualize_ch(ch: &ChSeries) -> ChSeries {
    ch.map(|k, x| if k % 2 == 1 { -x } else { x.clone() })
}

fn inverse_factorial(k: u32) -> ExactRational {
    ExactRational::from(factorial(k as i64).expect("nonnegative")).recip().expect("nonzero")
}

/// `ch(E (x) L)` where `c_1(L) = line_class`: multiplication by `exp(line_class)`.
///
/// Absent components count as zero. The output runs up to the ring's top
/// weight, or up to the highest input degree when the ring is untruncated.
pub fn twist_ch(ch: &ChSeries, line_class: &GradedPoly) -> Result<ChSeries, SymfunError> {
    check_weight(line_class, 1)?;
    if **line_class.ring() != **ch.ring() {
        return Err(RingError::RingMismatch.into());
    }
    let top = ch.ring.top_weight().unwrap_or_else(|| ch.max_degree());
    let powers: Vec<GradedPoly> = std::iter::successors(Some(GradedPoly::one(&ch.ring)), |p| Some(p * line_class))
        .take(top as usize + 1)
        .collect();
    let mut components = BTreeMap::new();
    for k in 0..=top {
        let mut acc = GradedPoly::zero(&ch.ring);
        for (&j, x) in ch.components.range(..=k) {
            acc = &acc + &(x * &powers[(k - j) as usize]).scale(&inverse_factorial(k - j));
        }
        if !acc.is_zero() || ch.components.contains_key(&k) {
            components.insert(k, acc);
        }
    }
    Ok(ChSeries { ring: ch.ring.clone(), components })
}

/// `ch(E (x) sqrt(L)^-1)` for `c_1(L) = divisor_class`.
pub fn half_twist_ch(ch: &ChSeries, divisor_class: &GradedPoly) -> Result<ChSeries, SymfunError> {
    twist_ch(ch, &divisor_class.scale(&ExactRational::frac(-1, 2)))
}

/// Chern characters `ch_0..=ch_upto` of a series, with `ch_0 = rank`.
pub fn chern_to_ch(c: &ChernSeries, rank: ExactRational, upto: u32) -> ChSeries {
    let ring = c.ring.clone();
    // Newton: p_k = sum_{i=1}^{k-1} (-1)^{i-1} c_i p_{k-i} + (-1)^{k-1} k c_k
    let mut power_sums: Vec<GradedPoly> = vec![GradedPoly::zero(&ring)];
    for k in 1..=upto as i64 {
        let sign = |i: i64| if i % 2 == 1 { ExactRational::one() } else { -ExactRational::one() };
        let mut acc = c.get(k).scale(&(sign(k) * ExactRational::from(k)));
        for i in 1..k {
            acc = &acc + &(&c.get(i) * &power_sums[(k - i) as usize]).scale(&sign(i));
        }
        power_sums.push(acc);
    }
    let mut components = BTreeMap::new();
    components.insert(0, GradedPoly::constant(&ring, rank));
    for (k, p) in power_sums.into_iter().enumerate().skip(1) {
        components.insert(k as u32, p.scale(&inverse_factorial(k as u32)));
    }
    ChSeries { ring, components }
}

/// Chern classes `c_1..=c_upto` from Chern characters `ch_1..=ch_upto`.
pub fn ch_to_chern(ch: &ChSeries, upto: u32) -> Result<ChernSeries, SymfunError> {
    let ring = ch.ring.clone();
    let mut power_sums = vec![GradedPoly::zero(&ring)];
    for k in 1..=upto {
        let x = ch.get(k).ok_or(SymfunError::MissingComponent(k))?;
        power_sums.push(x.scale(&ExactRational::from(factorial(k as i64).expect("nonnegative"))));
    }
    // k c_k = sum_{i=1}^{k} (-1)^{i-1} c_{k-i} p_i
    let mut classes: Vec<GradedPoly> = Vec::with_capacity(upto as usize);
    for k in 1..=upto as usize {
        let mut acc = GradedPoly::zero(&ring);
        for (i, p) in power_sums.iter().enumerate().take(k + 1).skip(1) {
            let prev = if i == k { GradedPoly::one(&ring) } else { classes[k - i - 1].clone() };
            let term = &prev * p;
            acc = if i % 2 == 1 { &acc + &term } else { &acc - &term };
        }
        classes.push(acc.scale(&ExactRational::frac(1, k as i64)));
    }
    let mut s = ChernSeries { ring, classes };
    s.trim();
    Ok(s)
}

/// `Delta_lambda(c)`: determinant of the matrix with `(i, j)` entry
/// `c_{lambda_i - i + j}`. The empty partition gives 1.
pub fn schur(lambda: &Partition, c: &ChernSeries) -> GradedPoly {
    let m = lambda.parts().len();
    let matrix: Vec<Vec<GradedPoly>> = (0..m)
        .map(|i| (0..m).map(|j| c.get(lambda.parts()[i] as i64 - i as i64 + j as i64)).collect())
        .collect();
    determinant_unchecked(c.ring(), &matrix)
}

fn square_dim(a: &[Vec<GradedPoly>]) -> Result<usize, SymfunError> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(SymfunError::NotSquare);
    }
    if n > 32 {
        return Err(SymfunError::TooLarge(n));
    }
    Ok(n)
}

pub fn determinant(ring: &Ring, a: &[Vec<GradedPoly>]) -> Result<GradedPoly, SymfunError> {
    square_dim(a)?;
    Ok(determinant_unchecked(ring, a))
}

/// Laplace expansion down the rows, memoized on the set of unused columns.
fn determinant_unchecked(ring: &Ring, a: &[Vec<GradedPoly>]) -> GradedPoly {
    fn go(a: &[Vec<GradedPoly>], ring: &Ring, cols: u32, memo: &mut HashMap<u32, GradedPoly>) -> GradedPoly {
        let n = a.len();
        if cols == 0 {
            return GradedPoly::one(ring);
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let row = n - cols.count_ones() as usize;
        let mut acc = GradedPoly::zero(ring);
        for (pos, j) in (0..n).filter(|j| cols & (1 << j) != 0).enumerate() {
            if a[row][j].is_zero() {
                continue;
            }
            let minor = go(a, ring, cols & !(1 << j), memo);
            let term = &a[row][j] * &minor;
            acc = if pos % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        memo.insert(cols, acc.clone());
        acc
    }
    let full = if a.is_empty() { 0 } else { u32::MAX >> (32 - a.len()) };
    go(a, ring, full, &mut HashMap::new())
}

/// Pfaffian of a skew-symmetric matrix of even size, normalized so that
/// the 2x2 matrix `((0, x), (-x, 0))` has Pfaffian `x`.
///
/// Expanded along the first remaining row:
/// `Pf = sum_j (-1)^(pos(j) - 1) a_{i j} Pf(A without rows/cols i, j)`.
pub fn pfaffian(ring: &Ring, a: &[Vec<GradedPoly>]) -> Result<GradedPoly, SymfunError> {
    let n = square_dim(a)?;
    for i in 0..n {
        for j in i..n {
            if !(&a[i][j] + &a[j][i]).is_zero() {
                return Err(SymfunError::NotSkew(i, j));
            }
        }
    }
    if n % 2 == 1 {
        return Err(SymfunError::OddDimension(n));
    }
    fn go(a: &[Vec<GradedPoly>], ring: &Ring, set: u32, memo: &mut HashMap<u32, GradedPoly>) -> GradedPoly {
        if set == 0 {
            return GradedPoly::one(ring);
        }
        if let Some(v) = memo.get(&set) {
            return v.clone();
        }
        let i = set.trailing_zeros() as usize;
        let rest = set & !(1 << i);
        let mut acc = GradedPoly::zero(ring);
        for (pos, j) in (0..a.len()).filter(|j| rest & (1 << j) != 0).enumerate() {
            if a[i][j].is_zero() {
                continue;
            }
            let term = &a[i][j] * &go(a, ring, rest & !(1 << j), memo);
            acc = if pos % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        memo.insert(set, acc.clone());
        acc
    }
    let full = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    Ok(go(a, ring, full, &mut HashMap::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{GeneratorSpec, GradedRingSpec};

    fn p(ring: &Ring, s: &str) -> GradedPoly {
        GradedPoly::parse(ring, s).unwrap()
    }

    fn generic(k: u32, top: Option<u32>) -> (Ring, ChernSeries) {
        let ring = GradedRingSpec::chern(k, top);
        let names: Vec<String> = (1..=k).map(|i| format!("c{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let c = ChernSeries::from_generators(&ring, &refs).unwrap();
        (ring, c)
    }

    #[test]
    fn partitions() {
        assert!(Partition::new(vec![2, 3]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
        assert_eq!(Partition::rectangle(3, 2).parts(), &[2, 2, 2]);
        assert!(Partition::rectangle(3, 0).is_empty());
        assert_eq!(Partition::staircase(3).parts(), &[3, 2, 1]);
        assert_eq!(Partition::staircase(3).weight(), 6);
    }

    #[test]
    fn inverse_examples() {
        let (ring, _) = generic(2, Some(6));
        assert!(series_inverse(&ChernSeries::one(&ring), 6).is_empty());
        let c1 = ChernSeries::from_generators(&ring, &["c1"]).unwrap();
        let inv = series_inverse(&c1, 4);
        for k in 1..=4 {
            let expected = GradedPoly::monomial(&ring, &[("c1", k)], if k % 2 == 1 { (-1).into() } else { 1.into() }).unwrap();
            assert_eq!(inv.get(k as i64), expected);
        }
        let c = ChernSeries::from_generators(&ring, &["c1", "c2"]).unwrap();
        let inv = series_inverse(&c, 6);
        assert_eq!(inv.get(2), p(&ring, "c1^2 - c2"));
        let prod = series_product(&c, &inv).unwrap();
        assert!(prod.is_empty());
    }

    #[test]
    fn dual_examples() {
        let (ring, _) = generic(3, None);
        let c = ChernSeries::from_generators(&ring, &["c1"]).unwrap();
        assert_eq!(dualize(&c).get(1), p(&ring, "-c1"));
        let (_, g) = generic(5, None);
        assert_eq!(dualize(&dualize(&g)), g);
        let ch = chern_to_ch(&g, ExactRational::from(3), 5);
        let d = dualize_ch(&ch);
        for k in 0..=5 {
            let expected = if k % 2 == 1 { -ch.get_or_zero(k) } else { ch.get_or_zero(k) };
            assert_eq!(d.get_or_zero(k), expected);
        }
    }

    #[test]
    fn dualize_commutes_with_product() {
        let (ring, _) = generic(6, None);
        let c = ChernSeries::from_generators(&ring, &["c1", "c2", "c3"]).unwrap();
        let d = ChernSeries::from_generators(&ring, &["c4", "c5"]).unwrap_err();
        assert!(matches!(d, SymfunError::WrongWeight { index: 1 }));
        let d = ChernSeries::new(&ring, vec![p(&ring, "2*c1"), p(&ring, "c2 - c1^2")]).unwrap();
        assert_eq!(
            dualize(&series_product(&c, &d).unwrap()),
            series_product(&dualize(&c), &dualize(&d)).unwrap()
        );
    }

    #[test]
    fn newton_low_degrees() {
        let (ring, c) = generic(3, None);
        let ch = chern_to_ch(&c, ExactRational::from(3), 3);
        assert_eq!(ch.get(1).unwrap(), &p(&ring, "c1"));
        assert_eq!(ch.get(2).unwrap(), &p(&ring, "1/2*c1^2 - c2"));
        assert_eq!(ch.get(3).unwrap(), &p(&ring, "1/6*c1^3 - 1/2*c1*c2 + 1/2*c3"));
    }

    /// Oracle: Chern roots x1..x4, c_k = e_k(x), ch_k = sum x_i^k / k!.
    #[test]
    fn newton_against_chern_roots() {
        let gens = (1..=4).map(|i| GeneratorSpec::new(format!("x{i}"), 1)).collect();
        let ring = GradedRingSpec::new(gens, None, None).unwrap();
        let x: Vec<GradedPoly> = (1..=4).map(|i| GradedPoly::generator(&ring, &format!("x{i}")).unwrap()).collect();
        let mut e = vec![GradedPoly::one(&ring)];
        for xi in &x {
            let mut next = e.clone();
            next.push(GradedPoly::zero(&ring));
            for k in 1..next.len() {
                next[k] = &e.get(k).cloned().unwrap_or_else(|| GradedPoly::zero(&ring)) + &(&e[k - 1] * xi);
            }
            e = next;
        }
        let c = ChernSeries::new(&ring, e[1..].to_vec()).unwrap();
        let ch = chern_to_ch(&c, ExactRational::from(4), 7);
        for k in 1..=7u32 {
            let pk = x.iter().fold(GradedPoly::zero(&ring), |acc, xi| &acc + &xi.pow(k));
            assert_eq!(ch.get(k).unwrap(), &pk.scale(&inverse_factorial(k)), "ch_{k}");
        }
        assert_eq!(ch_to_chern(&ch, 7).unwrap(), c);
    }

    #[test]
    fn ch_to_chern_missing_component() {
        let (ring, _) = generic(2, None);
        let mut comps = BTreeMap::new();
        comps.insert(1, p(&ring, "c1"));
        let ch = ChSeries::new(&ring, comps).unwrap();
        assert_eq!(ch_to_chern(&ch, 2), Err(SymfunError::MissingComponent(2)));
    }

    #[test]
    fn newton_round_trip_weight_8() {
        let (_, c) = generic(8, Some(8));
        let ch = chern_to_ch(&c, ExactRational::from(2), 8);
        assert_eq!(ch_to_chern(&ch, 8).unwrap(), c);
    }

    #[test]
    fn half_twist_examples() {
        let ring = GradedRingSpec::new(vec![GeneratorSpec::new("phi", 1)], Some(4), None).unwrap();
        let phi = p(&ring, "phi");
        let mut comps = BTreeMap::new();
        comps.insert(0, p(&ring, "2"));
        let rank_only = ChSeries::new(&ring, comps).unwrap();
        let same = half_twist_ch(&rank_only, &GradedPoly::zero(&ring)).unwrap();
        assert_eq!(same.get_or_zero(0), p(&ring, "2"));
        assert!((1..=4).all(|k| same.get_or_zero(k).is_zero()));
        // a rank-2 bundle with c1 = phi becomes c1 = 0 after the half twist
        let mut comps = BTreeMap::new();
        comps.insert(0, p(&ring, "2"));
        comps.insert(1, phi.clone());
        let e = ChSeries::new(&ring, comps).unwrap();
        let t = half_twist_ch(&e, &phi).unwrap();
        assert!(t.get_or_zero(1).is_zero());
        assert_eq!(twist_ch(&rank_only, &phi).unwrap().get_or_zero(1), p(&ring, "2*phi"));
    }

    #[test]
    fn half_twist_is_additive() {
        let ring = GradedRingSpec::new(
            vec![GeneratorSpec::new("l", 1), GeneratorSpec::new("x", 1), GeneratorSpec::new("y", 2)],
            Some(6),
            None,
        )
        .unwrap();
        let mut comps = BTreeMap::new();
        comps.insert(0, p(&ring, "3"));
        comps.insert(1, p(&ring, "x"));
        comps.insert(2, p(&ring, "y - x^2"));
        let ch = ChSeries::new(&ring, comps).unwrap();
        let l = p(&ring, "l");
        let twice = half_twist_ch(&half_twist_ch(&ch, &l).unwrap(), &l).unwrap();
        assert_eq!(half_twist_ch(&ch, &p(&ring, "2*l")).unwrap(), twice);
        let undo = half_twist_ch(&half_twist_ch(&ch, &l).unwrap(), &(-&l)).unwrap();
        for k in 0..=2 {
            assert_eq!(undo.get_or_zero(k), ch.get_or_zero(k));
        }
        assert!(half_twist_ch(&ch, &p(&ring, "y")).is_err());
    }

    #[test]
    fn schur_examples() {
        let (ring, c) = generic(5, None);
        assert_eq!(schur(&Partition::default(), &c), GradedPoly::one(&ring));
        assert_eq!(schur(&Partition::new(vec![1]).unwrap(), &c), p(&ring, "c1"));
        assert_eq!(schur(&Partition::new(vec![2, 1]).unwrap(), &c), p(&ring, "c1*c2 - c3"));
        assert_eq!(
            schur(&Partition::staircase(3), &c),
            p(&ring, "c1*c2*c3 - c3^2 - c1^2*c4 + c1*c5")
        );
        assert_eq!(schur(&Partition::rectangle(2, 1), &c), p(&ring, "c1^2 - c2"));
    }

    #[test]
    fn schur_is_homogeneous() {
        let (_, c) = generic(8, None);
        for parts in [vec![3, 3], vec![4, 2, 1], vec![2, 2, 2, 1], vec![5]] {
            let lambda = Partition::new(parts).unwrap();
            assert_eq!(schur(&lambda, &c).homogeneous_weight().unwrap(), Some(lambda.weight()));
        }
    }

    fn generic_skew(n: usize) -> (Ring, Vec<Vec<GradedPoly>>) {
        let mut gens = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                gens.push(GeneratorSpec::new(format!("a{}{}", i + 1, j + 1), 1));
            }
        }
        let ring = GradedRingSpec::new(gens, None, None).unwrap();
        let m = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Less => GradedPoly::generator(&ring, &format!("a{}{}", i + 1, j + 1)).unwrap(),
                        std::cmp::Ordering::Greater => -GradedPoly::generator(&ring, &format!("a{}{}", j + 1, i + 1)).unwrap(),
                        std::cmp::Ordering::Equal => GradedPoly::zero(&ring),
                    })
                    .collect()
            })
            .collect();
        (ring, m)
    }

    /// `(1 / (2^n n!)) sum_sigma sgn(sigma) prod a_{sigma(2i-1) sigma(2i)}`.
    fn pfaffian_by_definition(ring: &Ring, a: &[Vec<GradedPoly>]) -> GradedPoly {
        let n2 = a.len();
        let mut perm: Vec<usize> = (0..n2).collect();
        let mut acc = GradedPoly::zero(ring);
        let mut sign = 1i64;
        // Heap's algorithm, tracking the sign of each swap
        let mut c = vec![0usize; n2];
        let visit = |perm: &[usize], sign: i64, acc: &mut GradedPoly| {
            let mut t = GradedPoly::constant(ring, ExactRational::from(sign));
            for k in 0..n2 / 2 {
                t = &t * &a[perm[2 * k]][perm[2 * k + 1]];
            }
            *acc = &*acc + &t;
        };
        visit(&perm, sign, &mut acc);
        let mut i = 0;
        while i < n2 {
            if c[i] < i {
                if i % 2 == 0 { perm.swap(0, i) } else { perm.swap(c[i], i) }
                sign = -sign;
                visit(&perm, sign, &mut acc);
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        let norm = ExactRational::from(2i64.pow(n2 as u32 / 2)) * ExactRational::from(factorial(n2 as i64 / 2).unwrap());
        acc.scale(&norm.recip().unwrap())
    }

    #[test]
    fn pfaffian_examples() {
        let (ring, a) = generic_skew(2);
        assert_eq!(pfaffian(&ring, &a).unwrap(), p(&ring, "a12"));
        let (ring, a) = generic_skew(4);
        assert_eq!(pfaffian(&ring, &a).unwrap(), p(&ring, "a12*a34 - a13*a24 + a14*a23"));
        assert_eq!(pfaffian(&ring, &a).unwrap(), pfaffian_by_definition(&ring, &a));
        let (ring, a) = generic_skew(6);
        assert_eq!(pfaffian(&ring, &a).unwrap(), pfaffian_by_definition(&ring, &a));
        assert_eq!(pfaffian(&ring, &a).unwrap().pow(2), determinant(&ring, &a).unwrap());
    }

    #[test]
    fn standard_symplectic_form() {
        let ring = GradedRingSpec::odd_moduli(None);
        for n in 1..=4usize {
            let m: Vec<Vec<GradedPoly>> = (0..2 * n)
                .map(|i| {
                    (0..2 * n)
                        .map(|j| {
                            let v = if j == i + n { 1 } else if i == j + n { -1 } else { 0 };
                            GradedPoly::constant(&ring, ExactRational::from(v))
                        })
                        .collect()
                })
                .collect();
            // (0 I; -I 0) has Pfaffian (-1)^(n(n-1)/2) under the 2x2 normalization
            let expected = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
            assert_eq!(pfaffian(&ring, &m).unwrap(), GradedPoly::constant(&ring, ExactRational::from(expected)));
            assert_eq!(determinant(&ring, &m).unwrap(), GradedPoly::one(&ring));
        }
    }

    #[test]
    fn pfaffian_rejects_bad_input() {
        let ring = GradedRingSpec::odd_moduli(None);
        let z = GradedPoly::zero(&ring);
        let one = GradedPoly::one(&ring);
        let odd = vec![vec![z.clone(); 3]; 3];
        assert_eq!(pfaffian(&ring, &odd), Err(SymfunError::OddDimension(3)));
        let sym = vec![vec![z.clone(), one.clone()], vec![one.clone(), z.clone()]];
        assert_eq!(pfaffian(&ring, &sym), Err(SymfunError::NotSkew(0, 1)));
        let diag = vec![vec![one.clone(), z.clone()], vec![z.clone(), z.clone()]];
        assert_eq!(pfaffian(&ring, &diag), Err(SymfunError::NotSkew(0, 0)));
        let ragged = vec![vec![z.clone(), one.clone()], vec![z.clone()]];
        assert_eq!(pfaffian(&ring, &ragged), Err(SymfunError::NotSquare));
        assert_eq!(pfaffian(&ring, &[]).unwrap(), one);
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::ring::GradedRingSpec;
    use proptest::prelude::*;

    /// Gaussian elimination over the rationals; oracle for the memoized
    /// cofactor expansion.
    fn det_gauss(mut a: Vec<Vec<ExactRational>>) -> ExactRational {
        let n = a.len();
        let mut det = ExactRational::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return ExactRational::zero();
            };
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            det *= &a[col][col];
            for r in col + 1..n {
                let f = &a[r][col] / &a[col][col];
                for k in col..n {
                    let sub = &f * &a[col][k];
                    a[r][k] -= sub;
                }
            }
        }
        det
    }

    fn skew(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        proptest::collection::vec(-5i64..6, n * (n.saturating_sub(1)) / 2).prop_map(move |upper| {
            let mut m = vec![vec![0i64; n]; n];
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    m[i][j] = upper[k];
                    m[j][i] = -upper[k];
                    k += 1;
                }
            }
            m
        })
    }

    fn lift(ring: &Ring, m: &[Vec<i64>]) -> Vec<Vec<GradedPoly>> {
        m.iter().map(|r| r.iter().map(|&v| GradedPoly::constant(ring, ExactRational::from(v))).collect()).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn pfaffian_squares_to_determinant(half in 1usize..5, seed in skew(8)) {
            let n = 2 * half;
            let m: Vec<Vec<i64>> = seed[..n].iter().map(|r| r[..n].to_vec()).collect();
            let ring = GradedRingSpec::odd_moduli(None);
            let a = lift(&ring, &m);
            let pf = pfaffian(&ring, &a).unwrap();
            let det = determinant(&ring, &a).unwrap();
            prop_assert_eq!(pf.pow(2), det.clone());
            let rat: Vec<Vec<ExactRational>> = m.iter().map(|r| r.iter().map(|&v| ExactRational::from(v)).collect()).collect();
            prop_assert_eq!(det, GradedPoly::constant(&ring, det_gauss(rat)));
        }

        #[test]
        fn odd_skew_determinant_vanishes(n in prop_oneof![Just(1usize), Just(3), Just(5), Just(7)], seed in skew(7)) {
            let m: Vec<Vec<i64>> = seed[..n].iter().map(|r| r[..n].to_vec()).collect();
            let ring = GradedRingSpec::odd_moduli(None);
            prop_assert!(determinant(&ring, &lift(&ring, &m)).unwrap().is_zero());
        }
    }
}
