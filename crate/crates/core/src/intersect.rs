//! Intersection numbers on the odd moduli space `M` (dimension `3g - 3`)
//! and on the Hecke graph `Z = P(E_p)` over it (dimension `3g - 2`).
//!
//! On `M` the pairing of `a^m b^n c^p` with `m + 2n + 3p = 3g - 3` is
//!
//! ```text
//! (-1)^(p-g) g! m! / ((g-p)! q!) 2^(2g-2-p) F B_q,   q = m + p + 1 - g,
//! ```
//!
//! with `F = 2^q - 2` by default ([`PairingFactor::PowQ`]) or `F = 2^g - 2`
//! ([`PairingFactor::PowG`]). Only the first reproduces the closed-form degree
//! of `M` and the type II degrees.
//!
//! On `Z`, `h^k = u_k h + v_k` and the fiber rule `int_Z h x = int_M x`,
//! `int_Z x = 0` reduce everything to `M`.
//!
//! Degrees of loci in the even moduli space are computed on `Z` as
//! `fiber_factor * int_Z class * D^ell * a`, where `D = x h + y a` is the
//! pulled-back polarization and `ell` is the dimension of the locus. The
//! pair `(D, fiber_factor)` is a calibrated parameter, see
//! [`calibrate_even_convention`].

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classes::{self, ClassError, Nu4Variant, Type2Context};
use crate::exact::{bernoulli, factorial, ExactRational};
use crate::ring::{h_power, GradedPoly, GradedRingSpec, Ring, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntersectError {
    #[error("genus {0} < 2")]
    Genus(i64),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("the tabulated Hecke-graph formula only covers h^1, got h^{0}")]
    TabulatedNeedsLinearH(u32),
    #[error("class is not homogeneous")]
    Inhomogeneous,
    #[error("expected dimension {0} is negative")]
    NegativeDimension(i64),
    #[error("calibration needs at least one target")]
    NoTargets,
    #[error("no configuration reproduces all targets; best candidates:\n{}", format_near_misses(.0))]
    NoConfiguration(Vec<CandidateResult>),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

fn format_near_misses(v: &[CandidateResult]) -> String {
    v.iter().map(|c| format!("  {c}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingFactor {
    /// `2^q - 2`.
    #[default]
    PowQ,
    /// `2^g - 2`.
    PowG,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZPairing {
    /// Rewrite `h^k` and integrate the `h`-linear part over `M`.
    #[default]
    FiberRule,
    /// Closed two-branch formula for `(h a^m b^n c^p)`; `h`-linear only.
    Tabulated,
}

/// `x h + y a` on the Hecke graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HeckeDivisor {
    pub h: ExactRational,
    pub alpha: ExactRational,
}

impl HeckeDivisor {
    pub fn new(h: ExactRational, alpha: ExactRational) -> Self {
        Self { h, alpha }
    }

    pub fn to_poly(&self, ring: &Ring) -> GradedPoly {
        let h = GradedPoly::generator(ring, "h").expect("hecke ring");
        let a = GradedPoly::generator(ring, "a").expect("hecke ring");
        &h.scale(&self.h) + &a.scale(&self.alpha)
    }
}

impl fmt::Display for HeckeDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly(&GradedRingSpec::hecke(None)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvenDegree {
    pub divisor: HeckeDivisor,
    pub fiber_factor: ExactRational,
}

impl Default for EvenDegree {
    fn default() -> Self {
        Self {
            divisor: HeckeDivisor::new(ExactRational::one(), ExactRational::zero()),
            fiber_factor: ExactRational::frac(1, 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PairingConvention {
    pub factor: PairingFactor,
    pub z_pairing: ZPairing,
    pub even_degree: EvenDegree,
}

impl PairingConvention {
    pub fn with_factor(factor: PairingFactor) -> Self {
        Self { factor: factor, ..Self::default() }
    }
}

fn check_genus(g: i64) -> Result<(), IntersectError> {
    if g < 2 {
        Err(IntersectError::Genus(g))
    } else {
        Ok(())
    }
}

fn fact(k: i64) -> ExactRational {
    ExactRational::from(factorial(k).expect("nonnegative"))
}

fn pow2(k: i64) -> ExactRational {
    ExactRational::from(2).pow(k as i32)
}

fn sign(k: i64) -> ExactRational {
    if k.rem_euclid(2) == 0 {
        ExactRational::one()
    } else {
        -ExactRational::one()
    }
}

/// `(a^m b^n c^p)` on `M`.
pub fn pair_m(g: i64, m: i64, n: i64, p: i64, conv: &PairingConvention) -> Result<ExactRational, IntersectError> {
    check_genus(g)?;
    if m < 0 || n < 0 || p < 0 || m + 2 * n + 3 * p != 3 * g - 3 {
        return Err(IntersectError::DegreeMismatch(format!("a^{m} b^{n} c^{p} in genus {g}")));
    }
    let q = m + p + 1 - g;
    if q < 0 {
        return Ok(ExactRational::zero());
    }
    let f = match conv.factor {
        PairingFactor::PowQ => pow2(q) - ExactRational::from(2),
        PairingFactor::PowG => pow2(g) - ExactRational::from(2),
    };
    Ok(sign(p - g) * fact(g) * fact(m) / (fact(g - p) * fact(q)) * pow2(2 * g - 2 - p) * f * bernoulli(q))
}

pub fn degree_odd_moduli(g: i64, conv: &PairingConvention) -> Result<ExactRational, IntersectError> {
    pair_m(g, 3 * g - 3, 0, 0, conv)
}

/// `(-1)^g (3g-3)!/(2g-2)! 2^(2g-2) (2^(2g-2) - 2) B_{2g-2}`.
pub fn degree_odd_moduli_closed_form(g: i64) -> Result<ExactRational, IntersectError> {
    check_genus(g)?;
    Ok(sign(g) * fact(3 * g - 3) / fact(2 * g - 2)
        * pow2(2 * g - 2)
        * (pow2(2 * g - 2) - ExactRational::from(2))
        * bernoulli(2 * g - 2))
}

/// Closed formula for `(h a^m b^n c^p)` on `Z`, `m + 2n + 3p = 3g - 3`.
fn pair_z_tabulated(g: i64, m: i64, n: i64, p: i64) -> Result<ExactRational, IntersectError> {
    if m < 0 || n < 0 || p < 0 || m + 2 * n + 3 * p != 3 * g - 3 {
        return Err(IntersectError::DegreeMismatch(format!("h a^{m} b^{n} c^{p} in genus {g}")));
    }
    let q = m + p + 1 - g;
    if q < 0 {
        return Ok(ExactRational::zero());
    }
    let base = pow2(g) * fact(g) * fact(m) / fact(g - p);
    if q == 0 {
        Ok(sign(p + g + 1) * base * ExactRational::from(m))
    } else {
        Ok(sign(p + g) * base / fact(q) * bernoulli(q))
    }
}

/// `(h^a a^m b^n c^p)` on `Z`, `a + m + 2n + 3p = 3g - 2`.
pub fn pair_z(g: i64, a: u32, m: i64, n: i64, p: i64, conv: &PairingConvention) -> Result<ExactRational, IntersectError> {
    check_genus(g)?;
    if m < 0 || n < 0 || p < 0 || a as i64 + m + 2 * n + 3 * p != 3 * g - 2 {
        return Err(IntersectError::DegreeMismatch(format!("h^{a} a^{m} b^{n} c^{p} in genus {g}")));
    }
    match conv.z_pairing {
        ZPairing::Tabulated => {
            if a != 1 {
                return Err(IntersectError::TabulatedNeedsLinearH(a));
            }
            pair_z_tabulated(g, m, n, p)
        }
        ZPairing::FiberRule => {
            let ring = GradedRingSpec::hecke(Some((3 * g - 2) as u32));
            let (u, _) = h_power(&ring, a)?;
            let rest = GradedPoly::monomial(&ring, &[("a", m as u32), ("b", n as u32), ("c", p as u32)], ExactRational::one())?;
            integrate_m(&(&u * &rest), g, conv)
        }
    }
}

/// Exponents of `a, b, c` (and `h`, if present) in a monomial of `ring`.
fn exponents(ring: &Ring, mono: &[u32]) -> Result<[i64; 4], IntersectError> {
    let mut out = [0i64; 4];
    for (g, &e) in ring.generators().iter().zip(mono) {
        let slot = match g.name.as_str() {
            "h" => 0,
            "a" => 1,
            "b" => 2,
            "c" => 3,
            _ if e == 0 => continue,
            other => return Err(RingError::Unmappable(other.to_string()).into()),
        };
        out[slot] = e as i64;
    }
    Ok(out)
}

/// Top-degree integral over `M` of a polynomial in `a, b, c`; lower-weight
/// terms integrate to zero.
pub fn integrate_m(x: &GradedPoly, g: i64, conv: &PairingConvention) -> Result<ExactRational, IntersectError> {
    let ring = x.ring().clone();
    let mut total = ExactRational::zero();
    for (mono, c) in x.terms() {
        let [h, m, n, p] = exponents(&ring, mono)?;
        if h != 0 {
            return Err(IntersectError::DegreeMismatch("h is not a class on M".into()));
        }
        if m + 2 * n + 3 * p == 3 * g - 3 {
            total += c * &pair_m(g, m, n, p, conv)?;
        }
    }
    Ok(total)
}

/// Top-degree integral over `Z` of a polynomial in `h, a, b, c`.
pub fn integrate_z(x: &GradedPoly, g: i64, conv: &PairingConvention) -> Result<ExactRational, IntersectError> {
    let ring = GradedRingSpec::hecke(Some((3 * g - 2) as u32));
    let x = x.map_into(&ring)?;
    let (u, _) = x.reduce_h()?;
    match conv.z_pairing {
        ZPairing::FiberRule => integrate_m(&u, g, conv),
        ZPairing::Tabulated => {
            let mut total = ExactRational::zero();
            for (mono, c) in u.terms() {
                let [_, m, n, p] = exponents(&ring, mono)?;
                if m + 2 * n + 3 * p == 3 * g - 3 {
                    total += c * &pair_z_tabulated(g, m, n, p)?;
                }
            }
            Ok(total)
        }
    }
}

fn class_weight(class: &GradedPoly) -> Result<i64, IntersectError> {
    match class.homogeneous_weight() {
        Ok(w) => Ok(w.unwrap_or(0) as i64),
        Err(_) => Err(IntersectError::Inhomogeneous),
    }
}

/// Degree of a codimension-`c` class on `M` with respect to `a`:
/// `int_M class * a^(3g-3-c)`.
pub fn evaluate_degree(class: &GradedPoly, g: i64, conv: &PairingConvention) -> Result<ExactRational, IntersectError> {
    check_genus(g)?;
    let c = class_weight(class)?;
    let dim = 3 * g - 3;
    if c > dim {
        return Err(IntersectError::NegativeDimension(dim - c));
    }
    let ring = GradedRingSpec::odd_moduli(Some(dim as u32));
    let x = class.map_into(&ring)?;
    let a = GradedPoly::generator(&ring, "a")?;
    integrate_m(&(&x * &a.pow((dim - c) as u32)), g, conv)
}

/// `fiber_factor * int_Z class * D^ell_powers * a`.
pub fn evaluate_degree_z(
    class: &GradedPoly,
    g: i64,
    ell_powers: u32,
    conv: &PairingConvention,
) -> Result<ExactRational, IntersectError> {
    Ok(raw_degree_z(class, g, ell_powers, &conv.even_degree.divisor, conv)? * &conv.even_degree.fiber_factor)
}

fn raw_degree_z(
    class: &GradedPoly,
    g: i64,
    ell_powers: u32,
    divisor: &HeckeDivisor,
    conv: &PairingConvention,
) -> Result<ExactRational, IntersectError> {
    check_genus(g)?;
    let c = class_weight(class)?;
    if c + ell_powers as i64 + 1 != 3 * g - 2 {
        return Err(IntersectError::DegreeMismatch(format!(
            "class of weight {c} with {ell_powers} divisor powers in genus {g}"
        )));
    }
    let ring = GradedRingSpec::hecke(Some((3 * g - 2) as u32));
    let x = class.map_into(&ring)?;
    let d = divisor.to_poly(&ring);
    let a = GradedPoly::generator(&ring, "a")?;
    integrate_z(&(&(&x * &d.pow(ell_powers)) * &a), g, conv)
}

/// Degree of the type II `nu = 3` locus on `M` with respect to `a`.
pub fn type2_nu3_degree(g: i64, conv: &PairingConvention) -> Result<ExactRational, IntersectError> {
    let class = classes::type2_class(3, Type2Context::OddModuli)?;
    evaluate_degree(&class, g, conv)
}

/// Loci whose degree is taken in the even moduli space through `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "locus", rename_all = "kebab-case")]
pub enum EvenLocus {
    /// `{hom(F, E) >= 4}`, codimension 6.
    Type2Nu4,
    /// `{h^0(E) >= n + 2}`, codimension `(n+2)(n+3)/2`.
    Type3 { n: u32 },
}

impl EvenLocus {
    pub fn codim(self) -> i64 {
        match self {
            EvenLocus::Type2Nu4 => 6,
            EvenLocus::Type3 { n } => (n as i64 + 2) * (n as i64 + 3) / 2,
        }
    }

    pub fn class(self, variant: Nu4Variant) -> Result<GradedPoly, IntersectError> {
        Ok(match self {
            EvenLocus::Type2Nu4 => classes::nu4_hecke_class(variant)?,
            EvenLocus::Type3 { n } => classes::type3_class(n)?,
        })
    }

    /// Expected dimension in the `(3g-3)`-dimensional even moduli space.
    pub fn dimension(self, g: i64) -> Result<u32, IntersectError> {
        let dim = 3 * g - 3 - self.codim();
        u32::try_from(dim).map_err(|_| IntersectError::NegativeDimension(dim))
    }
}

impl fmt::Display for EvenLocus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvenLocus::Type2Nu4 => f.write_str("type2-nu4"),
            EvenLocus::Type3 { n } => write!(f, "type3-n{n}"),
        }
    }
}

pub fn even_locus_degree(
    locus: EvenLocus,
    g: i64,
    variant: Nu4Variant,
    conv: &PairingConvention,
) -> Result<ExactRational, IntersectError> {
    check_genus(g)?;
    evaluate_degree_z(&locus.class(variant)?, g, locus.dimension(g)?, conv)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CalibrationTarget {
    #[serde(flatten)]
    pub locus: EvenLocus,
    pub g: i64,
    pub expected: ExactRational,
}

impl CalibrationTarget {
    pub fn new(locus: EvenLocus, g: i64, expected: i64) -> Self {
        Self { locus, g, expected: ExactRational::from(expected) }
    }
}

/// Point count of `{h^0 >= 3}` in genus 3 and the `nu = 4` degree 6 in genus 4.
pub fn default_calibration_targets() -> Vec<CalibrationTarget> {
    vec![CalibrationTarget::new(EvenLocus::Type3 { n: 1 }, 3, 1), CalibrationTarget::new(EvenLocus::Type2Nu4, 4, 6)]
}

/// `nu = 4` degrees in genus 5 and 6, plus two classical type III degrees:
/// the cone over the Veronese surface (4) and the cubic threefold (3).
pub fn default_held_out_targets() -> Vec<CalibrationTarget> {
    vec![
        CalibrationTarget::new(EvenLocus::Type2Nu4, 5, 256),
        CalibrationTarget::new(EvenLocus::Type2Nu4, 6, 28640),
        CalibrationTarget::new(EvenLocus::Type3 { n: 0 }, 3, 4),
        CalibrationTarget::new(EvenLocus::Type3 { n: 1 }, 4, 3),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CandidateConfig {
    pub variant: Nu4Variant,
    pub fiber_factor: ExactRational,
    pub divisor: HeckeDivisor,
}

impl CandidateConfig {
    pub fn convention(&self, base: &PairingConvention) -> PairingConvention {
        PairingConvention {
            even_degree: EvenDegree { divisor: self.divisor.clone(), fiber_factor: self.fiber_factor.clone() },
            ..base.clone()
        }
    }
}

impl fmt::Display for CandidateConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "class={} divisor={} fiber_factor={}", self.variant.label(), self.divisor, self.fiber_factor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateResult {
    pub config: CandidateConfig,
    /// One value per target, in target order; `None` if evaluation failed.
    pub values: Vec<Option<ExactRational>>,
    pub matched: usize,
}

impl fmt::Display for CandidateResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> =
            self.values.iter().map(|v| v.as_ref().map_or_else(|| "error".to_string(), ToString::to_string)).collect();
        write!(f, "{} -> [{}] ({} matched)", self.config, vals.join(", "), self.matched)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeldOutCheck {
    pub target: CalibrationTarget,
    pub computed: Option<ExactRational>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalibrationSolution {
    pub config: CandidateConfig,
    pub held_out: Vec<HeldOutCheck>,
}

impl CalibrationSolution {
    pub fn held_out_ok(&self) -> bool {
        self.held_out.iter().all(|h| h.ok)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub targets: Vec<CalibrationTarget>,
    pub candidates_searched: usize,
    pub solutions: Vec<CalibrationSolution>,
    /// Variants with at least one solution.
    pub surviving_variants: Vec<Nu4Variant>,
    /// True when every solution predicts the same held-out values, i.e. the
    /// targets leave no free parameter that matters.
    pub determined: bool,
}

impl CalibrationReport {
    pub fn all_held_out_ok(&self) -> bool {
        !self.solutions.is_empty() && self.solutions.iter().all(CalibrationSolution::held_out_ok)
    }
}

/// Search grid, in reporting order: variants, then fiber factors `1/2, 1`,
/// then divisors `x h + y a` with `x, y` in `{-2, -3/2, ..., 2}`.
pub fn candidate_grid() -> Vec<CandidateConfig> {
    let halves: Vec<ExactRational> = (-4..=4).map(|k| ExactRational::frac(k, 2)).collect();
    let mut out = Vec::new();
    for variant in Nu4Variant::ALL {
        for fiber_factor in [ExactRational::frac(1, 2), ExactRational::one()] {
            for x in &halves {
                for y in &halves {
                    out.push(CandidateConfig {
                        variant,
                        fiber_factor: fiber_factor.clone(),
                        divisor: HeckeDivisor::new(x.clone(), y.clone()),
                    });
                }
            }
        }
    }
    out
}

/// Finds every configuration in [`candidate_grid`] that reproduces all
/// `targets`, then checks each against `held_out`.
pub fn calibrate_even_convention(
    targets: &[CalibrationTarget],
    held_out: &[CalibrationTarget],
    base: &PairingConvention,
) -> Result<CalibrationReport, IntersectError> {
    if targets.is_empty() {
        return Err(IntersectError::NoTargets);
    }
    // the fiber factor is an overall scale, so cache the unscaled integral
    let mut cache: HashMap<(Nu4Variant, EvenLocus, i64, HeckeDivisor), Option<ExactRational>> = HashMap::new();
    let mut eval = |cfg: &CandidateConfig, t: &CalibrationTarget| -> Option<ExactRational> {
        // type III classes do not depend on the variant
        let variant = if t.locus == EvenLocus::Type2Nu4 { cfg.variant } else { Nu4Variant::Tabulated };
        let key = (variant, t.locus, t.g, cfg.divisor.clone());
        let raw = cache
            .entry(key)
            .or_insert_with(|| {
                let class = t.locus.class(variant).ok()?;
                let ell = t.locus.dimension(t.g).ok()?;
                raw_degree_z(&class, t.g, ell, &cfg.divisor, base).ok()
            })
            .clone();
        raw.map(|r| r * &cfg.fiber_factor)
    };
    let grid = candidate_grid();
    let mut results = Vec::with_capacity(grid.len());
    for cfg in &grid {
        let values: Vec<Option<ExactRational>> = targets.iter().map(|t| eval(cfg, t)).collect();
        let matched = values.iter().zip(targets).filter(|(v, t)| v.as_ref() == Some(&t.expected)).count();
        results.push(CandidateResult { config: cfg.clone(), values, matched });
    }
    let solutions: Vec<CalibrationSolution> = results
        .iter()
        .filter(|r| r.matched == targets.len())
        .map(|r| CalibrationSolution {
            config: r.config.clone(),
            held_out: held_out
                .iter()
                .map(|t| {
                    let computed = eval(&r.config, t);
                    HeldOutCheck { ok: computed.as_ref() == Some(&t.expected), target: t.clone(), computed }
                })
                .collect(),
        })
        .collect();
    if solutions.is_empty() {
        let mut near = results;
        // stable sort keeps grid order among equals
        near.sort_by_key(|r| std::cmp::Reverse(r.matched));
        near.truncate(10);
        return Err(IntersectError::NoConfiguration(near));
    }
    let mut surviving_variants: Vec<Nu4Variant> = solutions.iter().map(|s| s.config.variant).collect();
    surviving_variants.dedup();
    let first: Vec<&Option<ExactRational>> = solutions[0].held_out.iter().map(|h| &h.computed).collect();
    let determined = solutions.iter().all(|s| s.held_out.iter().map(|h| &h.computed).eq(first.iter().copied()));
    Ok(CalibrationReport {
        targets: targets.to_vec(),
        candidates_searched: grid.len(),
        solutions,
        surviving_variants,
        determined,
    })
}

/// Exponents of `h, a, b, c` in one table row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialExponents {
    #[serde(rename = "H")]
    pub h: u32,
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingRecord {
    pub g: i64,
    pub monomial: MonomialExponents,
    pub value: ExactRational,
}

/// All top-degree pairings on `M` (or on `Z` with `hecke`), in
/// graded-lexicographic order over `h, a, b, c`.
pub fn pairing_table(g: i64, hecke: bool, conv: &PairingConvention) -> Result<Vec<PairingRecord>, IntersectError> {
    check_genus(g)?;
    let top = if hecke { 3 * g - 2 } else { 3 * g - 3 };
    let max_h = match (hecke, conv.z_pairing) {
        (false, _) => 0,
        (true, ZPairing::Tabulated) => 1,
        (true, ZPairing::FiberRule) => top,
    };
    let min_h = if hecke { 1 } else { 0 };
    let mut rows = Vec::new();
    for h in (min_h..=max_h).rev() {
        let rest = top - h;
        for m in (0..=rest).rev() {
            for n in (0..=(rest - m) / 2).rev() {
                let left = rest - m - 2 * n;
                if left % 3 != 0 {
                    continue;
                }
                let p = left / 3;
                let value = if hecke { pair_z(g, h as u32, m, n, p, conv)? } else { pair_m(g, m, n, p, conv)? };
                rows.push(PairingRecord {
                    g,
                    monomial: MonomialExponents { h: h as u32, a: m as u32, b: n as u32, c: p as u32 },
                    value,
                });
            }
        }
    }
    Ok(rows)
}
