//! Brill-Noether numerics and fundamental classes of degeneracy loci.
//!
//! Three families appear here:
//!
//! * classic loci `W^r_d` in the Picard variety, with class
//!   `lambda(r, d, g) * t^(g - rho)`, checked against the rectangular Schur
//!   determinant in `c_i = t^i / i!`;
//! * type II loci `{hom(F, E) >= nu}` on the odd moduli space (ring
//!   `a, b, c`) and on the Hecke graph (ring `h, a, b, c`), whose classes
//!   come from the odd Chern characters of a direct image through the skew
//!   Harris-Tu staircase determinant;
//! * type III loci `{h^0(E) >= n + 2}`, whose Hecke-graph classes are
//!   tabulated constants for `n = 0, 1, 2`.
//!
//! The type II derivation keeps the even Chern characters as opaque
//! generators `ch2, ch4, ...` and fails unless they cancel.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::exact::{factorial, ExactRational};
use crate::ring::{GeneratorSpec, GradedPoly, GradedRingSpec, Ring, RingError};
use crate::symfun::{ch_to_chern, dualize_ch, schur, ChSeries, ChernSeries, Partition, SymfunError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("class formula out of range: {0}")]
    OutOfRange(String),
    #[error("parity violates proposition hypothesis: {0}")]
    Parity(String),
    #[error("unsupported index: {0}")]
    Unsupported(String),
    #[error("invalid locus: {0}")]
    InvalidSpec(String),
    #[error("even Chern characters survive in the {0} class")]
    EvenComponentsSurvive(String),
    #[error("identity check failed: {0}")]
    IdentityMismatch(String),
    #[error(transparent)]
    Symfun(#[from] SymfunError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocusKind {
    /// `W^r_d`: line bundles of degree `d` with `h^0 >= r + 1`.
    Classic { r: i64, d: i64 },
    /// Rank `<= k` locus of a map from rank `rank_e` to rank `rank_f`.
    General { k: i64, rank_e: i64, rank_f: i64 },
    Symmetric { k: i64 },
    Lagrangian { k: i64 },
    /// Pfaffian locus of corank `>= nu`.
    Skew { nu: i64 },
    /// `{h^0(E) >= n + 2}` in the moduli of rank-2 bundles with canonical determinant.
    TypeIII { n: i64 },
    /// `{hom(F, E) >= nu}`.
    TypeII { nu: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocusSpec {
    pub kind: LocusKind,
    pub genus: i64,
}

impl LocusSpec {
    pub fn new(kind: LocusKind, genus: i64) -> Result<Self, ClassError> {
        if genus < 2 {
            return Err(ClassError::InvalidSpec(format!("genus {genus} < 2")));
        }
        let indices: &[i64] = match &kind {
            LocusKind::Classic { r, d } => &[*r, *d],
            LocusKind::General { k, rank_e, rank_f } => &[*k, *rank_e, *rank_f],
            LocusKind::Symmetric { k } | LocusKind::Lagrangian { k } => &[*k],
            LocusKind::Skew { nu } | LocusKind::TypeII { nu } => &[*nu],
            LocusKind::TypeIII { n } => &[*n],
        };
        if indices.iter().any(|&i| i < 0) {
            return Err(ClassError::InvalidSpec(format!("negative index in {kind:?}")));
        }
        Ok(Self { kind, genus })
    }

    /// Type II locus for a bundle `F` of known degree; `nu` and `deg F` must
    /// agree mod 2.
    pub fn type2_with_degree(nu: i64, deg_f: i64, genus: i64) -> Result<Self, ClassError> {
        if !hom_parity_ok(nu, deg_f) {
            return Err(ClassError::Parity(format!("nu = {nu} with deg F = {deg_f}")));
        }
        Self::new(LocusKind::TypeII { nu }, genus)
    }
}

/// `rho = g - (r + 1)(r - d + g)`.
pub fn brill_noether_rho(g: i64, r: i64, d: i64) -> i64 {
    g - (r + 1) * (r - d + g)
}

pub fn expected_codim(spec: &LocusSpec) -> i64 {
    let g = spec.genus;
    match spec.kind {
        LocusKind::Classic { r, d } => g - brill_noether_rho(g, r, d),
        LocusKind::General { k, rank_e, rank_f } => (rank_e - k) * (rank_f - k),
        LocusKind::Symmetric { k } | LocusKind::Lagrangian { k } => k * (k + 1) / 2,
        LocusKind::Skew { nu } | LocusKind::TypeII { nu } => nu * (nu - 1) / 2,
        LocusKind::TypeIII { n } => (n + 2) * (n + 3) / 2,
    }
}

/// Expected dimension where the ambient dimension is known: `g` for the
/// Picard variety, `3g - 3` for the rank-2 moduli spaces.
pub fn expected_dim(spec: &LocusSpec) -> Option<i64> {
    let ambient = match spec.kind {
        LocusKind::Classic { .. } => spec.genus,
        LocusKind::TypeIII { .. } | LocusKind::TypeII { .. } => 3 * spec.genus - 3,
        _ => return None,
    };
    Some(ambient - expected_codim(spec))
}

/// `lambda(r, d, g) = prod_{i=0}^{r} i! / (g - d + r + i)!`.
pub fn lambda_coeff(r: i64, d: i64, g: i64) -> Result<ExactRational, ClassError> {
    if r < 0 {
        return Err(ClassError::OutOfRange(format!("r = {r} < 0")));
    }
    (0..=r)
        .map(|i| {
            let den = factorial(g - d + r + i)
                .map_err(|_| ClassError::OutOfRange(format!("({}!) with g={g}, d={d}, r={r}", g - d + r + i)))?;
            Ok(ExactRational::new(factorial(i).expect("i >= 0"), den).expect("nonzero"))
        })
        .product()
}

/// Class of `W^r_d` in `Q[t]` truncated at weight `g`.
///
/// Computes both `lambda * t^(g - rho)` and the Schur determinant
/// `Delta_{(g-d+r)^(r+1)}(c_i = t^i/i!)` and fails if they differ.
pub fn w_class(r: i64, d: i64, g: i64) -> Result<GradedPoly, ClassError> {
    let lambda = lambda_coeff(r, d, g)?;
    let ring = GradedRingSpec::theta(g as u32);
    let rho = brill_noether_rho(g, r, d);
    let t = GradedPoly::generator(&ring, "t")?;
    let closed = t.pow((g - rho) as u32).scale(&lambda);
    let classes = (1..=g)
        .map(|i| t.pow(i as u32).scale(&ExactRational::new(1, factorial(i).expect("i >= 1")).expect("nonzero")))
        .collect();
    let c = ChernSeries::new(&ring, classes)?;
    let det = schur(&Partition::rectangle((r + 1) as u32, (g - d + r) as u32), &c);
    if det != closed {
        return Err(ClassError::IdentityMismatch(format!("W^{r}_{d}, g={g}: determinant {det} vs {closed}")));
    }
    Ok(closed)
}

/// `g! * lambda(r, d, g)`: the number of `g^r_d` on a general curve when
/// `rho = 0`.
pub fn castelnuovo_count(r: i64, d: i64, g: i64) -> Result<ExactRational, ClassError> {
    let rho = brill_noether_rho(g, r, d);
    if rho != 0 {
        return Err(ClassError::OutOfRange(format!("rho = {rho}, the count needs rho = 0")));
    }
    Ok(lambda_coeff(r, d, g)? * ExactRational::from(factorial(g).expect("g >= 0")))
}

/// Rank `<= k` locus of `f: E -> F`, `rank E = r`, `rank F = s`:
/// `Delta_{(s-k)^(r-k)}(c(f))`.
pub fn porteous_class(k: i64, cf: &ChernSeries, r: i64, s: i64) -> Result<GradedPoly, ClassError> {
    if k < 0 || k > r.min(s) {
        return Err(ClassError::OutOfRange(format!("k = {k} with ranks {r}, {s}")));
    }
    Ok(schur(&Partition::rectangle((r - k) as u32, (s - k) as u32), cf))
}

/// Symmetric corank-`k` locus: `2^k Delta_{k, k-1, ..., 1}(c(E^))`.
pub fn harris_tu_symmetric(k: u32, cdual: &ChernSeries) -> GradedPoly {
    schur(&Partition::staircase(k), cdual).scale(&ExactRational::from(2i64.pow(k)))
}

/// Skew corank-`nu` locus: `Delta_{nu-1, ..., 1}(c(E^))`; 1 for `nu <= 1`.
pub fn harris_tu_skew(nu: u32, cdual: &ChernSeries) -> GradedPoly {
    schur(&Partition::staircase(nu.saturating_sub(1)), cdual)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type2Context {
    /// Odd moduli space; ring `a, b, c`.
    OddModuli,
    /// Hecke graph; ring `h, a, b, c` (kept free of the `h^2` rule here).
    HeckeGraph,
}

/// Ring for a type II computation: the context generators plus
/// `ch2, ch4, ..., ch{2*even}` as opaque even Chern characters.
pub fn type2_ring(ctx: Type2Context, even_placeholders: u32) -> Ring {
    let mut gens = Vec::new();
    if ctx == Type2Context::HeckeGraph {
        gens.push(GeneratorSpec::new("h", 1));
    }
    gens.extend([GeneratorSpec::new("a", 1), GeneratorSpec::new("b", 2), GeneratorSpec::new("c", 3)]);
    gens.extend((1..=even_placeholders).map(|i| GeneratorSpec::new(format!("ch{}", 2 * i), 2 * i)));
    GradedRingSpec::new(gens, None, None).expect("valid")
}

/// Ring `h, a, b, c` with no rewrite rule.
pub fn hecke_free_ring() -> Ring {
    type2_ring(Type2Context::HeckeGraph, 0)
}

fn odd_ch_series(ring: &Ring, top_n: u32, ctx: Type2Context) -> Result<ChSeries, ClassError> {
    let parse = |s: &str| GradedPoly::parse(ring, s);
    // the Hecke series is the odd-moduli one with a/2 replaced by h
    let (first, lead) = match ctx {
        Type2Context::OddModuli => (parse("-1/2*a")?, parse("-1/8*a*b")?),
        Type2Context::HeckeGraph => (parse("-h")?, parse("-1/4*b*h")?),
    };
    let b4 = parse("1/4*b")?;
    let c = parse("c")?;
    let mut comps = BTreeMap::new();
    comps.insert(1, first);
    for n in 2..=top_n as i64 {
        let tail = &lead + &c.scale(&ExactRational::frac(n - 1, 2));
        let fact = ExactRational::from(factorial(2 * n - 1).expect("n >= 1"));
        let term = (&b4.pow(n as u32 - 2) * &tail).scale(&fact.recip().expect("nonzero"));
        comps.insert((2 * n - 1) as u32, term);
    }
    Ok(ChSeries::new(ring, comps)?)
}

/// Odd Chern characters of the half-twisted direct image on the odd moduli
/// space: `ch_1 = -a/2`, `ch_{2n-1} = (b/4)^(n-2) (-a b/8 + (n-1)/2 c) / (2n-1)!`.
/// `ring` must contain `a, b, c`.
pub fn ch_series_72(ring: &Ring, top_n: u32) -> Result<ChSeries, ClassError> {
    odd_ch_series(ring, top_n, Type2Context::OddModuli)
}

/// Hecke-graph version: `ch_1 = -h`,
/// `ch_{2n-1} = (b/4)^(n-2) (-b h/4 + (n-1)/2 c) / (2n-1)!`.
/// `ring` must contain `h, a, b, c`.
pub fn ch_series_76(ring: &Ring, top_n: u32) -> Result<ChSeries, ClassError> {
    odd_ch_series(ring, top_n, Type2Context::HeckeGraph)
}

/// Coefficient set for the closed form of the skew staircase class in
/// Chern characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClosedFormCoefficients {
    /// `c1^6/45 - 1/3 c1^3 ch3 + 24 c1 ch5 - 4 ch3^2` for `nu = 4`, as
    /// usually quoted.
    Literal,
    /// The same with `-2/3 c1^3 ch3`, which is what Newton's identities give.
    Corrected,
}

/// `Delta_{nu-1,...,1}` written in Chern characters of the same bundle,
/// for `nu = 3` (`c1^3/3 - 2 ch3`) and `nu = 4`. `c1` is read as `ch_1`.
pub fn skew_closed_form(nu: u32, ch: &ChSeries, coeffs: ClosedFormCoefficients) -> Result<GradedPoly, ClassError> {
    let get = |k: u32| ch.get(k).cloned().ok_or(SymfunError::MissingComponent(k));
    let q = ExactRational::frac;
    match nu {
        3 => {
            let (c1, ch3) = (get(1)?, get(3)?);
            Ok(&c1.pow(3).scale(&q(1, 3)) - &ch3.scale(&q(2, 1)))
        }
        4 => {
            let (c1, ch3, ch5) = (get(1)?, get(3)?, get(5)?);
            let mixed = match coeffs {
                ClosedFormCoefficients::Literal => q(-1, 3),
                ClosedFormCoefficients::Corrected => q(-2, 3),
            };
            Ok(&(&(&c1.pow(6).scale(&q(1, 45)) + &(&c1.pow(3) * &ch3).scale(&mixed))
                + &(&c1 * &ch5).scale(&q(24, 1)))
                - &ch3.pow(2).scale(&q(4, 1)))
        }
        _ => Err(ClassError::Unsupported(format!("closed form for nu = {nu}"))),
    }
}

fn context_ring(ctx: Type2Context) -> Ring {
    type2_ring(ctx, 0)
}

/// Published class for the supported `(nu, context)` pairs:
/// `(a^3 - a b + 4 c)/24` for `nu = 3` on the odd moduli space and the
/// six-term weight-6 class for `nu = 4` on the Hecke graph.
pub fn tabulated_type2(nu: u32, ctx: Type2Context) -> Option<GradedPoly> {
    let ring = context_ring(ctx);
    let text = match (nu, ctx) {
        (3, Type2Context::OddModuli) => "1/24*a^3 - 1/24*a*b + 1/6*c",
        (4, Type2Context::HeckeGraph) => "1/45*h^6 + 1/18*h^3*c - 1/36*c^2 - 1/36*h^4*b - 1/45*h*b*c + 1/180*h^2*b^2",
        _ => return None,
    };
    Some(GradedPoly::parse(&ring, text).expect("valid literal"))
}

/// All routes to a type II class, side by side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Type2Derivation {
    pub nu: u32,
    pub context: Type2Context,
    /// Newton identities with opaque even components, then the staircase
    /// Schur determinant of the dual.
    pub pipeline: GradedPoly,
    /// Closed form in odd Chern characters, literal coefficients.
    pub closed_form_literal: GradedPoly,
    /// Closed form with the corrected `nu = 4` coefficient.
    pub closed_form_corrected: GradedPoly,
    pub tabulated: Option<GradedPoly>,
}

impl Type2Derivation {
    pub fn pipeline_matches_tabulated(&self) -> Option<bool> {
        self.tabulated.as_ref().map(|t| *t == self.pipeline)
    }
}

pub fn type2_derivation(nu: u32, ctx: Type2Context) -> Result<Type2Derivation, ClassError> {
    if !(3..=4).contains(&nu) {
        return Err(ClassError::Unsupported(format!("type II class for nu = {nu}; supported: 3, 4")));
    }
    // Delta_{nu-1..1} needs c_1..c_{2nu-3}
    let top = 2 * nu - 3;
    let placeholders = nu - 2;
    let ring = type2_ring(ctx, placeholders);
    let mut ch = odd_ch_series(&ring, nu - 1, ctx)?;
    let mut comps = ch.components().clone();
    for i in 1..=placeholders {
        comps.insert(2 * i, GradedPoly::generator(&ring, &format!("ch{}", 2 * i))?);
    }
    ch = ChSeries::new(&ring, comps)?;
    let dual = dualize_ch(&ch);
    let c = ch_to_chern(&dual, top)?;
    let class = harris_tu_skew(nu, &c);
    for i in 1..=placeholders {
        if class.degree_in(&format!("ch{}", 2 * i)) > 0 {
            return Err(ClassError::EvenComponentsSurvive(format!("nu = {nu}")));
        }
    }
    let target = context_ring(ctx);
    let pipeline = class.map_into(&target)?;
    let closed_form_literal = skew_closed_form(nu, &dual, ClosedFormCoefficients::Literal)?.map_into(&target)?;
    let closed_form_corrected = skew_closed_form(nu, &dual, ClosedFormCoefficients::Corrected)?.map_into(&target)?;
    Ok(Type2Derivation { nu, context: ctx, pipeline, closed_form_literal, closed_form_corrected, tabulated: tabulated_type2(nu, ctx) })
}

/// Class of the type II locus `{hom(F, E) >= nu}`, `nu` in `{3, 4}`, from the
/// Newton pipeline. Where a tabulated class exists the two must agree.
pub fn type2_class(nu: u32, ctx: Type2Context) -> Result<GradedPoly, ClassError> {
    let d = type2_derivation(nu, ctx)?;
    if d.pipeline_matches_tabulated() == Some(false) {
        return Err(ClassError::IdentityMismatch(format!(
            "type II nu = {nu}: pipeline {} vs tabulated {}",
            d.pipeline,
            d.tabulated.as_ref().expect("present")
        )));
    }
    Ok(d.pipeline)
}

/// Which form of the `nu = 4` Hecke-graph class to use downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Nu4Variant {
    /// The tabulated class (identical to the pipeline result).
    Tabulated,
    /// The closed form with literal coefficients.
    ClosedFormLiteral,
}

impl Nu4Variant {
    pub const ALL: [Nu4Variant; 2] = [Nu4Variant::Tabulated, Nu4Variant::ClosedFormLiteral];

    pub fn label(self) -> &'static str {
        match self {
            Nu4Variant::Tabulated => "tabulated",
            Nu4Variant::ClosedFormLiteral => "closed-form-literal",
        }
    }
}

pub fn nu4_hecke_class(variant: Nu4Variant) -> Result<GradedPoly, ClassError> {
    match variant {
        Nu4Variant::Tabulated => Ok(tabulated_type2(4, Type2Context::HeckeGraph).expect("tabulated")),
        Nu4Variant::ClosedFormLiteral => Ok(type2_derivation(4, Type2Context::HeckeGraph)?.closed_form_literal),
    }
}

/// Hecke-graph class of the type III locus `{h^0(E) >= n + 2}` for
/// `n = 0, 1, 2`, in the free ring `h, a, b, c`.
pub fn type3_class(n: u32) -> Result<GradedPoly, ClassError> {
    let text = match n {
        0 => "1/6*h^3 - 1/6*h*b + 1/3*c",
        1 => "1/360*h^6 - 1/72*h^4*b + 1/36*h^3*c + 1/90*h^2*b^2 - 2/45*h*b*c - 1/18*c^2",
        2 => concat!(
            "1/302400*h^10 - 1/20160*h^8*b + 1/10080*h^7*c - 17/60480*h^4*b^3",
            " + 17/10080*h^3*b^2*c + 1/720*h^2*b*c^2 + 1/8400*h^2*b^4 + 1/216*h*c^3",
            " - 1/1050*h*b^3*c - 3/2800*b^2*c^2 + 1/4800*h^6*b^2 - 1/1200*h^5*b*c"
        ),
        _ => return Err(ClassError::Unsupported(format!("type III class for n = {n}; supported: 0, 1, 2"))),
    };
    Ok(GradedPoly::parse(&hecke_free_ring(), text)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocusFamily {
    TypeIII,
    TypeII,
}

/// Exponent `e` with `K = O(e)|_locus` for odd `n` (type III) or odd `nu`
/// (type II): `(index - 5)/2`. Negative exactly when the locus is Fano.
pub fn canonical_exponent(family: LocusFamily, index: i64) -> Result<i64, ClassError> {
    if index.rem_euclid(2) == 0 {
        return Err(ClassError::Parity(format!("{family:?} index {index} must be odd")));
    }
    Ok((index - 5) / 2)
}

/// `dim Hom(F, E) = deg F (mod 2)`.
pub fn hom_parity_ok(hom_dim: i64, deg_f: i64) -> bool {
    (hom_dim - deg_f).rem_euclid(2) == 0
}
