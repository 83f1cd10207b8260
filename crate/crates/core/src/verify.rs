//! Reproduction checks with a pass / fail / documented-discrepancy verdict.
//!
//! Known misprints are checked against the printed value and reported as
//! [`Status::DocumentedDiscrepancy`]; the corrected form is checked next to
//! them as an ordinary entry.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classes::{
    self, castelnuovo_count, skew_closed_form, type2_derivation, w_class, ClosedFormCoefficients, Nu4Variant,
    Type2Context,
};
use crate::exact::{bernoulli, binomial, ExactRational};
use crate::intersect::{
    calibrate_even_convention, default_calibration_targets, default_held_out_targets, degree_odd_moduli,
    degree_odd_moduli_closed_form, evaluate_degree_z, pair_m, pair_z, pairing_table, type2_nu3_degree,
    IntersectError, PairingConvention, PairingFactor,
};
use crate::ring::{GeneratorSpec, GradedPoly, GradedRingSpec};
use crate::symfun::{ch_to_chern, chern_to_ch, schur, ChSeries, ChernSeries, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    DocumentedDiscrepancy,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::DocumentedDiscrepancy => "documented-discrepancy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub check_name: String,
    pub paper_anchor: String,
    pub expected: String,
    pub computed: String,
    pub status: Status,
}

impl ReportEntry {
    /// `pass` iff the two texts agree, else `fail`.
    pub fn compare(name: impl Into<String>, anchor: impl Into<String>, expected: impl ToString, computed: impl ToString) -> Self {
        let (expected, computed) = (expected.to_string(), computed.to_string());
        let status = if expected == computed { Status::Pass } else { Status::Fail };
        Self { check_name: name.into(), paper_anchor: anchor.into(), expected, computed, status }
    }

    /// Like [`compare`](Self::compare), but a mismatch against a known
    /// misprint is a documented discrepancy.
    pub fn misprint(name: impl Into<String>, anchor: impl Into<String>, printed: impl ToString, computed: impl ToString) -> Self {
        let mut e = Self::compare(name, anchor, printed, computed);
        if e.status == Status::Fail {
            e.status = Status::DocumentedDiscrepancy;
        }
        e
    }

    fn error(name: impl Into<String>, anchor: impl Into<String>, expected: impl ToString, err: impl ToString) -> Self {
        Self {
            check_name: name.into(),
            paper_anchor: anchor.into(),
            expected: expected.to_string(),
            computed: format!("error: {}", err.to_string()),
            status: Status::Fail,
        }
    }
}

/// Both sides of the staircase identity `Delta_{nu-1,...,1}` in Chern
/// characters, over generic `ch1..ch{2nu-3}` with the even ones kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaircaseIdentity {
    pub nu: u32,
    /// Schur determinant of the Chern classes from Newton's identities.
    pub schur_side: GradedPoly,
    pub literal: GradedPoly,
    pub corrected: GradedPoly,
}

impl StaircaseIdentity {
    pub fn even_components_cancel(&self) -> bool {
        (1..self.nu - 1).all(|i| self.schur_side.degree_in(&format!("ch{}", 2 * i)) == 0)
    }
}

pub fn staircase_identity(nu: u32) -> Result<StaircaseIdentity, classes::ClassError> {
    if !(3..=4).contains(&nu) {
        return Err(classes::ClassError::Unsupported(format!("staircase identity for nu = {nu}")));
    }
    let top = 2 * nu - 3;
    let gens = (1..=top).map(|i| GeneratorSpec::new(format!("ch{i}"), i)).collect();
    let ring = GradedRingSpec::new(gens, None, None)?;
    let comps: BTreeMap<u32, GradedPoly> =
        (1..=top).map(|i| (i, GradedPoly::generator(&ring, &format!("ch{i}")).expect("generator"))).collect();
    let ch = ChSeries::new(&ring, comps)?;
    let c = ch_to_chern(&ch, top)?;
    Ok(StaircaseIdentity {
        nu,
        schur_side: schur(&Partition::staircase(nu - 1), &c),
        literal: skew_closed_form(nu, &ch, ClosedFormCoefficients::Literal)?,
        corrected: skew_closed_form(nu, &ch, ClosedFormCoefficients::Corrected)?,
    })
}

/// `sum_{j=0}^{n} C(n+1, j) B_j = 0` for `1 <= n <= upto`.
pub fn bernoulli_recurrence_holds(upto: i64) -> bool {
    (1..=upto).all(|n| {
        (0..=n)
            .map(|j| ExactRational::from(binomial(n + 1, j).expect("in range")) * bernoulli(j))
            .sum::<ExactRational>()
            .is_zero()
    })
}

/// Chern classes to Chern characters and back through weight `upto`.
pub fn newton_round_trip_holds(upto: u32) -> bool {
    let ring = GradedRingSpec::chern(upto, Some(upto));
    let names: Vec<String> = (1..=upto).map(|i| format!("c{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let c = ChernSeries::from_generators(&ring, &refs).expect("generic");
    let ch = chern_to_ch(&c, ExactRational::from(upto as i64), upto);
    match ch_to_chern(&ch, upto) {
        Ok(back) => (1..=upto as i64).all(|i| back.get(i) == c.get(i)),
        Err(_) => false,
    }
}

/// `q = m + p + 1 - g` is even for every top-degree monomial, and the
/// pairing vanishes when `q < 0`.
pub fn q_parity_holds(g_max: i64) -> Result<bool, IntersectError> {
    let conv = PairingConvention::default();
    for g in 2..=g_max {
        for row in pairing_table(g, false, &conv)? {
            let q = row.monomial.a as i64 + row.monomial.c as i64 + 1 - g;
            if q.rem_euclid(2) != 0 || (q < 0 && !row.value.is_zero()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `(h a^m b^n c^p)_Z = (a^m b^n c^p)_M` for every top-degree monomial.
pub fn fiber_rule_consistent(g_max: i64) -> Result<bool, IntersectError> {
    let conv = PairingConvention::default();
    for g in 2..=g_max {
        for row in pairing_table(g, false, &conv)? {
            let (m, n, p) = (row.monomial.a as i64, row.monomial.b as i64, row.monomial.c as i64);
            if pair_z(g, 1, m, n, p, &conv)? != pair_m(g, m, n, p, &conv)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn degree_entries(out: &mut Vec<ReportEntry>) {
    let conv = PairingConvention::default();
    let anchor = "type II nu = 3 degrees on the odd moduli space";
    for (g, e) in [(2, 1), (3, 16), (4, 2544), (5, 1231616)] {
        let name = format!("type2-nu3-degree-g{g}");
        out.push(match type2_nu3_degree(g, &conv) {
            Ok(v) => ReportEntry::compare(name, anchor, e, v),
            Err(err) => ReportEntry::error(name, anchor, e, err),
        });
    }
}

fn display_entries(out: &mut Vec<ReportEntry>) {
    let anchor = "closed-form degree of the odd moduli space";
    let powg = PairingConvention::with_factor(PairingFactor::PowG);
    for g in 2..=8 {
        let display = degree_odd_moduli_closed_form(g).expect("g >= 2");
        let v = degree_odd_moduli(g, &PairingConvention::default()).expect("g >= 2");
        out.push(ReportEntry::compare(format!("odd-moduli-degree-g{g}"), anchor, &display, v));
    }
    for g in 2..=8 {
        let display = degree_odd_moduli_closed_form(g).expect("g >= 2");
        let v = degree_odd_moduli(g, &powg).expect("g >= 2");
        out.push(ReportEntry::misprint(
            format!("odd-moduli-degree-pow-g-g{g}"),
            "pairing formula with the printed factor 2^g - 2",
            display,
            v,
        ));
    }
}

fn class_entries(out: &mut Vec<ReportEntry>) {
    let anchor = "type II nu = 3 class from the odd Chern characters";
    match type2_derivation(3, Type2Context::OddModuli) {
        Ok(d) => out.push(ReportEntry::compare(
            "type2-nu3-pipeline",
            anchor,
            d.tabulated.as_ref().expect("tabulated"),
            &d.pipeline,
        )),
        Err(err) => out.push(ReportEntry::error("type2-nu3-pipeline", anchor, "1/24*a^3 - 1/24*a*b + 1/6*c", err)),
    }
    let anchor = "type II nu = 4 class on the Hecke graph";
    match type2_derivation(4, Type2Context::HeckeGraph) {
        Ok(d) => {
            let tab = d.tabulated.as_ref().expect("tabulated");
            out.push(ReportEntry::compare("type2-nu4-pipeline", anchor, tab, &d.pipeline));
            out.push(ReportEntry::misprint(
                "type2-nu4-closed-form-literal",
                "nu = 4 closed form with literal coefficients",
                tab,
                &d.closed_form_literal,
            ));
        }
        Err(err) => out.push(ReportEntry::error("type2-nu4-pipeline", anchor, "tabulated class", err)),
    }
}

fn identity_entries(out: &mut Vec<ReportEntry>) {
    for nu in [3, 4] {
        let lambda = if nu == 3 { "21" } else { "321" };
        let anchor = format!("Delta_{lambda} in Chern characters");
        match staircase_identity(nu) {
            Ok(id) => {
                let name = format!("delta{lambda}-closed-form");
                out.push(if nu == 3 {
                    ReportEntry::compare(name, anchor.clone(), &id.literal, &id.schur_side)
                } else {
                    ReportEntry::misprint(name, anchor.clone(), &id.literal, &id.schur_side)
                });
                if nu == 4 {
                    out.push(ReportEntry::compare(
                        "delta321-corrected",
                        "Delta_321 with coefficient -2/3 on c1^3 ch3",
                        &id.corrected,
                        &id.schur_side,
                    ));
                }
                out.push(ReportEntry::compare(
                    format!("delta{lambda}-even-cancel"),
                    anchor,
                    true,
                    id.even_components_cancel(),
                ));
            }
            Err(err) => out.push(ReportEntry::error(format!("delta{lambda}-closed-form"), anchor, "identity", err)),
        }
    }
}

fn brill_noether_entries(out: &mut Vec<ReportEntry>) {
    for (r, d, g, e) in [(1, 3, 4, 2), (1, 4, 6, 5)] {
        let name = format!("castelnuovo-g{g}-r{r}-d{d}");
        let anchor = "number of g^r_d on a general curve when rho = 0";
        out.push(match castelnuovo_count(r, d, g) {
            Ok(v) => ReportEntry::compare(name, anchor, e, v),
            Err(err) => ReportEntry::error(name, anchor, e, err),
        });
    }
    let mut failures = Vec::new();
    let mut checked = 0;
    for g in 2..=8i64 {
        for r in 0..=3 {
            for d in 1..=2 * g - 2 {
                if (0..=r).all(|i| g - d + r + i >= 0) {
                    checked += 1;
                    if w_class(r, d, g).is_err() {
                        failures.push(format!("(r={r},d={d},g={g})"));
                    }
                }
            }
        }
    }
    let computed = if failures.is_empty() { format!("{checked} of {checked}") } else { failures.join(" ") };
    out.push(ReportEntry::compare(
        "w-class-determinant-sweep",
        "W^r_d class equals the rectangular Schur determinant, g <= 8, r <= 3",
        format!("{checked} of {checked}"),
        computed,
    ));
}

fn even_entries(out: &mut Vec<ReportEntry>) {
    let conv = PairingConvention::default();
    let anchor = "type III locus h^0 >= 3 is a single point in genus 3";
    out.push(match classes::type3_class(1).map_err(IntersectError::from).and_then(|c| evaluate_degree_z(&c, 3, 0, &conv)) {
        Ok(v) => ReportEntry::compare("type3-point-count-g3", anchor, 1, v),
        Err(err) => ReportEntry::error("type3-point-count-g3", anchor, 1, err),
    });

    let anchor = "nu = 4 degrees 6, 256, 28640 in the even moduli space";
    let held_out = default_held_out_targets();
    match calibrate_even_convention(&default_calibration_targets(), &held_out, &conv) {
        Ok(report) => {
            let configs: Vec<String> = report.solutions.iter().map(|s| s.config.to_string()).collect();
            out.push(ReportEntry::compare(
                "even-calibration-free-parameters",
                anchor,
                0,
                if report.determined { "0".to_string() } else { format!("unresolved among {}", configs.join("; ")) },
            ));
            for (i, t) in held_out.iter().enumerate() {
                let computed: Vec<String> = report
                    .solutions
                    .iter()
                    .map(|s| s.held_out[i].computed.as_ref().map_or_else(|| "error".into(), ToString::to_string))
                    .collect();
                let mut computed = computed;
                computed.dedup();
                out.push(ReportEntry::compare(
                    format!("even-held-out-{}-g{}", t.locus, t.g),
                    anchor,
                    &t.expected,
                    computed.join(" | "),
                ));
            }
            let surviving: Vec<&str> = report.surviving_variants.iter().map(|v| v.label()).collect();
            out.push(ReportEntry::compare(
                "even-calibration-surviving-variant",
                "which nu = 4 class survives the calibration",
                Nu4Variant::Tabulated.label(),
                surviving.join(", "),
            ));
        }
        Err(err) => out.push(ReportEntry::error("even-calibration", anchor, "at least one configuration", err)),
    }
}

fn property_entries(out: &mut Vec<ReportEntry>) {
    out.push(ReportEntry::compare("bernoulli-recurrence-30", "Bernoulli recurrence through B_30", true, bernoulli_recurrence_holds(30)));
    out.push(ReportEntry::compare("newton-round-trip-8", "Newton identities round trip through weight 8", true, newton_round_trip_holds(8)));
    let show = |r: Result<bool, IntersectError>| r.map_or_else(|e| format!("error: {e}"), |b| b.to_string());
    out.push(ReportEntry::compare("q-parity-g2-6", "q is even for top-degree monomials", true, show(q_parity_holds(6))));
    out.push(ReportEntry::compare(
        "fiber-rule-g2-5",
        "pairing of h times a class on the Hecke graph equals its pairing downstairs",
        true,
        show(fiber_rule_consistent(5)),
    ));
}

/// Every reproduction check, in a fixed order.
pub fn run_all() -> Vec<ReportEntry> {
    let mut out = Vec::new();
    degree_entries(&mut out);
    display_entries(&mut out);
    class_entries(&mut out);
    identity_entries(&mut out);
    brill_noether_entries(&mut out);
    even_entries(&mut out);
    property_entries(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_identities() {
        let id3 = staircase_identity(3).unwrap();
        assert_eq!(id3.literal, id3.schur_side);
        assert!(id3.even_components_cancel());
        let id4 = staircase_identity(4).unwrap();
        assert_eq!(id4.corrected, id4.schur_side);
        assert_ne!(id4.literal, id4.schur_side);
        assert!(id4.even_components_cancel());
        assert_eq!((&id4.corrected - &id4.literal).to_string(), "-1/3*ch1^3*ch3");
    }

    #[test]
    fn misprint_status() {
        assert_eq!(ReportEntry::misprint("x", "y", 1, 1).status, Status::Pass);
        assert_eq!(ReportEntry::misprint("x", "y", 1, 2).status, Status::DocumentedDiscrepancy);
        assert_eq!(ReportEntry::compare("x", "y", 1, 2).status, Status::Fail);
    }

    #[test]
    fn full_run_has_no_failures() {
        let entries = run_all();
        let fails: Vec<_> = entries.iter().filter(|e| e.status == Status::Fail).collect();
        assert!(fails.is_empty(), "{fails:#?}");
        let discrepancies: Vec<&str> = entries
            .iter()
            .filter(|e| e.status == Status::DocumentedDiscrepancy)
            .map(|e| e.check_name.as_str())
            .collect();
        assert_eq!(
            discrepancies,
            vec![
                "odd-moduli-degree-pow-g-g3",
                "odd-moduli-degree-pow-g-g4",
                "odd-moduli-degree-pow-g-g5",
                "odd-moduli-degree-pow-g-g6",
                "odd-moduli-degree-pow-g-g7",
                "odd-moduli-degree-pow-g-g8",
                "type2-nu4-closed-form-literal",
                "delta321-closed-form",
            ]
        );
    }
}
