use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use degcalc::classes::{self, brill_noether_rho, castelnuovo_count, expected_codim, expected_dim, lambda_coeff};
use degcalc::classes::{LocusKind, LocusSpec, Nu4Variant, Type2Context};
use degcalc::exact::ExactRational;
use degcalc::intersect::{
    calibrate_even_convention, default_calibration_targets, default_held_out_targets, even_locus_degree,
    evaluate_degree, pairing_table, CalibrationReport, CalibrationTarget, EvenDegree, EvenLocus, HeckeDivisor,
    IntersectError, PairingConvention, PairingRecord, PairingFactor, ZPairing,
};
use degcalc::verify::{self, ReportEntry, Status};

const DEFAULT_MAX_G: i64 = 8;

#[derive(Parser)]
#[command(name = "degcalc", version, about = "Exact intersection numbers and degeneracy-locus degrees on moduli of rank-2 bundles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Top-degree pairings on the odd moduli space or the Hecke graph.
    Pairs(PairsArgs),
    /// Degrees of type II / type III loci over a range of genera.
    Degrees(DegreesArgs),
    /// Brill-Noether number, expected codimension and dimension of a locus.
    Bn(BnArgs),
    /// Number of g^r_d on a general curve when rho = 0.
    Castelnuovo(CastelnuovoArgs),
    /// Search for the even-moduli degree convention reproducing given targets.
    Calibrate(CalibrateArgs),
    /// Run every reproduction check.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    PowQ,
    PowG,
}

#[derive(Clone, Copy, ValueEnum)]
enum ZPairingArg {
    FiberRule,
    Tabulated,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Tabulated,
    ClosedFormLiteral,
}

impl From<VariantArg> for Nu4Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Tabulated => Nu4Variant::Tabulated,
            VariantArg::ClosedFormLiteral => Nu4Variant::ClosedFormLiteral,
        }
    }
}

#[derive(Args)]
struct ConventionArgs {
    /// Factor in the pairing formula: 2^q - 2 or 2^g - 2.
    #[arg(long, value_enum, default_value = "pow-q")]
    convention: Convention,
    /// How pairings on the Hecke graph are computed.
    #[arg(long, value_enum, default_value = "fiber-rule")]
    z_pairing: ZPairingArg,
    /// Coefficient of h in the divisor used for even-moduli degrees.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    divisor_h: ExactRational,
    /// Coefficient of a in the divisor used for even-moduli degrees.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    divisor_a: ExactRational,
    /// Overall factor for even-moduli degrees.
    #[arg(long, default_value = "1/2")]
    fiber_factor: ExactRational,
}

impl ConventionArgs {
    fn build(&self) -> PairingConvention {
        PairingConvention {
            factor: match self.convention {
                Convention::PowQ => PairingFactor::PowQ,
                Convention::PowG => PairingFactor::PowG,
            },
            z_pairing: match self.z_pairing {
                ZPairingArg::FiberRule => ZPairing::FiberRule,
                ZPairingArg::Tabulated => ZPairing::Tabulated,
            },
            even_degree: EvenDegree {
                divisor: HeckeDivisor::new(self.divisor_h.clone(), self.divisor_a.clone()),
                fiber_factor: self.fiber_factor.clone(),
            },
        }
    }
}

#[derive(Args)]
struct PairsArgs {
    #[arg(long)]
    g: i64,
    /// Pairings on the Hecke graph instead of the odd moduli space.
    #[arg(long)]
    hecke: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    conv: ConventionArgs,
}

#[derive(Args)]
struct DegreesArgs {
    /// Locus family: 2 for {hom(F, E) >= nu}, 3 for {h^0(E) >= n + 2}.
    #[arg(long = "type", value_parser = clap::value_parser!(u8).range(2..=3))]
    family: u8,
    #[arg(long)]
    nu: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    /// Inclusive genus range, `a..b`.
    #[arg(long, value_parser = parse_range)]
    g_range: RangeInclusive<i64>,
    /// Which nu = 4 class to use.
    #[arg(long, value_enum, default_value = "tabulated")]
    variant: VariantArg,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[command(flatten)]
    conv: ConventionArgs,
}

#[derive(Args)]
struct BnArgs {
    #[arg(long)]
    g: i64,
    #[arg(long, requires = "d")]
    r: Option<i64>,
    #[arg(long, requires = "r")]
    d: Option<i64>,
    /// Type III locus `{h^0(E) >= n + 2}`.
    #[arg(long, requires = "n", conflicts_with_all = ["r", "type2"])]
    type3: bool,
    #[arg(long)]
    n: Option<i64>,
    /// Type II locus `{hom(F, E) >= nu}`.
    #[arg(long, requires = "nu", conflicts_with = "r")]
    type2: bool,
    #[arg(long)]
    nu: Option<i64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct CastelnuovoArgs {
    #[arg(long)]
    g: i64,
    #[arg(long)]
    r: i64,
    #[arg(long)]
    d: i64,
}

#[derive(Args)]
struct CalibrateArgs {
    /// JSON array of targets; defaults to the genus 3 point count and the genus 4 value 6.
    #[arg(long)]
    targets: Option<PathBuf>,
    /// JSON array of held-out targets; defaults to the genus 5 and 6 values and two type III degrees.
    #[arg(long)]
    held_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    json: bool,
}

enum Failure {
    Usage(anyhow::Error),
    Checks,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

type CmdResult = Result<(), Failure>;

fn parse_range(s: &str) -> Result<RangeInclusive<i64>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: i64 = a.trim().parse().map_err(|e| format!("bad range start: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("bad range end: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok(a..=b)
}

fn max_g() -> anyhow::Result<i64> {
    match std::env::var("DEGCALC_MAX_G") {
        Ok(v) => v.trim().parse().with_context(|| format!("DEGCALC_MAX_G={v:?} is not an integer")),
        Err(_) => Ok(DEFAULT_MAX_G),
    }
}

fn check_genus(g: i64) -> anyhow::Result<()> {
    let cap = max_g()?;
    if g < 2 || g > cap {
        bail!("genus {g} out of range 2..={cap} (set DEGCALC_MAX_G to raise the cap)");
    }
    Ok(())
}

fn monomial_text(h: u32, a: u32, b: u32, c: u32) -> String {
    let parts: Vec<String> = [("h", h), ("a", a), ("b", b), ("c", c)]
        .iter()
        .filter(|(_, e)| *e > 0)
        .map(|(n, e)| if *e == 1 { n.to_string() } else { format!("{n}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn print_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_pairs(args: PairsArgs) -> CmdResult {
    check_genus(args.g)?;
    let conv = args.conv.build();
    let rows: Vec<PairingRecord> = pairing_table(args.g, args.hecke, &conv).map_err(anyhow::Error::from)?;
    match args.format {
        Format::Json => print_json(&rows)?,
        Format::Csv => print_csv(
            &["g", "H", "a", "b", "c", "value"],
            rows.iter().map(|r| {
                let m = r.monomial;
                vec![r.g.to_string(), m.h.to_string(), m.a.to_string(), m.b.to_string(), m.c.to_string(), r.value.to_string()]
            }),
        )?,
        Format::Text => {
            let mut out = io::stdout().lock();
            for r in &rows {
                let m = r.monomial;
                writeln!(out, "({}) = {}", monomial_text(m.h, m.a, m.b, m.c), r.value).map_err(anyhow::Error::from)?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DegreeRow {
    g: i64,
    degree: ExactRational,
    provenance: String,
}

fn cmd_degrees(args: DegreesArgs) -> CmdResult {
    for g in args.g_range.clone() {
        check_genus(g)?;
    }
    let conv = args.conv.build();
    let factor = match conv.factor {
        PairingFactor::PowQ => "pow-q",
        PairingFactor::PowG => "pow-g",
    };
    let even_provenance = |class: &str| {
        format!(
            "{class}; divisor {}; fiber factor {}; {factor}",
            conv.even_degree.divisor, conv.even_degree.fiber_factor
        )
    };
    let mut rows = Vec::new();
    match (args.family, args.nu, args.n) {
        (2, Some(3), None) => {
            let class = classes::type2_class(3, Type2Context::OddModuli).map_err(anyhow::Error::from)?;
            for g in args.g_range {
                let degree = evaluate_degree(&class, g, &conv).map_err(anyhow::Error::from)?;
                rows.push(DegreeRow { g, degree, provenance: format!("odd moduli space; pipeline class; {factor}") });
            }
        }
        (2, Some(4), None) => {
            let variant = Nu4Variant::from(args.variant);
            for g in args.g_range {
                let degree = even_locus_degree(EvenLocus::Type2Nu4, g, variant, &conv).map_err(anyhow::Error::from)?;
                rows.push(DegreeRow { g, degree, provenance: even_provenance(&format!("{} class", variant.label())) });
            }
        }
        (3, None, Some(n)) if n <= 2 => {
            for g in args.g_range {
                let degree = even_locus_degree(EvenLocus::Type3 { n }, g, Nu4Variant::Tabulated, &conv)
                    .map_err(anyhow::Error::from)?;
                rows.push(DegreeRow { g, degree, provenance: even_provenance("tabulated class") });
            }
        }
        (2, Some(nu), None) => return Err(anyhow!("unsupported index: type 2 with nu = {nu}; supported: 3, 4").into()),
        (3, None, Some(n)) => return Err(anyhow!("unsupported index: type 3 with n = {n}; supported: 0, 1, 2").into()),
        (2, _, _) => return Err(anyhow!("type 2 needs --nu (and no --n)").into()),
        _ => return Err(anyhow!("type 3 needs --n (and no --nu)").into()),
    }
    match args.format {
        Format::Json => print_json(&rows)?,
        Format::Csv => print_csv(
            &["g", "degree", "provenance"],
            rows.iter().map(|r| vec![r.g.to_string(), r.degree.to_string(), r.provenance.clone()]),
        )?,
        Format::Text => {
            let mut out = io::stdout().lock();
            for r in &rows {
                writeln!(out, "g={}\t{}\t({})", r.g, r.degree, r.provenance).map_err(anyhow::Error::from)?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct BnRecord {
    g: i64,
    locus: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<ExactRational>,
    expected_codim: i64,
    expected_dim: Option<i64>,
}

fn cmd_bn(args: BnArgs) -> CmdResult {
    check_genus(args.g)?;
    let g = args.g;
    let (kind, locus) = match (args.r, args.d, args.type3, args.type2) {
        (Some(r), Some(d), false, false) => (LocusKind::Classic { r, d }, format!("W^{r}_{d}")),
        (None, None, true, false) => {
            let n = args.n.expect("clap requires n");
            (LocusKind::TypeIII { n }, format!("h^0(E) >= {}", n + 2))
        }
        (None, None, false, true) => {
            let nu = args.nu.expect("clap requires nu");
            (LocusKind::TypeII { nu }, format!("hom(F, E) >= {nu}"))
        }
        _ => return Err(anyhow!("give --r and --d, or --type3 --n, or --type2 --nu").into()),
    };
    let spec = LocusSpec::new(kind, g).map_err(anyhow::Error::from)?;
    let (rho, lambda) = match kind {
        LocusKind::Classic { r, d } => (Some(brill_noether_rho(g, r, d)), lambda_coeff(r, d, g).ok()),
        _ => (None, None),
    };
    let rec = BnRecord { g, locus, rho, lambda, expected_codim: expected_codim(&spec), expected_dim: expected_dim(&spec) };
    match args.format {
        Format::Json => print_json(&rec)?,
        Format::Csv => print_csv(
            &["g", "locus", "rho", "lambda", "expected_codim", "expected_dim"],
            [vec![
                rec.g.to_string(),
                rec.locus.clone(),
                rec.rho.map(|v| v.to_string()).unwrap_or_default(),
                rec.lambda.as_ref().map(ToString::to_string).unwrap_or_default(),
                rec.expected_codim.to_string(),
                rec.expected_dim.map(|v| v.to_string()).unwrap_or_default(),
            ]],
        )?,
        Format::Text => {
            let mut out = io::stdout().lock();
            let mut w = |k: &str, v: String| writeln!(out, "{k} = {v}").map_err(anyhow::Error::from);
            w("locus", rec.locus.clone())?;
            if let Some(rho) = rec.rho {
                w("rho", rho.to_string())?;
            }
            if let Some(l) = &rec.lambda {
                w("lambda", l.to_string())?;
            }
            w("expected codim", rec.expected_codim.to_string())?;
            if let Some(d) = rec.expected_dim {
                w("expected dim", d.to_string())?;
            }
        }
    }
    Ok(())
}

fn cmd_castelnuovo(args: CastelnuovoArgs) -> CmdResult {
    check_genus(args.g)?;
    let count = castelnuovo_count(args.r, args.d, args.g).map_err(anyhow::Error::from)?;
    writeln!(io::stdout().lock(), "{count}").map_err(anyhow::Error::from)?;
    Ok(())
}

fn read_targets(path: &PathBuf) -> anyhow::Result<Vec<CalibrationTarget>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing targets in {}", path.display()))
}

fn print_calibration(report: &CalibrationReport) -> io::Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "searched {} configurations", report.candidates_searched)?;
    writeln!(out, "targets:")?;
    for t in &report.targets {
        writeln!(out, "  {} g={} = {}", t.locus, t.g, t.expected)?;
    }
    writeln!(out, "solutions: {}", report.solutions.len())?;
    for s in &report.solutions {
        writeln!(out, "  {}", s.config)?;
        for h in &s.held_out {
            let computed = h.computed.as_ref().map_or_else(|| "error".to_string(), ToString::to_string);
            let mark = if h.ok { "ok" } else { "MISMATCH" };
            writeln!(out, "    held out {} g={}: expected {} computed {} {}", h.target.locus, h.target.g, h.target.expected, computed, mark)?;
        }
    }
    let surviving: Vec<&str> = report.surviving_variants.iter().map(|v| v.label()).collect();
    writeln!(out, "surviving nu = 4 class: {}", surviving.join(", "))?;
    writeln!(out, "free parameters remaining: {}", if report.determined { "none" } else { "yes" })?;
    Ok(())
}

fn cmd_calibrate(args: CalibrateArgs) -> CmdResult {
    let targets = match &args.targets {
        Some(p) => read_targets(p)?,
        None => default_calibration_targets(),
    };
    let held_out = match &args.held_out {
        Some(p) => read_targets(p)?,
        None => default_held_out_targets(),
    };
    for t in targets.iter().chain(&held_out) {
        check_genus(t.g)?;
    }
    match calibrate_even_convention(&targets, &held_out, &PairingConvention::default()) {
        Ok(report) => {
            match args.format {
                Format::Json => print_json(&report)?,
                _ => print_calibration(&report).map_err(anyhow::Error::from)?,
            }
            if report.all_held_out_ok() && report.determined {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Err(IntersectError::NoConfiguration(near)) => {
            match args.format {
                Format::Json => print_json(&serde_json::json!({ "solutions": [], "near_misses": near }))?,
                _ => {
                    let mut out = io::stdout().lock();
                    writeln!(out, "no configuration reproduces all targets; closest candidates:").map_err(anyhow::Error::from)?;
                    for c in &near {
                        writeln!(out, "  {c}").map_err(anyhow::Error::from)?;
                    }
                }
            }
            Err(Failure::Checks)
        }
        Err(e) => Err(anyhow::Error::from(e).into()),
    }
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    let entries: Vec<ReportEntry> = verify::run_all();
    if args.json {
        print_json(&entries)?;
    } else {
        let mut out = io::stdout().lock();
        for e in &entries {
            writeln!(out, "{:<24} {}", e.status.label(), e.check_name).map_err(anyhow::Error::from)?;
            if e.status != Status::Pass {
                writeln!(out, "    {}\n    expected: {}\n    computed: {}", e.paper_anchor, e.expected, e.computed)
                    .map_err(anyhow::Error::from)?;
            }
        }
        let count = |s: Status| entries.iter().filter(|e| e.status == s).count();
        writeln!(
            out,
            "{} pass, {} fail, {} documented-discrepancy",
            count(Status::Pass),
            count(Status::Fail),
            count(Status::DocumentedDiscrepancy)
        )
        .map_err(anyhow::Error::from)?;
    }
    if entries.iter().any(|e| e.status == Status::Fail) {
        Err(Failure::Checks)
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Pairs(a) => cmd_pairs(a),
        Command::Degrees(a) => cmd_degrees(a),
        Command::Bn(a) => cmd_bn(a),
        Command::Castelnuovo(a) => cmd_castelnuovo(a),
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
