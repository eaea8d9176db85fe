//! `gcb`: batch front end for linear splitting, normalization runs, the
//! Hopf-surface verification, Maurer–Cartan checks and property suites.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use gcb_core::flow::json::flow_to_json;
use gcb_core::hopf::{flip_b_component, verify_all, verify_all_with};
use gcb_core::jet::JetContext;
use gcb_core::linear_gca::json::{instance_from_json, split_and_report, InstanceError, InstanceJson};
use gcb_core::linear_gca::GcaError;
use gcb_core::normalizer::{run_normalization, NormalizationParams, NormalizeError};
use gcb_core::scalar::{from_int, ratio};
use gcb_core::suites::{run_suite, Suite};
use gcb_core::tensor::{brane_compat_check, deformation_from_json, deformation_to_json, mc_residual, BraneCompatReport, TensorJson};
use gcb_core::Rational;

type Q = Rational;

const EXIT_FAIL: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_NOT_CONVERGED: u8 = 4;

#[derive(Parser)]
#[command(name = "gcb", version, about = "Normal forms for generalized complex branes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split a linear brane and verify the splitting.
    LinearSplit(IoArgs),
    /// Run the normalization iteration on a deformation.
    Normalize(NormalizeArgs),
    /// Verify the Hopf-surface identities for c in {1, 2, 1/2}.
    HopfVerify(HopfArgs),
    /// Maurer–Cartan residual and brane compatibility of a deformation.
    McCheck(IoArgs),
    /// Run seeded property suites.
    PropTest(PropArgs),
}

#[derive(Args)]
struct IoArgs {
    #[arg(long)]
    input: PathBuf,
    /// Report path; stdout if omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct NormalizeArgs {
    #[arg(long)]
    input: PathBuf,
    /// JSON `{ "max_iterations": .., "target_order": .. }`.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Output directory for `residuals.csv`, `eps_final.json`, `flow.json`.
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    target_order: Option<u32>,
}

#[derive(Args)]
struct HopfArgs {
    #[arg(long)]
    output: Option<PathBuf>,
    /// Flip the sign of one coefficient of B, chosen by this seed.
    #[arg(long)]
    mutate_b: Option<u64>,
}

#[derive(Args)]
struct PropArgs {
    /// One suite; all suites if omitted.
    #[arg(long)]
    suite: Option<Suite>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Deserialize)]
struct ParamsJson {
    #[serde(default = "default_iterations")]
    max_iterations: usize,
    target_order: Option<u32>,
}

fn default_iterations() -> usize {
    10
}

/// A failure with its exit code.
struct Fail(u8, String);

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail(EXIT_PARSE, e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Self {
        Fail(EXIT_PARSE, e.to_string())
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), Fail> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Fail(EXIT_FAIL, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn status(ok: bool) -> Result<u8, Fail> {
    Ok(if ok { 0 } else { EXIT_FAIL })
}

fn max_degree() -> Result<Option<u32>, Fail> {
    match std::env::var("GCB_MAX_DEGREE") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Fail(EXIT_PARSE, format!("GCB_MAX_DEGREE={v:?} is not an integer"))),
        Err(_) => Ok(None),
    }
}

fn load_deformation(path: &Path) -> Result<(JetContext<Q>, gcb_core::tensor::Deformation<Q>), Fail> {
    let mut doc: TensorJson = read_json(path)?;
    if let Some(n) = max_degree()? {
        doc.order = n;
        doc.terms.retain(|t| t.z_deg.iter().chain(&t.zbar_deg).sum::<u32>() <= n);
    }
    deformation_from_json(&doc).map_err(|e| Fail(EXIT_PARSE, e.to_string()))
}

fn linear_split(args: &IoArgs) -> Result<u8, Fail> {
    let doc: InstanceJson = read_json(&args.input)?;
    let (gc, brane) = instance_from_json::<Q>(&doc).map_err(|e| match e {
        InstanceError::Parse(_) | InstanceError::Gca(GcaError::Shape(_)) => Fail(EXIT_PARSE, e.to_string()),
        InstanceError::Gca(g) => Fail(EXIT_PRECONDITION, g.to_string()),
    })?;
    let report = split_and_report(&gc, &brane).map_err(|e| Fail(EXIT_PRECONDITION, e.to_string()))?;
    emit(&report, args.output.as_deref())?;
    status(report.all_pass())
}

#[derive(Serialize)]
struct CsvRow {
    iteration: usize,
    ord_eps11_02: Option<u32>,
    norm20: String,
    norm11: String,
    norm02: String,
    mc_residual_norm: String,
    #[serde(rename = "S_preserved")]
    s_preserved: bool,
    tau_preserved: bool,
}

fn normalize(args: &NormalizeArgs) -> Result<u8, Fail> {
    let (ctx, eps) = load_deformation(&args.input)?;
    let params: Option<ParamsJson> = args.params.as_deref().map(read_json).transpose()?;
    let max_iterations = params.as_ref().map_or(default_iterations(), |p| p.max_iterations);
    let target = args.target_order.or(params.and_then(|p| p.target_order)).unwrap_or(ctx.order);
    if target > ctx.order {
        return Err(Fail(EXIT_PARSE, format!("target_order {target} exceeds N = {}", ctx.order)));
    }
    let report = run_normalization(&ctx, &eps, &NormalizationParams::new(max_iterations, target)).map_err(|e| match e {
        NormalizeError::NotIntegrable(_) | NormalizeError::BraneIncompatible(_) => Fail(EXIT_PRECONDITION, e.to_string()),
        e => Fail(EXIT_FAIL, e.to_string()),
    })?;
    fs::create_dir_all(&args.output)?;
    let mut csv = csv::Writer::from_path(args.output.join("residuals.csv")).map_err(|e| Fail(EXIT_FAIL, e.to_string()))?;
    for r in &report.records {
        csv.serialize(CsvRow {
            iteration: r.iteration,
            ord_eps11_02: r.ord_eps11_02,
            norm20: r.norm20.to_string(),
            norm11: r.norm11.to_string(),
            norm02: r.norm02.to_string(),
            mc_residual_norm: r.mc_residual_norm.to_string(),
            s_preserved: r.s_preserved,
            tau_preserved: r.tau_preserved,
        })
        .map_err(|e| Fail(EXIT_FAIL, e.to_string()))?;
    }
    csv.flush()?;
    emit(&deformation_to_json(&ctx, &report.final_eps), Some(&args.output.join("eps_final.json")))?;
    emit(&flow_to_json(&ctx, &report.flow), Some(&args.output.join("flow.json")))?;
    if !report.converged {
        return Ok(EXIT_NOT_CONVERGED);
    }
    status(report.brane_preserved())
}

fn hopf_verify(args: &HopfArgs) -> Result<u8, Fail> {
    let cs = [from_int::<Q>(1), from_int(2), ratio(1, 2)];
    let report = match args.mutate_b {
        Some(seed) => verify_all_with(&cs, &flip_b_component(seed)),
        None => verify_all(&cs),
    }
    .map_err(|e| Fail(EXIT_PRECONDITION, e.to_string()))?;
    emit(&report, args.output.as_deref())?;
    status(report.all_pass())
}

#[derive(Serialize)]
struct McPart {
    part: &'static str,
    vanishing_order: Option<u32>,
    norm: String,
}

#[derive(Serialize)]
struct McReport {
    n: usize,
    k: usize,
    #[serde(rename = "N")]
    order: u32,
    integrable: bool,
    residual: Vec<McPart>,
    brane: BraneCompatReport,
}

fn mc_check(args: &IoArgs) -> Result<u8, Fail> {
    let (ctx, eps) = load_deformation(&args.input)?;
    let res = mc_residual(&ctx, &eps);
    let residual = ["30", "21", "12", "03"]
        .iter()
        .zip(res.parts())
        .map(|(part, t)| McPart { part, vanishing_order: t.vanishing_order(), norm: t.majorant_norm(&ctx.radius).to_string() })
        .collect();
    let report = McReport { n: ctx.n, k: ctx.k, order: ctx.order, integrable: res.is_zero(), residual, brane: brane_compat_check(&ctx, &eps) };
    emit(&report, args.output.as_deref())?;
    status(report.integrable && report.brane.all_pass())
}

fn prop_test(args: &PropArgs) -> Result<u8, Fail> {
    let suites = match args.suite {
        Some(s) => vec![s],
        None => Suite::ALL.to_vec(),
    };
    let reports: Vec<_> = suites.iter().map(|s| run_suite(*s, args.seed, args.count)).collect();
    let ok = reports.iter().all(|r| r.all_pass());
    if let Some(bad) = reports.iter().find(|r| !r.all_pass()) {
        eprintln!("{} failed: {}", bad.suite, serde_json::to_string(&bad.counterexample)?);
    }
    match args.suite {
        Some(_) => emit(&reports[0], args.output.as_deref())?,
        None => emit(&reports, args.output.as_deref())?,
    }
    status(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::LinearSplit(a) => linear_split(a),
        Command::Normalize(a) => normalize(a),
        Command::HopfVerify(a) => hopf_verify(a),
        Command::McCheck(a) => mc_check(a),
        Command::PropTest(a) => prop_test(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("gcb: {msg}");
            ExitCode::from(code)
        }
    }
}
