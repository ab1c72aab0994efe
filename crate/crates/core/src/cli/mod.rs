//! The `projrk` command-line tool.
//!
//! Every artifact carries a [`RunManifest`]: JSON outputs embed it under
//! `"manifest"`, CSV outputs start with a `# manifest: {...}` comment line.
//! Exit codes: 0 success, 1 check failure, 2 usage or input error,
//! 3 nonlinear solver non-convergence.

pub mod verify;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{analyze, OrderReport};
use crate::error::{Error, Result};
use crate::exactnum::{check_precision, MpFloat, Scalar, Scheme, DEFAULT_PRECISION};
use crate::integrate::{
    defect_scan, drift_fit, integrate, lift, AnyStepper, DefectKind, DriftFit, DriftOptions, JacobianKind, Method,
    Monitored, Problem, Real, SolverConfig, Strategy, Trajectory,
};
use crate::tableau::{
    monoimplicit_tableau, symmetric_projection_tableau, ButcherTableau, CompositionCoefficients,
    midpoint_projection_tableau,
};
use crate::trees::enumerate_trees;

/// Environment variable holding the default working precision in bits.
pub const PRECISION_ENV: &str = "PROJRK_PRECISION_BITS";

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NON_CONVERGENCE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "projrk", version, about = "Runge–Kutta forms of extended phase space integrators")]
pub struct Cli {
    /// Human-readable tables instead of JSON where available.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Write the main artifact here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct a tableau and print it as JSON.
    Tableau(TableauArgs),
    /// Classical order, pseudosymplecticity and pseudosymmetry of a tableau.
    Analyze(AnalyzeArgs),
    /// Integrate a test problem and emit the trajectory as CSV.
    Integrate(IntegrateArgs),
    /// Energy or invariant drift rates over a list of step sizes.
    Drift(DriftArgs),
    /// Symplecticity or symmetry defect over a list of step sizes.
    DefectScan(DefectArgs),
    /// Rooted trees per order as JSON lines.
    Trees(TreesArgs),
    /// Rerun the published claims; exit 1 if any check fails.
    VerifyPaper(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstructionArg {
    Midpoint,
    Symmetric,
    Monoimplicit,
}

#[derive(Debug, Args, Serialize)]
pub struct TableauArgs {
    #[arg(long, value_enum)]
    pub construction: ConstructionArg,
    #[arg(long, default_value = "leapfrog2", value_parser = parse_scheme)]
    pub scheme: Scheme,
    /// Leapfrog step fractions α₁,…,α_s (rationals or decimals), overriding --scheme.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alphas: Option<Vec<String>>,
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    /// Tableau JSON file, `-` for stdin.
    #[arg(long)]
    pub tableau: PathBuf,
    #[arg(long, default_value_t = 6)]
    pub max_order: usize,
    /// Print the per-order symplecticity condition table.
    #[arg(long)]
    pub census: bool,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value = "newton")]
    pub strategy: StrategyArg,
    #[arg(long, value_enum, default_value = "fd")]
    pub jacobian: JacobianArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyArg {
    Newton,
    FixedPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JacobianArg {
    Fd,
    Ad,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let cfg = SolverConfig {
            strategy: match self.strategy {
                StrategyArg::Newton => Strategy::Newton,
                StrategyArg::FixedPoint => Strategy::FixedPoint,
            },
            tolerance: self.tol,
            max_iterations: self.max_iter,
            jacobian: match self.jacobian {
                JacobianArg::Fd => JacobianKind::FiniteDifference,
                JacobianArg::Ad => JacobianKind::ForwardSensitivity,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct StepperArgs {
    /// midpoint, midpoint-rk, symmetric, monoimplicit, or rk:FILE.json.
    #[arg(long, default_value = "midpoint")]
    pub method: String,
    #[arg(long, default_value = "leapfrog2", value_parser = parse_scheme)]
    pub scheme: Scheme,
    #[arg(long, default_value = "nonseparable")]
    pub problem: String,
    /// Initial state; defaults to the problem's own.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub z0: Option<Vec<f64>>,
    /// Working precision in bits (53 runs in f64).
    #[arg(long, env = PRECISION_ENV, default_value_t = DEFAULT_PRECISION)]
    pub precision: u32,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub stepper: StepperArgs,
    #[arg(long)]
    pub h: f64,
    #[arg(long)]
    pub steps: usize,
    /// Record every n-th step.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MonitorArg {
    Energy,
    Quadratic,
}

#[derive(Debug, Args, Serialize)]
pub struct DriftArgs {
    #[command(flatten)]
    pub stepper: StepperArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub h_list: Vec<f64>,
    /// Final time of every run.
    #[arg(long = "T", alias = "t-final")]
    pub t_final: f64,
    #[arg(long, value_enum, default_value = "energy")]
    pub monitor: MonitorArg,
    /// Fraction of [0, T] discarded before fitting.
    #[arg(long, default_value_t = 0.1)]
    pub transient: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DefectArg {
    Symplectic,
    Symmetry,
}

#[derive(Debug, Args, Serialize)]
pub struct DefectArgs {
    #[command(flatten)]
    pub stepper: StepperArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub h_list: Vec<f64>,
    #[arg(long, value_enum, default_value = "symplectic")]
    pub kind: DefectArg,
}

#[derive(Debug, Args, Serialize)]
pub struct TreesArgs {
    #[arg(long)]
    pub max: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Only run the exact-arithmetic checks.
    #[arg(long)]
    pub skip_numeric: bool,
    /// Add this exact value to A₁₁ of the monoimplicit fixture.
    #[arg(long, allow_hyphen_values = true)]
    pub perturb: Option<String>,
    #[arg(long, default_value_t = verify::VerifyOptions::default().seed)]
    pub seed: u64,
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Provenance attached to every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Value,
    /// `exact`, `f64` or `mpfr`.
    pub backend: String,
    pub precision_bits: Option<u32>,
    pub outputs: Vec<String>,
    pub version: String,
}

impl RunManifest {
    pub fn new(command: &str, parameters: impl Serialize, precision_bits: Option<u32>) -> Self {
        let backend = match precision_bits {
            None => "exact",
            Some(DEFAULT_PRECISION) => "f64",
            Some(_) => "mpfr",
        };
        RunManifest {
            command: command.to_string(),
            parameters: serde_json::to_value(parameters).unwrap_or(Value::Null),
            backend: backend.to_string(),
            precision_bits,
            outputs: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    fn with_outputs(mut self, outputs: &[&Path]) -> Self {
        self.outputs = outputs.iter().map(|p| p.display().to_string()).collect();
        self
    }

    fn csv_header(&self) -> String {
        format!("# manifest: {}\n", serde_json::to_string(self).expect("manifest serializes"))
    }
}

/// JSON object `value` with the manifest added under `"manifest"`.
fn with_manifest(value: impl Serialize, manifest: &RunManifest) -> Result<Value> {
    let mut v = serde_json::to_value(value)?;
    match &mut v {
        Value::Object(map) => {
            map.insert("manifest".into(), serde_json::to_value(manifest)?);
            Ok(v)
        }
        other => Ok(json!({ "result": other.take(), "manifest": manifest })),
    }
}

fn json_text(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Writes to `path`, or stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Sibling of the main output holding the JSON summary of a scan.
fn summary_path(output: Option<&Path>) -> Option<PathBuf> {
    output.map(|p| p.with_extension("json"))
}

fn emit_summary(output: Option<&Path>, summary: &Value) -> Result<()> {
    let text = json_text(summary)?;
    match summary_path(output) {
        Some(p) => fs::write(p, text)?,
        None => eprint!("{text}"),
    }
    Ok(())
}

pub fn build_tableau(args: &TableauArgs) -> Result<ButcherTableau> {
    let fractions: Vec<Scalar> = match &args.alphas {
        Some(list) => list.iter().map(|s| Scalar::parse(s)).collect::<Result<_>>()?,
        None => crate::exactnum::composition_alphas(args.scheme),
    };
    let given = CompositionCoefficients::new(fractions.clone());
    let alternating = Method::Monoimplicit.coefficients_from_fractions(&fractions);
    let mut tab = match args.construction {
        ConstructionArg::Midpoint => midpoint_projection_tableau(&given)?,
        ConstructionArg::Symmetric => symmetric_projection_tableau(&alternating)?,
        ConstructionArg::Monoimplicit => monoimplicit_tableau(&alternating)?,
    };
    if args.alphas.is_none() {
        if let Some(meta) = tab.meta().cloned() {
            tab = tab.with_meta(crate::tableau::TableauMeta {
                scheme: Some(args.scheme),
                ..meta
            });
        }
    }
    Ok(tab)
}

fn read_tableau(path: &Path) -> Result<ButcherTableau> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path)?
    };
    Ok(serde_json::from_str(&text)?)
}

fn cmd_tableau(cli: &Cli, args: &TableauArgs) -> Result<u8> {
    let tab = build_tableau(args)?;
    let manifest = RunManifest::new("tableau", args, None).with_outputs(&cli.output.as_deref().into_iter().collect::<Vec<_>>());
    let json = json_text(&with_manifest(&tab, &manifest)?)?;
    if cli.pretty {
        if let Some(p) = &cli.output {
            fs::write(p, &json)?;
        }
        emit(None, &tab.pretty())?;
    } else {
        emit(cli.output.as_deref(), &json)?;
    }
    Ok(EXIT_OK)
}

pub fn census_table(report: &OrderReport) -> String {
    let mut out = String::from("order  conditions  satisfied\n");
    for row in &report.census {
        let _ = writeln!(out, "{:>5}  {:>10}  {:>9}", row.order, row.conditions, row.satisfied);
    }
    out
}

fn report_table(report: &OrderReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "stages                  {}", report.stages);
    let _ = writeln!(out, "explicit                {}", report.explicit);
    let _ = writeln!(out, "symplectic              {}", report.symplectic);
    let _ = writeln!(out, "classical order         {}", report.classical_order);
    let _ = writeln!(out, "pseudosymplectic order  {}", report.pseudosymplectic_order);
    let _ = writeln!(out, "pseudosymmetry order    {}", report.pseudosymmetry_order);
    out
}

fn cmd_analyze(cli: &Cli, args: &AnalyzeArgs) -> Result<u8> {
    let tab = read_tableau(&args.tableau)?;
    let report = analyze(&tab, args.max_order)?;
    let manifest = RunManifest::new("analyze", args, None).with_outputs(&cli.output.as_deref().into_iter().collect::<Vec<_>>());
    if cli.pretty || args.census {
        let mut text = String::new();
        if cli.pretty {
            text.push_str(&report_table(&report));
        }
        if args.census {
            text.push_str(&census_table(&report));
        }
        if let Some(p) = &cli.output {
            fs::write(p, json_text(&with_manifest(&report, &manifest)?)?)?;
        }
        emit(None, &text)?;
    } else {
        emit(cli.output.as_deref(), &json_text(&with_manifest(&report, &manifest)?)?)?;
    }
    Ok(EXIT_OK)
}

/// The stepper, problem and initial state described by `args`.
pub fn build_stepper(args: &StepperArgs) -> Result<(AnyStepper, Problem, Vec<f64>)> {
    let bits = check_precision(args.precision)?;
    let solver = args.solver.config()?;
    let stepper = match args.method.strip_prefix("rk:") {
        Some(path) => AnyStepper::from_tableau(&read_tableau(Path::new(path))?, bits, solver)?,
        None => args.method.parse::<Method>()?.for_scheme(args.scheme, bits, solver)?,
    };
    let problem = Problem::by_name(&args.problem)?;
    let z0 = args.z0.clone().unwrap_or_else(|| problem.z0.clone());
    if z0.len() != problem.z0.len() {
        return Err(Error::Dimension {
            expected: problem.z0.len(),
            got: z0.len(),
        });
    }
    Ok((stepper, problem, z0))
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let dim = traj.states.first().map_or(0, Vec::len);
    let mut out = String::from("t");
    for i in 0..dim {
        let _ = write!(out, ",z{i}");
    }
    out.push_str(",energy_err,quad_err\n");
    for (k, t) in traj.times.iter().enumerate() {
        let _ = write!(out, "{t:.17e}");
        for x in &traj.states[k] {
            let _ = write!(out, ",{x:.17e}");
        }
        let cell = |v: &[f64]| v.get(k).map(|x| format!("{x:.17e}")).unwrap_or_default();
        let _ = writeln!(out, ",{},{}", cell(&traj.energy_error), cell(&traj.quadratic_error));
    }
    out
}

fn cmd_integrate(cli: &Cli, args: &IntegrateArgs) -> Result<u8> {
    let (stepper, problem, z0) = build_stepper(&args.stepper)?;
    let bits = args.stepper.precision;
    let traj = if bits == DEFAULT_PRECISION {
        integrate(&stepper, &problem, &z0, &args.h, args.steps, args.stride)?
    } else {
        let like = MpFloat::zero(bits);
        integrate(&stepper, &problem, &lift(&like, &z0), &like.cst(args.h), args.steps, args.stride)?
    };
    let manifest = RunManifest::new("integrate", args, Some(bits)).with_outputs(&cli.output.as_deref().into_iter().collect::<Vec<_>>());
    emit(cli.output.as_deref(), &(manifest.csv_header() + &trajectory_csv(&traj)))?;
    Ok(EXIT_OK)
}

pub fn drift_csv(fit: &DriftFit) -> String {
    let mut out = String::from("h,rate,floor,resolved,steps\n");
    for r in &fit.rates {
        let _ = writeln!(out, "{},{:.17e},{:.17e},{},{}", r.h, r.rate, r.floor, r.resolved, r.steps);
    }
    out
}

fn scan_outputs(cli: &Cli) -> Vec<PathBuf> {
    cli.output
        .iter()
        .cloned()
        .chain(summary_path(cli.output.as_deref()))
        .collect()
}

fn cmd_drift(cli: &Cli, args: &DriftArgs) -> Result<u8> {
    let (stepper, problem, z0) = build_stepper(&args.stepper)?;
    let opts = DriftOptions {
        t_final: args.t_final,
        precision_bits: args.stepper.precision,
        monitored: match args.monitor {
            MonitorArg::Energy => Monitored::Energy,
            MonitorArg::Quadratic => Monitored::Quadratic,
        },
        transient: args.transient,
    };
    let fit = drift_fit(&stepper, &problem, &z0, &args.h_list, &opts)?;
    let outputs = scan_outputs(cli);
    let manifest = RunManifest::new("drift", args, Some(opts.precision_bits))
        .with_outputs(&outputs.iter().map(PathBuf::as_path).collect::<Vec<_>>());
    emit(cli.output.as_deref(), &(manifest.csv_header() + &drift_csv(&fit)))?;
    if let Some(w) = &fit.warning {
        eprintln!("warning: {w}");
    }
    emit_summary(cli.output.as_deref(), &with_manifest(&fit, &manifest)?)?;
    Ok(EXIT_OK)
}

fn cmd_defect(cli: &Cli, args: &DefectArgs) -> Result<u8> {
    let (stepper, problem, z0) = build_stepper(&args.stepper)?;
    let kind = match args.kind {
        DefectArg::Symplectic => DefectKind::Symplectic,
        DefectArg::Symmetry => DefectKind::Symmetry,
    };
    let scan = defect_scan(&stepper, &problem, &z0, &args.h_list, kind, args.stepper.precision)?;
    let outputs = scan_outputs(cli);
    let manifest = RunManifest::new("defect-scan", args, Some(scan.precision_bits))
        .with_outputs(&outputs.iter().map(PathBuf::as_path).collect::<Vec<_>>());
    let mut csv = String::from("h,defect\n");
    for (h, d) in &scan.points {
        let _ = writeln!(csv, "{h},{d:.17e}");
    }
    emit(cli.output.as_deref(), &(manifest.csv_header() + &csv))?;
    emit_summary(cli.output.as_deref(), &with_manifest(&scan, &manifest)?)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct TreeLine {
    order: usize,
    count: usize,
    level_sequences: Vec<Vec<u8>>,
}

fn cmd_trees(cli: &Cli, args: &TreesArgs) -> Result<u8> {
    let table = enumerate_trees(args.max)?;
    let manifest = RunManifest::new("trees", args, None).with_outputs(&cli.output.as_deref().into_iter().collect::<Vec<_>>());
    let mut out = serde_json::to_string(&json!({ "manifest": manifest }))? + "\n";
    for order in 1..=args.max {
        let line = TreeLine {
            order,
            count: table.of_order(order).len(),
            level_sequences: table.of_order(order).iter().map(|e| e.tree.level_sequence().to_vec()).collect(),
        };
        out.push_str(&serde_json::to_string(&line)?);
        out.push('\n');
    }
    emit(cli.output.as_deref(), &out)?;
    Ok(EXIT_OK)
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> Result<u8> {
    let opts = verify::VerifyOptions {
        skip_numeric: args.skip_numeric,
        perturb: args.perturb.as_deref().map(Scalar::parse).transpose()?,
        seed: args.seed,
    };
    let report = verify::run(&opts);
    let manifest = RunManifest::new("verify-paper", args, None).with_outputs(&cli.output.as_deref().into_iter().collect::<Vec<_>>());
    if cli.pretty {
        let mut text = String::new();
        for c in &report.checks {
            let _ = writeln!(
                text,
                "{} {:<36} {:>8.2}s  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.seconds,
                c.detail
            );
        }
        emit(None, &text)?;
        if let Some(p) = &cli.output {
            fs::write(p, json_text(&with_manifest(&report, &manifest)?)?)?;
        }
    } else {
        emit(cli.output.as_deref(), &json_text(&with_manifest(&report, &manifest)?)?)?;
    }
    Ok(match &report.first_failure {
        None => EXIT_OK,
        Some(name) => {
            eprintln!("check failed: {name}");
            EXIT_CHECK_FAILED
        }
    })
}

/// Exit status for an error surfaced from a command.
pub fn exit_code(err: &Error) -> u8 {
    if err.is_non_convergence() {
        EXIT_NON_CONVERGENCE
    } else {
        EXIT_USAGE
    }
}

pub fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Tableau(a) => cmd_tableau(cli, a),
        Command::Analyze(a) => cmd_analyze(cli, a),
        Command::Integrate(a) => cmd_integrate(cli, a),
        Command::Drift(a) => cmd_drift(cli, a),
        Command::DefectScan(a) => cmd_defect(cli, a),
        Command::Trees(a) => cmd_trees(cli, a),
        Command::VerifyPaper(a) => cmd_verify(cli, a),
    }
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("projrk").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn tableau_from_alphas() {
        let cli = parse(&["tableau", "--construction", "midpoint", "--alphas", "1/5,1/2,3/10"]);
        let Command::Tableau(args) = &cli.command else { panic!() };
        let tab = build_tableau(args).unwrap();
        assert_eq!(tab.stages(), 7);
        let cli = parse(&["tableau", "--construction", "monoimplicit", "--scheme", "leapfrog2"]);
        let Command::Tableau(args) = &cli.command else { panic!() };
        let tab = build_tableau(args).unwrap();
        let fix = verify::monoimplicit_leapfrog_fixture();
        assert_eq!((tab.a(), tab.b()), (fix.a(), fix.b()));
        assert_eq!(tab.meta().unwrap().scheme, Some(Scheme::Leapfrog2));
    }

    #[test]
    fn usage_errors() {
        let bad = |args: &[&str]| Cli::try_parse_from(std::iter::once("projrk").chain(args.iter().copied())).is_err();
        assert!(bad(&["tableau", "--construction", "nope"]));
        assert!(bad(&["integrate", "--h", "0.1"]));
        assert!(bad(&["tableau", "--construction", "midpoint", "--scheme", "rk9"]));
    }

    #[test]
    fn manifests() {
        let m = RunManifest::new("drift", json!({"h": 0.1}), Some(128));
        assert_eq!(m.backend, "mpfr");
        assert!(m.csv_header().starts_with("# manifest: {"));
        let v = with_manifest(json!({"a": 1}), &m).unwrap();
        assert_eq!(v["manifest"]["precision_bits"], 128);
        let v = with_manifest(json!([1, 2]), &m).unwrap();
        assert_eq!(v["result"], json!([1, 2]));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::NonConvergence { iterations: 1, residual: 1.0 }), EXIT_NON_CONVERGENCE);
        let nested = Error::AtStep {
            step: 3,
            source: Box::new(Error::NonConvergence { iterations: 1, residual: 1.0 }),
        };
        assert_eq!(exit_code(&nested), EXIT_NON_CONVERGENCE);
        assert_eq!(exit_code(&Error::Invalid("x".into())), EXIT_USAGE);
    }

    #[test]
    fn stepper_from_flags() {
        let cli = parse(&["integrate", "--method", "symmetric", "--problem", "harmonic", "--h", "0.1", "--steps", "3"]);
        let Command::Integrate(args) = &cli.command else { panic!() };
        let (st, p, z0) = build_stepper(&args.stepper).unwrap();
        assert_eq!(st.name(), "symmetric-projection");
        assert_eq!(z0, p.z0);
        let traj = integrate(&st, &p, &z0, &0.1, 3, 1).unwrap();
        let csv = trajectory_csv(&traj);
        assert_eq!(csv.lines().next(), Some("t,z0,z1,energy_err,quad_err"));
        assert_eq!(csv.lines().count(), 5);
    }
}
