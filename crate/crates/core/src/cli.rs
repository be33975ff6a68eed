//! Command-line front end.
//!
//! Exit codes: 0 on success (or a certified condition, or a falsification
//! that found its witness), 1 on a falsified condition, a refused solve or a
//! fruitless falsification, 2 on malformed input.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{ConditionConfig, FredholmConfig, FunctionsConfig};
use crate::contraction::{certify_with, CheckReport, ConditionKind, ConditionSpec, CoupledMap, TupleSampler};
use crate::control::{validate, validate_phi, validate_psi, validate_theta, ClassReport, ControlFunction, FunctionClass, ValidationSettings};
use crate::error::{Error, Result};
use crate::fredholm::{solve_integral_equation_with, AssumptionSampler};
use crate::order::{Metric, OrderedVector};
use crate::solver::{diagonal_check, solve, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUSED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "coupled-fixpoint", version, about = "Coupled fixed points of mixed monotone maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the bundled scalar example end to end.
    SolveExample(SolveExampleArgs),
    /// Sample comparable tuples; exit 0 if no violation is found.
    Certify(ConditionArgs),
    /// Sample comparable tuples; exit 0 if a violation is found.
    Falsify(ConditionArgs),
    /// Solve a configured Fredholm integral equation.
    SolveFredholm(FredholmArgs),
    /// Check control functions against their classes.
    ValidateFunctions(FunctionArgs),
}

#[derive(Debug, Args)]
pub struct SolveExampleArgs {
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    /// Trace CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConditionArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = ["bhaskar", "luong", "berinde", "berinde-cor"])]
    pub condition: Option<String>,
    /// example1, linear:a,b, product, constant:c or first.
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long)]
    pub psi: Option<String>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    /// Witness record (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FredholmArgs {
    #[arg(value_name = "CONFIG")]
    pub path: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Samples per Lipschitz-type check.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Solution CSV; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FunctionArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub phi: Vec<String>,
    #[arg(long)]
    pub psi: Vec<String>,
    #[arg(long)]
    pub theta: Vec<String>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::AssumptionsUnmet { .. }
        | Error::NotLowerUpper { .. }
        | Error::NotConverged { .. }
        | Error::NotDiagonal { .. }
        | Error::InitialConditionUnsatisfied
        | Error::Diverged { .. } => EXIT_REFUSED,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli.command, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            code
        }
    }
}

pub fn run(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cmd {
        Command::SolveExample(a) => solve_example(&a, out),
        Command::Certify(a) => check_condition(&a, false, out),
        Command::Falsify(a) => check_condition(&a, true, out),
        Command::SolveFredholm(a) => solve_fredholm(&a, out),
        Command::ValidateFunctions(a) => validate_functions(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

fn print_report(out: &mut dyn Write, report: &CheckReport) -> Result<()> {
    writeln!(out, "{}", report.record().to_json()?)?;
    Ok(())
}

fn solve_example(a: &SolveExampleArgs, out: &mut dyn Write) -> Result<i32> {
    let f = CoupledMap::example1();
    let metric = Metric::AbsoluteScalar;
    let sampler = TupleSampler::default();
    let mut ok = true;

    let berinde = ConditionSpec::new(
        ConditionKind::Berinde { phi: ControlFunction::identity(), psi: ControlFunction::psi_linear(0.25) },
        metric,
    );
    let r = certify_with(&berinde, &f, a.budget, a.seed, &sampler)?;
    writeln!(out, "{}: {:?} after {} tuples", r.target.describe(), r.verdict, r.tuples_tested)?;
    ok &= r.is_certified();

    let luong = ConditionSpec::new(
        ConditionKind::Luong { phi: ControlFunction::identity(), psi: ControlFunction::psi_linear(0.25) },
        metric,
    );
    let r = certify_with(&luong, &f, a.budget, a.seed, &sampler)?;
    writeln!(out, "{}: {:?}", r.target.describe(), r.verdict)?;
    if let Some(w) = &r.witness {
        writeln!(out, "  witness x={:?} y={:?} u={:?} v={:?} lhs={} rhs={}", w.x, w.y, w.u, w.v, w.lhs, w.rhs)?;
    }
    ok &= !r.is_certified();

    for k in [0.1, 0.5, 0.9] {
        let r = certify_with(&ConditionSpec::new(ConditionKind::bhaskar(k)?, metric), &f, a.budget, a.seed, &sampler)?;
        writeln!(out, "{}: {:?}", r.target.describe(), r.verdict)?;
        ok &= !r.is_certified();
    }

    let mut cfg = SolverConfig::default().with_metric(metric);
    if let Some(t) = a.tol {
        cfg.tolerance = t;
    }
    if let Some(m) = a.max_iter {
        cfg.max_iterations = m;
    }
    let (x0, y0) = (OrderedVector::scalar(-2.0)?, OrderedVector::scalar(3.0)?);
    let (fp, trace) = solve(&f, &x0, &y0, &cfg)?;
    let diag = diagonal_check(&fp, &trace, &cfg)?;
    writeln!(
        out,
        "coupled fixed point ({:e}, {:e}) after {} iterations, residual {:e}, diagonal gap {:e}",
        fp.point.first[0],
        fp.point.second[0],
        trace.iterations(),
        fp.residual,
        diag.gap
    )?;
    ok &= diag.passed && trace.monotone_chain_ok && trace.delta_nonincreasing_ok;
    if let Some(path) = &a.out {
        write_file(path, |w| trace.write_csv(w))?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_REFUSED })
}

fn condition_config(a: &ConditionArgs) -> Result<ConditionConfig> {
    let mut c = match &a.config {
        Some(path) => ConditionConfig::from_path(path)?,
        None => ConditionConfig::default(),
    };
    let set = |slot: &mut Option<String>, v: &Option<String>| {
        if v.is_some() {
            *slot = v.clone();
        }
    };
    set(&mut c.condition, &a.condition);
    set(&mut c.map, &a.map);
    set(&mut c.phi, &a.phi);
    set(&mut c.psi, &a.psi);
    if a.k.is_some() {
        c.k = a.k;
    }
    if a.radius.is_some() {
        c.radius = a.radius;
    }
    if let Some(m) = &a.metric {
        c.metric = Some(serde_json::from_value(serde_json::Value::String(m.clone())).map_err(|_| {
            Error::Config(format!("metric: unknown metric `{m}` (sup-norm, euclidean, absolute-scalar)"))
        })?);
    }
    Ok(c)
}

fn check_condition(a: &ConditionArgs, falsify: bool, out: &mut dyn Write) -> Result<i32> {
    let c = condition_config(a)?;
    let f = c.coupled_map()?;
    let spec = c.condition_spec(f.dim())?;
    let sampler = match c.radius {
        Some(r) if r > 0.0 && r.is_finite() => TupleSampler::symmetric(r),
        Some(r) => return Err(Error::Config(format!("radius: must be positive, got {r}"))),
        None => TupleSampler::default(),
    };
    let report = certify_with(&spec, &f, a.budget, a.seed, &sampler)?;
    print_report(out, &report)?;
    if let Some(path) = &a.out {
        write_file(path, |w| {
            writeln!(w, "{}", report.record().to_json()?)?;
            Ok(())
        })?;
    }
    let found = report.witness.is_some();
    Ok(if found == falsify { EXIT_OK } else { EXIT_REFUSED })
}

fn solve_fredholm(a: &FredholmArgs, out: &mut dyn Write) -> Result<i32> {
    let path = match (&a.path, &a.config) {
        (Some(p), None) | (None, Some(p)) => p,
        (Some(_), Some(_)) => return Err(Error::Config("config: give the path once".into())),
        (None, None) => return Err(Error::Config("config: missing problem file".into())),
    };
    let mut c = FredholmConfig::from_path(path)?;
    if let Some(n) = a.grid {
        c.grid_size = n;
    }
    let problem = c.problem()?;
    let pair = c.lower_upper()?;
    let mut cfg = c.solver_config();
    if let Some(t) = a.tol {
        cfg.tolerance = t;
    }
    if let Some(m) = a.max_iter {
        cfg.max_iterations = m;
    }
    let mut sampler = AssumptionSampler { seed: a.seed, ..AssumptionSampler::default() };
    if let Some(b) = a.budget {
        sampler.samples = b;
    }
    let sol = solve_integral_equation_with(&problem, &pair, &cfg, &sampler)?;
    let r = &sol.report;
    let mut log = Vec::new();
    writeln!(log, "norm bound {} (older bound {})", r.norm_bound, r.luong_bound)?;
    writeln!(log, "converged after {} iterations, equation residual {:e}", sol.trace.iterations(), sol.residual)?;
    match &a.out {
        Some(p) => {
            write_file(p, |w| sol.write_csv(w))?;
            out.write_all(&log)?;
        }
        None => sol.write_csv(&mut *out)?,
    }
    Ok(EXIT_OK)
}

fn print_class(out: &mut dyn Write, r: &ClassReport) -> Result<()> {
    let status = if r.passed { "ok" } else { "FAILED" };
    writeln!(out, "{:?} {}: {} ({} samples)", r.class_checked, r.label, status, r.samples_used)?;
    for v in r.violations.iter().take(5) {
        writeln!(out, "  at {:e}: got {:e}, expected {}", v.input, v.observed, v.expected)?;
    }
    Ok(())
}

fn validate_functions(a: &FunctionArgs, out: &mut dyn Write) -> Result<i32> {
    let mut lists = match &a.config {
        Some(path) => FunctionsConfig::from_path(path)?,
        None => FunctionsConfig::default(),
    };
    lists.phi.extend(a.phi.iter().cloned());
    lists.psi.extend(a.psi.iter().cloned());
    lists.theta.extend(a.theta.iter().cloned());

    let settings = ValidationSettings::default();
    let mut reports = Vec::new();
    if lists.phi.is_empty() && lists.psi.is_empty() && lists.theta.is_empty() {
        for f in [ControlFunction::theta1(0.25), ControlFunction::theta2(), ControlFunction::theta3()] {
            reports.push(validate(&f, &settings));
        }
    }
    let parse = |field: &str, s: &str, class| {
        ControlFunction::builtin(s)
            .map(|f| f.with_class(class))
            .map_err(|e| Error::Config(format!("{field}: {e}")))
    };
    for s in &lists.phi {
        reports.push(validate_phi(&parse("phi", s, FunctionClass::Phi)?, &settings));
    }
    for s in &lists.psi {
        reports.push(validate_psi(&parse("psi", s, FunctionClass::Psi)?, &settings));
    }
    for s in &lists.theta {
        reports.push(validate_theta(&parse("theta", s, FunctionClass::Theta)?, &settings));
    }
    for r in &reports {
        print_class(out, r)?;
    }
    Ok(if reports.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_REFUSED })
}
