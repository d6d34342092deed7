//! Command-line front end: configuration parsing and execution.
//!
//! Precedence for every setting is command-line flag, then config file
//! (flat `key = value` lines), then `SPARSE_RISK_OUT` for the output
//! directory, then the built-in defaults.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;

use crate::datagen::{equidistant_grid, DesignSpec, ParameterPath};
use crate::error::{Error, Result};
use crate::estimators::{Estimator, EstimatorConfig, LambdaChoice, ScadSolver, SolverOptions};
use crate::experiments::{
    benchmark_design, hodges_max_risk, hodges_risk_curve, lower_bound_diagnostic, run_setup, theta0,
    worst_case_curve, SetupDef, SetupId, SetupOverrides, AR_RHO, DEFAULT_GAMMA_POINTS, DEFAULT_REPLICATIONS,
    DEFAULT_SEED, ETA_I, SAMPLE_SIZES,
};
use crate::oracle;
use crate::penalties::DEFAULT_A;
use crate::risk::{run_sweep, FigureMeasure, RiskReport};
use crate::tuning::{LambdaRule, LambdaScale};

pub const OUT_ENV: &str = "SPARSE_RISK_OUT";
const DEFAULT_OUT: &str = "sparse-risk-out";

#[derive(Debug, Parser)]
#[command(name = "sparse-risk", version, about = "Worst-case risk of sparse estimators by Monte Carlo")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Args, Default)]
struct Flags {
    /// Flat key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Setup id I..VI
    #[arg(long, global = true)]
    setup: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo replications per cell
    #[arg(long, global = true, allow_negative_numbers = true)]
    reps: Option<i64>,
    /// Comma-separated sample sizes
    #[arg(long, global = true, alias = "n")]
    n_list: Option<String>,
    #[arg(long, global = true)]
    gamma_points: Option<usize>,
    /// Worker threads; results do not depend on this
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (falls back to SPARSE_RISK_OUT)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated estimators: scad-lqa, scad-cd, hard, bic, ls
    #[arg(long, global = true)]
    estimators: Option<String>,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Sweep one of the six predefined setups
    Setup {
        id: Option<String>,
    },
    /// Same as `setup`, taking the id from --setup
    Run,
    /// Sweep a custom direction (keys eta, gamma_max, lambda_scale)
    Sweep,
    /// Scaled risk curve of Hodges' estimator
    Hodges,
    /// Compare the SCAD thresholding rule and solvers with brute force
    OracleCheck,
    /// P(theta_hat = 0) lower bound at theta = -s/sqrt(n)
    LowerBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Setup,
    Sweep,
    Hodges,
    OracleCheck,
    LowerBound,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub setup_id: SetupId,
    pub seed: u64,
    pub replications: usize,
    pub n_list: Vec<usize>,
    pub gamma_points: usize,
    pub threads: Option<usize>,
    pub output_dir: PathBuf,
    /// Estimator names as given; resolved per setup at execution.
    pub estimators: Vec<String>,
    /// Custom sweep direction.
    pub eta: Vec<f64>,
    pub gamma_max: f64,
    pub lambda_scale: LambdaScale,
    pub mu_max: f64,
    pub mu_points: usize,
    /// Lower-bound diagnostic: magnitude and coordinate of `s`.
    pub s_magnitude: f64,
    pub s_index: usize,
}

impl RunConfig {
    fn defaults(command: Command) -> Self {
        let n_list = match command {
            Command::Hodges => vec![100, 10_000],
            Command::LowerBound => vec![60, 240, 960],
            _ => SAMPLE_SIZES.to_vec(),
        };
        Self {
            command,
            setup_id: SetupId::I,
            seed: DEFAULT_SEED,
            replications: DEFAULT_REPLICATIONS,
            n_list,
            gamma_points: DEFAULT_GAMMA_POINTS,
            threads: None,
            output_dir: PathBuf::from(DEFAULT_OUT),
            estimators: vec!["scad-lqa".into(), "ls".into()],
            eta: ETA_I.to_vec(),
            gamma_max: 8.0,
            lambda_scale: LambdaScale::LogRatio,
            mu_max: 3.0,
            mu_points: 601,
            s_magnitude: 5.0,
            s_index: 2,
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn parse_list<T: FromStr>(key: &str, s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|v| v.trim())
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<T>().map_err(|_| usage(format!("bad value {v:?} in {key}"))))
        .collect()
}

fn parse_one<T: FromStr>(key: &str, s: &str) -> Result<T> {
    s.trim().parse::<T>().map_err(|_| usage(format!("bad value {s:?} for {key}")))
}

fn parse_scale(s: &str) -> Result<LambdaScale> {
    match s.trim().to_ascii_lowercase().as_str() {
        "log" | "logratio" => Ok(LambdaScale::LogRatio),
        "pow10" => Ok(LambdaScale::Pow10),
        "pow4" => Ok(LambdaScale::Pow4),
        "unit" | "1" => Ok(LambdaScale::Unit),
        other => Err(usage(format!("unknown lambda scale {other:?}; use log, pow10, pow4 or unit"))),
    }
}

/// Reads a flat `key = value` file. `#` starts a comment line.
pub fn read_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

fn apply(cfg: &mut RunConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "setup" => cfg.setup_id = value.parse()?,
        "seed" => cfg.seed = parse_one(key, value)?,
        "reps" | "replications" | "r" => cfg.replications = parse_reps(parse_one(key, value)?)?,
        "n_list" | "n" => cfg.n_list = parse_list(key, value)?,
        "gamma_points" => cfg.gamma_points = parse_one(key, value)?,
        "threads" => cfg.threads = Some(parse_one(key, value)?),
        "out" | "output_dir" => cfg.output_dir = PathBuf::from(value),
        "estimators" => cfg.estimators = parse_list(key, value)?,
        "eta" => cfg.eta = parse_list(key, value)?,
        "gamma_max" => cfg.gamma_max = parse_one(key, value)?,
        "lambda_scale" => cfg.lambda_scale = parse_scale(value)?,
        "mu_max" => cfg.mu_max = parse_one(key, value)?,
        "mu_points" => cfg.mu_points = parse_one(key, value)?,
        "s_magnitude" => cfg.s_magnitude = parse_one(key, value)?,
        "s_index" => cfg.s_index = parse_one(key, value)?,
        other => return Err(usage(format!("unknown config key {other:?}"))),
    }
    Ok(())
}

fn parse_reps(r: i64) -> Result<usize> {
    if r <= 0 {
        Err(usage(format!("replications must be positive, got {r}")))
    } else {
        Ok(r as usize)
    }
}

/// Parses arguments (including the program name) into a validated config.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| usage(e.to_string()))?;
    let command = match cli.command {
        CliCommand::Setup { .. } | CliCommand::Run => Command::Setup,
        CliCommand::Sweep => Command::Sweep,
        CliCommand::Hodges => Command::Hodges,
        CliCommand::OracleCheck => Command::OracleCheck,
        CliCommand::LowerBound => Command::LowerBound,
    };
    let mut cfg = RunConfig::defaults(command);
    let f = cli.flags;

    let file = match &f.config {
        Some(path) => read_config_file(path)?,
        None => HashMap::new(),
    };
    let mut keys: Vec<&String> = file.keys().collect();
    keys.sort();
    for key in keys {
        apply(&mut cfg, key, &file[key])?;
    }
    if f.out.is_none() && !file.contains_key("out") && !file.contains_key("output_dir") {
        if let Ok(dir) = std::env::var(OUT_ENV) {
            if !dir.is_empty() {
                cfg.output_dir = PathBuf::from(dir);
            }
        }
    }

    if let CliCommand::Setup { id: Some(id) } = &cli.command {
        cfg.setup_id = id.parse()?;
    }
    if let Some(s) = &f.setup {
        cfg.setup_id = s.parse()?;
    }
    if let Some(v) = f.seed {
        cfg.seed = v;
    }
    if let Some(v) = f.reps {
        cfg.replications = parse_reps(v)?;
    }
    if let Some(v) = &f.n_list {
        cfg.n_list = parse_list("n-list", v)?;
    }
    if let Some(v) = f.gamma_points {
        cfg.gamma_points = v;
    }
    if let Some(v) = f.threads {
        cfg.threads = Some(v);
    }
    if let Some(v) = f.out {
        cfg.output_dir = v;
    }
    if let Some(v) = &f.estimators {
        cfg.estimators = parse_list("estimators", v)?;
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    if cfg.n_list.is_empty() || cfg.n_list.contains(&0) {
        return Err(usage("n-list must contain positive sample sizes"));
    }
    if matches!(cfg.command, Command::Setup | Command::Sweep | Command::LowerBound)
        && cfg.n_list.iter().any(|&n| n <= 9)
    {
        return Err(usage("regression sweeps need every n > 9"));
    }
    if cfg.gamma_points == 0 || cfg.mu_points == 0 {
        return Err(usage("grid sizes must be positive"));
    }
    if cfg.threads == Some(0) {
        return Err(usage("threads must be positive"));
    }
    if cfg.eta.len() != 8 {
        return Err(usage(format!("eta needs 8 entries, got {}", cfg.eta.len())));
    }
    if cfg.s_index >= 8 {
        return Err(usage("s_index must be below 8"));
    }
    for name in &cfg.estimators {
        estimator_from_name(name, &LambdaRule::with_scale(LambdaScale::Unit))?;
    }
    Ok(())
}

/// Resolves an estimator name; SCAD variants use GCV over `rule`'s grid.
pub fn estimator_from_name(name: &str, rule: &LambdaRule) -> Result<EstimatorConfig> {
    let scad = |solver| EstimatorConfig::Scad {
        a: DEFAULT_A,
        solver,
        lambda: LambdaChoice::Gcv(rule.clone()),
        options: SolverOptions::default(),
    };
    match name.trim().to_ascii_lowercase().as_str() {
        "scad" | "scad-lqa" | "scad2" => Ok(scad(ScadSolver::Lqa)),
        "scad-cd" => Ok(scad(ScadSolver::CoordinateDescent)),
        "hard" | "hard-threshold" => Ok(EstimatorConfig::hard_threshold()),
        "bic" => Ok(EstimatorConfig::BicSelect),
        "ls" => Ok(EstimatorConfig::LeastSquares),
        other => Err(usage(format!("unknown estimator {other:?}"))),
    }
}

fn resolve_estimators(cfg: &RunConfig, rule: &LambdaRule) -> Result<Vec<EstimatorConfig>> {
    let mut list: Vec<EstimatorConfig> = cfg
        .estimators
        .iter()
        .map(|n| estimator_from_name(n, rule))
        .collect::<Result<_>>()?;
    if !list.contains(&EstimatorConfig::LeastSquares) {
        list.push(EstimatorConfig::LeastSquares);
    }
    Ok(list)
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
    /// False when a check failed or too many replications failed.
    pub success: bool,
}

fn header_line(cfg: &RunConfig) -> String {
    format!(
        "# sparse-risk {} seed={} R={}\n",
        env!("CARGO_PKG_VERSION"),
        cfg.seed,
        cfg.replications
    )
}

fn write(dir: &Path, name: &str, contents: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    crate::risk::write_file_checked(&path, contents)?;
    files.push(path);
    Ok(())
}

/// Runs `cfg` on a pool of `cfg.threads` workers.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::io(&cfg.output_dir, e))?;
    pool.install(|| match cfg.command {
        Command::Setup => execute_setup(cfg),
        Command::Sweep => execute_sweep(cfg),
        Command::Hodges => execute_hodges(cfg),
        Command::OracleCheck => execute_oracle(cfg),
        Command::LowerBound => execute_lower_bound(cfg),
    })
}

fn summarize(report: &RiskReport, title: &str) -> Result<String> {
    let mut out = format!("{title}\n");
    let mut names: Vec<String> = report.rows.iter().map(|r| r.estimator.clone()).collect();
    names.dedup();
    names.sort();
    names.dedup();
    for name in names.iter().filter(|n| *n != "ls") {
        let _ = writeln!(out, "  {name}: worst-case median relative model error");
        let _ = writeln!(out, "  {:>6}  {:>10}  {:>8}  {:>8}", "n", "max", "se", "gamma");
        for wc in worst_case_curve(report, name, FigureMeasure::RelMedianMe)? {
            let _ = writeln!(out, "  {:>6}  {:>10.4}  {:>8.4}  {:>8.3}", wc.n, wc.max, wc.se, wc.argmax_gamma);
        }
    }
    if report.is_flagged() {
        let _ = writeln!(
            out,
            "  WARNING: {:.2}% of replications failed (limit 1%)",
            100.0 * report.failure_rate()
        );
    }
    Ok(out)
}

fn write_report(report: &RiskReport, cfg: &RunConfig, stem: &str, figure: Option<String>, files: &mut Vec<PathBuf>) -> Result<()> {
    write(&cfg.output_dir, &format!("{stem}.csv"), &report.to_csv(), files)?;
    let primary = report
        .rows
        .iter()
        .map(|r| r.estimator.as_str())
        .find(|n| *n != "ls")
        .map(str::to_string);
    if let (Some(fig), Some(est)) = (figure, primary) {
        write(&cfg.output_dir, &format!("{fig}_left.csv"), &report.figure_csv(&est, FigureMeasure::RelMedianMe), files)?;
        write(&cfg.output_dir, &format!("{fig}_right.csv"), &report.figure_csv(&est, FigureMeasure::RelMse), files)?;
    }
    Ok(())
}

fn execute_setup(cfg: &RunConfig) -> Result<Outcome> {
    let def = SetupDef::new(cfg.setup_id);
    let overrides = SetupOverrides {
        n_list: Some(cfg.n_list.clone()),
        replications: Some(cfg.replications),
        gamma_points: Some(cfg.gamma_points),
        seed: Some(cfg.seed),
        estimators: Some(resolve_estimators(cfg, &def.lambda_rule)?),
    };
    let report = run_setup(cfg.setup_id, &overrides)?;
    let mut files = Vec::new();
    let figure = cfg.setup_id.figure().map(|f| format!("fig{f}"));
    write_report(&report, cfg, &format!("setup_{}", cfg.setup_id), figure, &mut files)?;
    let summary = summarize(&report, &format!("Setup {} (R = {}, seed = {})", cfg.setup_id, cfg.replications, cfg.seed))?;
    Ok(Outcome {
        files,
        summary,
        success: !report.is_flagged(),
    })
}

fn execute_sweep(cfg: &RunConfig) -> Result<Outcome> {
    let rule = LambdaRule::with_scale(cfg.lambda_scale);
    let estimators: Vec<Box<dyn Estimator>> = resolve_estimators(cfg, &rule)?
        .into_iter()
        .map(|e| Box::new(e) as Box<dyn Estimator>)
        .collect();
    let grid = equidistant_grid(cfg.gamma_max, cfg.gamma_points)?;
    let mut report = RiskReport::empty(cfg.seed, cfg.replications);
    for &n in &cfg.n_list {
        let design = DesignSpec::gaussian_ar(n, 8, AR_RHO)?;
        let path = ParameterPath::new(theta0(), DVector::from_vec(cfg.eta.clone()), grid.clone(), n)?;
        report.extend(run_sweep(&design, &path, &estimators, cfg.replications, cfg.seed)?);
    }
    let report = report.with_setup_label("sweep");
    let mut files = Vec::new();
    write_report(&report, cfg, "sweep", Some("sweep".into()), &mut files)?;
    let summary = summarize(&report, "Custom sweep")?;
    Ok(Outcome {
        files,
        summary,
        success: !report.is_flagged(),
    })
}

fn execute_hodges(cfg: &RunConfig) -> Result<Outcome> {
    let mu: Vec<f64> = equidistant_grid(2.0 * cfg.mu_max, cfg.mu_points)?
        .into_iter()
        .map(|m| m - cfg.mu_max)
        .collect();
    let points = hodges_risk_curve(&cfg.n_list, &mu, cfg.replications.max(2), cfg.seed)?;
    let mut csv = header_line(cfg);
    csv.push_str("n,mu,risk,mc_se\n");
    for p in &points {
        let _ = writeln!(csv, "{},{:.6},{},{}", p.n, p.mu, p.risk, p.se);
    }
    let mut files = Vec::new();
    write(&cfg.output_dir, "hodges.csv", &csv, &mut files)?;
    let mut summary = String::from("Hodges estimator: maximal scaled MSE n E(theta_hat - mu)^2\n");
    let _ = writeln!(summary, "  {:>8}  {:>10}  {:>8}  {:>8}", "n", "max", "se", "mu");
    for &n in &cfg.n_list {
        if let Some(p) = hodges_max_risk(&points, n) {
            let _ = writeln!(summary, "  {:>8}  {:>10.4}  {:>8.4}  {:>8.3}", n, p.risk, p.se, p.mu);
        }
    }
    Ok(Outcome {
        files,
        summary,
        success: true,
    })
}

fn execute_oracle(cfg: &RunConfig) -> Result<Outcome> {
    let grid = oracle::closed_form_vs_grid(1000, cfg.seed)?;
    let lqa = oracle::solver_vs_closed_form(ScadSolver::Lqa, 500, cfg.seed)?;
    let cd = oracle::solver_vs_closed_form(ScadSolver::CoordinateDescent, 500, cfg.seed)?;
    let ok = grid < 1e-4 && lqa < 1e-6 && cd < 1e-6;
    let summary = format!(
        "closed form vs grid search (1000 cases): max deviation {grid:.3e} (limit 1e-4)\n\
         LQA vs closed form (500 orthonormal cases): max deviation {lqa:.3e} (limit 1e-6)\n\
         coordinate descent vs closed form (500 orthonormal cases): max deviation {cd:.3e} (limit 1e-6)\n\
         {}\n",
        if ok { "PASS" } else { "FAIL" }
    );
    let mut csv = header_line(cfg);
    csv.push_str("check,cases,max_deviation,limit\n");
    let _ = writeln!(csv, "closed_form_vs_grid,1000,{grid},1e-4");
    let _ = writeln!(csv, "lqa_vs_closed_form,500,{lqa},1e-6");
    let _ = writeln!(csv, "cd_vs_closed_form,500,{cd},1e-6");
    let mut files = Vec::new();
    write(&cfg.output_dir, "oracle_check.csv", &csv, &mut files)?;
    Ok(Outcome {
        files,
        summary,
        success: ok,
    })
}

fn execute_lower_bound(cfg: &RunConfig) -> Result<Outcome> {
    let def = SetupDef::new(cfg.setup_id);
    let scad = def.scad2();
    let s = DVector::from_fn(8, |j, _| if j == cfg.s_index { cfg.s_magnitude } else { 0.0 });
    let mut csv = header_line(cfg);
    csv.push_str("n,p_hat,bound,scaled_risk,scaled_risk_se,ls_scaled_risk,ls_scaled_risk_se\n");
    let mut summary = format!(
        "Lower bound ||s||^2 P(theta_hat = 0) at theta = -s/sqrt(n), ||s||^2 = {}\n",
        s.norm_squared()
    );
    let _ = writeln!(summary, "  {:>6}  {:>8}  {:>8}  {:>10}  {:>10}", "n", "p_hat", "bound", "risk", "ls_risk");
    for &n in &cfg.n_list {
        let design = benchmark_design(n, cfg.seed)?;
        let lb = lower_bound_diagnostic(&s, &design, scad.clone(), cfg.replications, cfg.seed)?;
        let ls = lower_bound_diagnostic(&s, &design, EstimatorConfig::LeastSquares, cfg.replications, cfg.seed)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            n, lb.p_hat, lb.bound, lb.scaled_risk, lb.scaled_risk_se, ls.scaled_risk, ls.scaled_risk_se
        );
        let _ = writeln!(
            summary,
            "  {:>6}  {:>8.4}  {:>8.3}  {:>10.3}  {:>10.3}",
            n, lb.p_hat, lb.bound, lb.scaled_risk, ls.scaled_risk
        );
    }
    let mut files = Vec::new();
    write(&cfg.output_dir, "lower_bound.csv", &csv, &mut files)?;
    Ok(Outcome {
        files,
        summary,
        success: true,
    })
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match parse_config(args) {
        Ok(cfg) => cfg,
        Err(Error::Usage(msg)) => {
            eprintln!("{msg}");
            return 2;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match execute(&cfg) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.success {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
