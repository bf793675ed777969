//! `lcft`: runs the workbench experiments from TOML configs and writes CSV
//! data plus a JSON run record.
//!
//! Exit status: 0 pass, 1 tolerance failure, 2 usage error, 3 numerical error.

mod compare;
mod config;
mod experiments;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use compare::{compare_csv, compare_records, CompareTolerances};
use config::{ExperimentConfig, Kind};
use experiments::Context;
use record::RunRecord;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<lcft_core::LcftError> for CliError {
    fn from(e: lcft_core::LcftError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lcft", version, about = "Liouville CFT numerical workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for data and the run record.
    #[arg(long, global = true, default_value = "lcft-out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Multiplies every pass/fail tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tolerance_scale: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Table of DOZZ structure constants.
    Dozz,
    /// Conformal block with its per-level ledger.
    Block,
    /// Moments of the total chaos mass.
    GmcMoments,
    /// Monte Carlo correlator on the round sphere.
    Correlator,
    /// Four-point function from the spectral integral.
    Bootstrap4pt,
    /// Crossing-symmetry check between two channels.
    Crossing,
    /// Runs a config of any kind.
    Run,
    /// Compares two run records (.json) or data files (.csv).
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Relative tolerance for deterministic values.
        #[arg(long, default_value_t = 1e-12)]
        relative: f64,
        /// Allowed difference of estimates in combined standard errors.
        #[arg(long, default_value_t = 3.0)]
        sigmas: f64,
    },
}

impl Command {
    fn kind(&self) -> Option<Kind> {
        match self {
            Command::Dozz => Some(Kind::DozzTable),
            Command::Block => Some(Kind::Block),
            Command::GmcMoments => Some(Kind::GmcMoments),
            Command::Correlator => Some(Kind::Correlator),
            Command::Bootstrap4pt => Some(Kind::Bootstrap4pt),
            Command::Crossing => Some(Kind::Crossing),
            Command::Run | Command::Compare { .. } => None,
        }
    }
}

fn run_experiment(cli: &Cli) -> Result<bool, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Usage("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(k) = cli.command.kind() {
        if k != cfg.kind {
            return Err(CliError::Usage(format!("subcommand expects a {k} config, got {}", cfg.kind)));
        }
    }
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    cfg.seed = Some(seed);
    std::fs::create_dir_all(&cli.out).map_err(|e| CliError::Io(format!("{}: {e}", cli.out.display())))?;
    let ctx = Context {
        seed,
        tolerance_scale: cli.tolerance_scale,
        tolerances: cfg.tolerances.clone().unwrap_or_default(),
        out_dir: cli.out.clone(),
    };
    let start = Instant::now();
    let outcome = experiments::run(&cfg, &ctx)?;
    let passed = outcome.metrics.iter().all(|m| m.pass != Some(false));
    let rec = RunRecord {
        kind: cfg.kind,
        config_hash: cfg.hash(),
        config: cfg,
        seed,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        threads: rayon::current_num_threads(),
        tolerance_scale: cli.tolerance_scale,
        wall_time_s: start.elapsed().as_secs_f64(),
        outputs: outcome.outputs,
        metrics: outcome.metrics,
        passed,
    };
    rec.write(&cli.out.join("run_record.json"))?;
    for m in &rec.metrics {
        let verdict = match m.pass {
            Some(true) => " PASS",
            Some(false) => " FAIL",
            None => "",
        };
        match (m.stderr, m.reference) {
            (Some(se), Some(r)) => println!("{} = {} +- {} (reference {r}){verdict}", m.name, m.value, se),
            (Some(se), None) => println!("{} = {} +- {}{verdict}", m.name, m.value, se),
            (None, Some(r)) => println!("{} = {} (reference {r}){verdict}", m.name, m.value),
            (None, None) => println!("{} = {}{verdict}", m.name, m.value),
        }
    }
    println!("{}: {}", rec.kind, if passed { "PASS" } else { "FAIL" });
    Ok(passed)
}

fn run_compare(a: &PathBuf, b: &PathBuf, tol: CompareTolerances) -> Result<bool, CliError> {
    let is_csv = |p: &PathBuf| p.extension().is_some_and(|e| e == "csv");
    let report = if is_csv(a) && is_csv(b) {
        compare_csv(a, b, &tol)?
    } else {
        compare_records(&RunRecord::load(a)?, &RunRecord::load(b)?, &tol)?
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.tolerance_scale > 0.0 && cli.tolerance_scale.is_finite()) {
        eprintln!("error: --tolerance-scale must be a positive number");
        return ExitCode::from(2);
    }
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Compare { a, b, relative, sigmas } => run_compare(
            a,
            b,
            CompareTolerances { relative: relative * cli.tolerance_scale, sigmas: sigmas * cli.tolerance_scale },
        ),
        _ => run_experiment(&cli),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
