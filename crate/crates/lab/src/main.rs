use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hilfer_lab::config::PsiName;
use hilfer_lab::{load_config, run_experiment, ExperimentConfig, LabError, RunKind};

/// Controllability and optimal-control experiments for ψ-Hilfer evolution systems.
#[derive(Parser, Debug)]
#[command(name = "hilfer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Identity and invariant suite; exits nonzero on any failure.
    Verify(Flags),
    /// Approximate-controllability ε sweep of the linear problem.
    Sweep(Flags),
    /// Quadratic-cost optimal control across λ.
    Optimal(Flags),
    /// Fixed-point ε sweep for the default inclusion.
    Inclusion(Flags),
    /// Projected random search for the state-constrained problem.
    Problem1(Flags),
}

/// Flags override config-file fields, which override defaults.
#[derive(clap::Args, Debug)]
struct Flags {
    /// JSON config; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    psi: Option<PsiName>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Command {
    fn split(self) -> (RunKind, Flags) {
        match self {
            Command::Verify(f) => (RunKind::Verify, f),
            Command::Sweep(f) => (RunKind::Sweep, f),
            Command::Optimal(f) => (RunKind::Optimal, f),
            Command::Inclusion(f) => (RunKind::Inclusion, f),
            Command::Problem1(f) => (RunKind::Problem1, f),
        }
    }
}

fn configure(run: RunKind, flags: Flags) -> Result<ExperimentConfig, LabError> {
    let mut cfg = match &flags.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.run = run;
    if let Some(alpha) = flags.alpha {
        cfg.alpha = alpha;
    }
    if let Some(psi) = flags.psi {
        cfg.psi = psi;
    }
    if let Some(out) = flags.out {
        cfg.out = out;
    }
    if let Some(seed) = flags.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HILFER_LOG", "warn")).init();
    let (run, flags) = Cli::parse().command.split();
    let result = configure(run, flags).and_then(|cfg| run_experiment(&cfg));
    match result {
        Ok(out) if out.passed => {
            println!("{}", out.dir.display());
            ExitCode::SUCCESS
        }
        Ok(out) => {
            let failed = out.report.summary.get("failed").cloned().unwrap_or_default();
            let first = failed.get(0).and_then(|v| v.as_str()).unwrap_or("unknown").to_string();
            let total = out.report.table.rows.len();
            let count = failed.as_array().map_or(0, |a| a.len());
            let err = LabError::Verify { first, failed: count, total };
            println!("{}", err.to_json());
            ExitCode::FAILURE
        }
        Err(err) => {
            println!("{}", err.to_json());
            ExitCode::FAILURE
        }
    }
}
