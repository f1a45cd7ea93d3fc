//! JSON-configured experiments, report files and built-in suites.

pub mod config;
pub mod report;
pub mod run;
pub mod suite;

use std::path::Path;

use thiserror::Error;

pub use config::ExperimentConfig;
pub use report::{Outcome, SeriesRow};
pub use run::run_experiment;

use crate::transfer::Status;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn eval(e: impl std::fmt::Display) -> Self {
        RunError::Eval(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 3,
            RunError::Eval(_) | RunError::Io(_) => 1,
        }
    }
}

impl From<crate::dynamics::DynamicsError> for RunError {
    fn from(e: crate::dynamics::DynamicsError) -> Self {
        RunError::Config(e.to_string())
    }
}

impl From<crate::values::ValueError> for RunError {
    fn from(e: crate::values::ValueError) -> Self {
        RunError::Config(e.to_string())
    }
}

impl From<crate::transfer::TransferError> for RunError {
    fn from(e: crate::transfer::TransferError) -> Self {
        RunError::Eval(e.to_string())
    }
}

impl From<crate::averaging::AveragingError> for RunError {
    fn from(e: crate::averaging::AveragingError) -> Self {
        RunError::Eval(e.to_string())
    }
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Pass => 0,
        Status::Inconclusive => 2,
        Status::Fail | Status::InvalidInput => 1,
    }
}

/// Environment variable that overrides the configured seed.
pub const SEED_ENV: &str = "ETL_SEED";

/// Parses and validates a config document. Errors are schema violations.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, RunError> {
    let mut cfg: ExperimentConfig =
        serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
    cfg.validate()?;
    cfg.materialize();
    Ok(cfg)
}

/// Applies `ETL_SEED` when set.
pub fn apply_seed_override(cfg: &mut ExperimentConfig, env: Option<&str>) -> Result<(), RunError> {
    if let Some(s) = env {
        cfg.seed = s
            .trim()
            .parse()
            .map_err(|_| RunError::Config(format!("{SEED_ENV} must be an unsigned integer, got {s:?}")))?;
    }
    Ok(())
}

/// Runs a config file and writes the report files into `out`. Returns the
/// process exit code.
pub fn run_file(path: &Path, out: &Path, workers: Option<usize>) -> i32 {
    match run_file_inner(path, out, workers) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("etl: {e}");
            e.exit_code()
        }
    }
}

fn run_file_inner(path: &Path, out: &Path, workers: Option<usize>) -> Result<i32, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = parse_config(&text)?;
    apply_seed_override(&mut cfg, std::env::var(SEED_ENV).ok().as_deref())?;
    let outcome = with_workers(workers, || run_experiment(&cfg))?;
    std::fs::create_dir_all(out)?;
    report::write_report(&out.join(&cfg.output.report), &cfg, &outcome)?;
    report::write_series(&out.join(&cfg.output.series), &outcome.series)?;
    println!("{}: {:?}", path.display(), outcome.status);
    for n in &outcome.notes {
        println!("  note: {n}");
    }
    Ok(exit_code(outcome.status))
}

/// Runs `f` on a dedicated pool with `n` threads, or on the global pool.
pub fn with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> Result<T, RunError> + Send,
) -> Result<T, RunError> {
    match workers {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| RunError::Config(e.to_string()))?
            .install(f),
    }
}

/// JSON schema of [`ExperimentConfig`].
pub fn schema_json() -> String {
    serde_json::to_string_pretty(&schemars::schema_for!(ExperimentConfig)).expect("schema serializes")
}
