//! Reproducible batch studies. Every run yields a CSV table, a JSON summary
//! and a list of thresholded checks.

mod config;
mod output;
mod runners;

use std::path::Path;

use serde_json::{json, Value};

pub use config::{
    AspectPattern, Experiment, ExperimentConfig, FamilyChoice, FieldChoice, Thresholds, DEFAULT_SEED,
};
pub use output::{format_number, write_outputs, Cell, Check, RunOutcome, Table};
pub use runners::{default_commuting_fields, lemma1_field};

use crate::error::{Error, Result};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "BDM_ANISO_THREADS";

/// Worker count from `BDM_ANISO_THREADS`, or `None` for the rayon default.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::invalid(format!("{THREADS_ENV} must be a positive integer, got '{s}'"))),
        },
    }
}

/// Validate and run an experiment on a dedicated thread pool.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| runners::dispatch(config))
}

/// The JSON summary: config echo, version, results, checks and overall verdict.
pub fn summary(config: &ExperimentConfig, outcome: &RunOutcome) -> Value {
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": config.experiment,
        "config": config,
        "results": outcome.results,
        "checks": outcome.checks,
        "pass": outcome.passed(),
    })
}

/// Run and write `table.csv` and `summary.json` into `dir`.
pub fn run_to_dir(config: &ExperimentConfig, dir: &Path) -> Result<RunOutcome> {
    let outcome = run(config)?;
    write_outputs(dir, &outcome, &summary(config, &outcome))?;
    Ok(outcome)
}
