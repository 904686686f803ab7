//! Experiment driver: reads a JSON config, runs one experiment, writes its
//! artifacts and a manifest.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::time::Instant;

use serde::Serialize;
use serde_json::{Map, Value};

pub use commands::{Assertion, Outcome};
pub use config::{Command, Cutoff, ExperimentConfig, Format, Numeric, OutputSpec, Overrides};
pub use error::{CliError, ExitStatus};
use output::{Artifacts, GridRecord};

pub const MANIFEST: &str = "manifest.json";

#[derive(Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub config: &'a ExperimentConfig,
    pub threads: usize,
    pub wall_time_s: f64,
    pub status: &'static str,
    pub exit_code: i32,
    pub error: Option<String>,
    pub assertions: Vec<Assertion>,
    pub warnings: Vec<String>,
    pub grids: Vec<GridRecord>,
    pub resolved: Map<String, Value>,
    pub artifacts: Vec<String>,
}

fn status_name(s: ExitStatus) -> &'static str {
    match s {
        ExitStatus::Passed => "passed",
        ExitStatus::AssertionFailed => "assertion_failed",
        ExitStatus::Usage => "usage_error",
        ExitStatus::NotConverged => "not_converged",
        ExitStatus::Io => "io_error",
    }
}

/// Runs `config` and writes its artifacts plus `manifest.json` into the
/// output directory.
pub fn run(config: &ExperimentConfig) -> Result<ExitStatus, CliError> {
    let started = Instant::now();
    let mut out = Artifacts::new(&config.output)?;
    let result = commands::execute(config, &mut out);
    let (status, outcome, error) = match result {
        Ok(o) => {
            let status = if o.not_converged {
                ExitStatus::NotConverged
            } else if o.assertions.iter().all(|a| a.passed) {
                ExitStatus::Passed
            } else {
                ExitStatus::AssertionFailed
            };
            (status, o, None)
        }
        Err(e) => (e.status(), Outcome::default(), Some(e.to_string())),
    };
    let manifest = Manifest {
        tool: "anisospec",
        version: env!("CARGO_PKG_VERSION"),
        command: config.command.name(),
        config_hash: config.hash(),
        seed: config.seed(),
        config,
        threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        wall_time_s: started.elapsed().as_secs_f64(),
        status: status_name(status),
        exit_code: status as i32,
        error,
        assertions: outcome.assertions,
        warnings: outcome.warnings,
        grids: outcome.grids,
        resolved: outcome.resolved,
        artifacts: out.written().to_vec(),
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest)?;
    bytes.push(b'\n');
    out.raw(MANIFEST, &bytes)?;
    Ok(status)
}
