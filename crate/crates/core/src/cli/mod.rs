//! Batch front end: one JSON config in, one JSON report out.

mod commands;
pub mod config;
pub mod report;

use std::time::Instant;

pub use config::{load, Command, Diagnostic, RunConfig};
pub use report::{config_hash, Record, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Runs a validated config. `hash` is echoed into the report.
pub fn run(config: &RunConfig, hash: String) -> Report {
    let start = Instant::now();
    let records = commands::dispatch(config);
    Report::new(config.command.name(), hash, records, start.elapsed().as_secs_f64())
}

/// Parses, validates and runs `source`.
pub fn run_source(source: &str) -> Result<Report, Vec<Diagnostic>> {
    let config = load(source)?;
    let hash = config_hash(source).map_err(|e| {
        vec![Diagnostic {
            path: String::new(),
            message: e.to_string(),
        }]
    })?;
    Ok(run(&config, hash))
}

/// Diagnostics for `source`; empty iff it is a valid config.
pub fn validate_source(source: &str) -> Vec<Diagnostic> {
    load(source).err().unwrap_or_default()
}

pub fn exit_code(report: &Report) -> i32 {
    if report.overall_pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
