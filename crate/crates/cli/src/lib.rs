//! Batch runner for the poslab verification suites.

pub mod config;
pub mod report;
pub mod suites;

use std::time::Instant;

use thiserror::Error;

pub use config::{Params, Suite, SuiteConfig};
pub use report::{Check, Measure, Relation, Report, SuiteReport, Track};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Run(#[from] poslab::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// Process exit code: 2 for configuration, undetermined and run errors.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

fn run_one(suite: Suite, params: &Params) -> Result<SuiteReport, CliError> {
    let start = Instant::now();
    let out = suites::run_suite(suite, params)?;
    let pass = out.checks.iter().all(|c| c.pass);
    Ok(SuiteReport {
        suite,
        parameters: params.clone(),
        checks: out.checks,
        pass,
        wall_time_s: start.elapsed().as_secs_f64(),
        tracks: out.tracks,
    })
}

/// Runs the configured suite, or every suite for [`Suite::All`].
pub fn run(cfg: &SuiteConfig) -> Result<Report, CliError> {
    cfg.params.validate()?;
    let start = Instant::now();
    let list: Vec<Suite> = if cfg.suite == Suite::All {
        Suite::ALL.to_vec()
    } else {
        vec![cfg.suite]
    };
    let reports: Vec<SuiteReport> = if cfg.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = list.iter().map(|&su| s.spawn(move || run_one(su, &cfg.params))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("suite thread panicked"))
                .collect::<Result<_, _>>()
        })?
    } else {
        list.iter().map(|&s| run_one(s, &cfg.params)).collect::<Result<_, _>>()?
    };
    let pass = reports.iter().all(|r| r.pass);
    Ok(Report {
        suite: cfg.suite,
        reports,
        pass,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// 0 when every check passed, 1 otherwise.
pub fn exit_code(report: &Report) -> i32 {
    if report.pass {
        0
    } else {
        1
    }
}
