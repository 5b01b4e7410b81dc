use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use poslab_cli::{exit_code, run, CliError, Suite, SuiteConfig};

#[derive(Parser)]
#[command(name = "poslab", version, about = "Run poslab verification suites")]
struct Cli {
    #[command(subcommand)]
    suite: SuiteArg,
    /// key = value file with suite parameters
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON report here (tracks go next to it); stdout otherwise
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Run the suites of `all` concurrently
    #[arg(long, global = true)]
    parallel: bool,
    /// Relative tolerance for sign checks
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum SuiteArg {
    CurvatureIdentities,
    QuotientThresholds,
    Schur,
    ExtensionFlat,
    DirectImage,
    DualNorm,
    Coarea,
    Obstruction,
    SplitExample,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::CurvatureIdentities => Suite::CurvatureIdentities,
            SuiteArg::QuotientThresholds => Suite::QuotientThresholds,
            SuiteArg::Schur => Suite::Schur,
            SuiteArg::ExtensionFlat => Suite::ExtensionFlat,
            SuiteArg::DirectImage => Suite::DirectImage,
            SuiteArg::DualNorm => Suite::DualNorm,
            SuiteArg::Coarea => Suite::Coarea,
            SuiteArg::Obstruction => Suite::Obstruction,
            SuiteArg::SplitExample => Suite::SplitExample,
            SuiteArg::All => Suite::All,
        }
    }
}

fn config(cli: &Cli) -> Result<SuiteConfig, CliError> {
    let mut cfg = SuiteConfig::new(cli.suite.into());
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.params.apply_text(&text)?;
    }
    if let Some(seed) = cli.seed {
        cfg.params.seed = seed;
    }
    if let Some(tol) = cli.tol {
        cfg.params.tol = tol;
    }
    cfg.params.validate()?;
    cfg.out = cli.out.clone();
    cfg.parallel = cli.parallel;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(&cli).and_then(|cfg| {
        let report = run(&cfg)?;
        match &cfg.out {
            Some(path) => {
                report.write(path)?;
            }
            None => print!("{}", report.to_json()),
        }
        Ok(report)
    });
    match result {
        Ok(report) => {
            for r in &report.reports {
                for c in &r.checks {
                    eprintln!("[{}] {}/{}", if c.pass { "PASS" } else { "FAIL" }, r.suite, c.id);
                }
            }
            ExitCode::from(exit_code(&report) as u8)
        }
        Err(e) => {
            eprintln!("poslab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
