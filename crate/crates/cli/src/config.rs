use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
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

impl Suite {
    /// Every concrete suite, in report order.
    pub const ALL: [Suite; 9] = [
        Suite::CurvatureIdentities,
        Suite::QuotientThresholds,
        Suite::Schur,
        Suite::ExtensionFlat,
        Suite::DirectImage,
        Suite::DualNorm,
        Suite::Coarea,
        Suite::Obstruction,
        Suite::SplitExample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::CurvatureIdentities => "curvature-identities",
            Suite::QuotientThresholds => "quotient-thresholds",
            Suite::Schur => "schur",
            Suite::ExtensionFlat => "extension-flat",
            Suite::DirectImage => "direct-image",
            Suite::DualNorm => "dual-norm",
            Suite::Coarea => "coarea",
            Suite::Obstruction => "obstruction",
            Suite::SplitExample => "split-example",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Numeric suite parameters. Keys in a config file use the field names.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Params {
    pub seed: u64,
    /// Relative tolerance for sign checks (`≥ −tol·scale`).
    pub tol: f64,
    /// `Q = ℂ^r/𝒪(−1)` over `P^{r−1}`.
    pub r: usize,
    /// Random chart points per check, in addition to the origin.
    pub points: usize,
    pub trials: usize,
    pub degree: usize,
    pub n_r: usize,
    pub n_theta: usize,
    pub samples: usize,
    pub p: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    pub coarea_t: f64,
    pub n: usize,
    pub d_max: i64,
    pub instances: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            seed: 42,
            tol: 1e-6,
            r: 3,
            points: 5,
            trials: 200,
            degree: 12,
            n_r: 24,
            n_theta: 48,
            samples: 20,
            p: 8.0,
            t_min: -6.0,
            t_max: -1.0,
            t_points: 26,
            coarea_t: -10.0,
            n: 2,
            d_max: 5,
            instances: 50,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("cannot parse {key} = {value:?}")))
}

impl Params {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "seed" => self.seed = parse(key, value)?,
            "tol" => self.tol = parse(key, value)?,
            "r" => self.r = parse(key, value)?,
            "points" => self.points = parse(key, value)?,
            "trials" => self.trials = parse(key, value)?,
            "degree" => self.degree = parse(key, value)?,
            "n_r" => self.n_r = parse(key, value)?,
            "n_theta" => self.n_theta = parse(key, value)?,
            "samples" => self.samples = parse(key, value)?,
            "p" => self.p = parse(key, value)?,
            "t_min" => self.t_min = parse(key, value)?,
            "t_max" => self.t_max = parse(key, value)?,
            "t_points" => self.t_points = parse(key, value)?,
            "coarea_t" => self.coarea_t = parse(key, value)?,
            "n" => self.n = parse(key, value)?,
            "d_max" => self.d_max = parse(key, value)?,
            "instances" => self.instances = parse(key, value)?,
            _ => return Err(CliError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return bad("tol must be a finite non-negative number");
        }
        if self.r < 2 {
            return bad("r must be at least 2");
        }
        if self.trials == 0 || self.samples == 0 || self.instances == 0 {
            return bad("trials, samples and instances must be positive");
        }
        if self.n_r == 0 || self.n_theta == 0 || self.degree == 0 {
            return bad("degree and grid sizes must be positive");
        }
        if !(self.p > 1.0) {
            return bad("p must exceed 1");
        }
        if !(self.t_min < self.t_max && self.t_max < 0.0) || self.t_points < 3 {
            return bad("need t_min < t_max < 0 and t_points ≥ 3");
        }
        if !(self.coarea_t <= -4.0) {
            return bad("coarea_t must be at most −4");
        }
        if self.n < 2 || self.d_max < 1 {
            return bad("need n ≥ 2 and d_max ≥ 1");
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub params: Params,
    pub out: Option<PathBuf>,
    pub parallel: bool,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            params: Params::default(),
            out: None,
            parallel: false,
        }
    }
}
