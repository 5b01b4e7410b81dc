use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Params, Suite};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "==")]
    Eq,
}

impl Relation {
    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Relation::Le => value <= threshold,
            Relation::Lt => value < threshold,
            Relation::Ge => value >= threshold,
            Relation::Gt => value > threshold,
            Relation::Eq => value == threshold,
        }
    }
}

/// One measured quantity and the bound it must satisfy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Measure {
    pub quantity: String,
    pub value: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub anchor: String,
    pub measured: Vec<Measure>,
    pub pass: bool,
}

impl Check {
    pub fn new(id: &str, description: &str, anchor: &str) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            anchor: anchor.into(),
            measured: Vec::new(),
            pass: true,
        }
    }

    pub fn bound(mut self, quantity: &str, value: f64, relation: Relation, threshold: f64) -> Self {
        let pass = relation.holds(value, threshold);
        self.pass &= pass;
        self.measured.push(Measure {
            quantity: quantity.into(),
            value,
            relation,
            threshold,
            pass,
        });
        self
    }
}

/// Columns of numbers written as a CSV file next to the report.
#[derive(Clone, Debug, PartialEq)]
pub struct Track {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Track {
    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub parameters: Params,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub wall_time_s: f64,
    #[serde(skip)]
    pub tracks: Vec<Track>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub reports: Vec<SuiteReport>,
    pub pass: bool,
    pub wall_time_s: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Path of a track file derived from the report path.
    pub fn track_path(out: &Path, suite: Suite, track: &Track) -> PathBuf {
        let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        out.with_file_name(format!("{stem}.{}.{}.csv", suite.name(), track.name))
    }

    /// Writes the report and its tracks; returns the paths written.
    pub fn write(&self, out: &Path) -> Result<Vec<PathBuf>, CliError> {
        let io = |p: &Path, e: std::io::Error| CliError::Io(format!("{}: {e}", p.display()));
        std::fs::write(out, self.to_json()).map_err(|e| io(out, e))?;
        let mut written = vec![out.to_path_buf()];
        for r in &self.reports {
            for t in &r.tracks {
                let p = Self::track_path(out, r.suite, t);
                std::fs::write(&p, t.to_csv()).map_err(|e| io(&p, e))?;
                written.push(p);
            }
        }
        Ok(written)
    }
}
