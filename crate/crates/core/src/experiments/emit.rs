//! Run reports and their JSON and CSV encodings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::stats::Metric;
use super::ExperimentSpec;
use crate::error::{Error, Result};
use crate::threshold::{threshold_csv, ThresholdRecord};

/// Bumped whenever the JSON layout changes.
pub const SCHEMA_VERSION: u32 = 1;

pub const METRIC_CSV_HEADER: &str = "metric,mean,var,ci_lo,ci_hi,n_samples";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub spec: ExperimentSpec,
    pub spec_hash: String,
    pub metrics: Vec<Metric>,
    /// Rows of a threshold-table run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<ThresholdRecord>>,
    pub wall_time_secs: f64,
}

impl RunReport {
    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parse(format!("unknown format {s:?}, expected json or csv"))),
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

/// Encodes a report. CSV has one row per metric, except for threshold
/// tables, which use the threshold module's own layout.
pub fn emit(report: &RunReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(report).expect("reports always serialise");
            v.push(b'\n');
            v
        }
        Format::Csv => {
            if let Some(table) = &report.table {
                return threshold_csv(table).into_bytes();
            }
            let mut s = String::from(METRIC_CSV_HEADER);
            s.push('\n');
            for m in &report.metrics {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    m.name,
                    m.mean,
                    m.var,
                    opt(m.ci_lo),
                    opt(m.ci_hi),
                    m.n_samples
                ));
            }
            s.into_bytes()
        }
    }
}

pub fn parse_report(bytes: &[u8]) -> Result<RunReport> {
    let r: RunReport = serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    if r.schema_version != SCHEMA_VERSION {
        return Err(Error::Parse(format!(
            "report schema {} is not {SCHEMA_VERSION}",
            r.schema_version
        )));
    }
    Ok(r)
}
