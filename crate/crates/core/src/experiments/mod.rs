/*!
Seeded, reproducible experiments over the other modules.

An experiment is described by a flat text file of `key = value` lines.
Blank lines and lines starting with `#` are ignored; keys are lower-case
identifiers and may appear once. `kind` is required; `n`, `d`, `k`,
`samples` and `seed` are common parameters and every other key is a
kind-specific knob:

```text
# three-regular cycle counts
kind = cycle-census
n = 10000
d = 3
samples = 1000
seed = 7
max_len = 3
```

Sample `i` draws from `stream_rng(seed, i)` and results are reduced in
index order, so a spec determines its report regardless of thread count.
*/

mod emit;
mod run;
mod stats;

pub use emit::{emit, parse_report, Format, RunReport, SCHEMA_VERSION};
pub use run::run_experiment;
pub use stats::{summarize, Metric, Z95};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    CycleCensus,
    ColorabilityFrequency,
    VacantFractions,
    CoreProfile,
    MomentVsOracle,
    OptimizeSweep,
    ThresholdTable,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::CycleCensus,
        Kind::ColorabilityFrequency,
        Kind::VacantFractions,
        Kind::CoreProfile,
        Kind::MomentVsOracle,
        Kind::OptimizeSweep,
        Kind::ThresholdTable,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Kind::CycleCensus => "cycle-census",
            Kind::ColorabilityFrequency => "colorability-frequency",
            Kind::VacantFractions => "vacant-fractions",
            Kind::CoreProfile => "core-profile",
            Kind::MomentVsOracle => "moment-vs-oracle",
            Kind::OptimizeSweep => "optimize-sweep",
            Kind::ThresholdTable => "threshold-table",
        }
    }

    /// Common parameters the kind cannot do without.
    fn required(&self) -> &'static [&'static str] {
        match self {
            Kind::CycleCensus => &["n", "d"],
            Kind::ColorabilityFrequency
            | Kind::VacantFractions
            | Kind::CoreProfile
            | Kind::MomentVsOracle => &["n", "d", "k"],
            Kind::OptimizeSweep => &["k"],
            Kind::ThresholdTable => &[],
        }
    }

    fn knobs(&self) -> &'static [&'static str] {
        match self {
            Kind::CycleCensus => &["max_len"],
            Kind::ColorabilityFrequency => &["oracle"],
            Kind::VacantFractions => &[],
            Kind::CoreProfile => &["ell", "mode"],
            Kind::MomentVsOracle => &[],
            Kind::OptimizeSweep => &["d_lo", "d_hi", "d_steps", "restarts", "region", "kappa", "eta", "s"],
            Kind::ThresholdTable => &["k_lo", "k_hi", "eps"],
        }
    }

    fn samples_graphs(&self) -> bool {
        !matches!(self, Kind::OptimizeSweep | Kind::ThresholdTable)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown experiment kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: Kind,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub k: Option<usize>,
    pub samples: usize,
    pub seed: u64,
    pub knobs: BTreeMap<String, String>,
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Parse(format!("{key} = {v:?} is not a valid number")))
}

impl ExperimentSpec {
    pub fn new(kind: Kind) -> Self {
        ExperimentSpec {
            kind,
            n: None,
            d: None,
            k: None,
            samples: 1,
            seed: 0,
            knobs: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Result<Self> {
        self.set(key, &value.to_string())?;
        Ok(self)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "kind" => self.kind = value.parse()?,
            "n" => self.n = Some(parse_num(key, value)?),
            "d" => self.d = Some(parse_num(key, value)?),
            "k" => self.k = Some(parse_num(key, value)?),
            "samples" => self.samples = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            _ => {
                if !self.kind.knobs().contains(&key) {
                    return Err(Error::Parse(format!(
                        "unknown key {key:?} for {}; knobs are {:?}",
                        self.kind,
                        self.kind.knobs()
                    )));
                }
                self.knobs.insert(key.to_string(), value.to_string());
            }
        }
        Ok(())
    }

    /// Parses the flat `key = value` format and validates the result.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", no + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
                return Err(Error::Parse(format!("line {}: bad key {key:?}", no + 1)));
            }
            if pairs.iter().any(|(k, _)| *k == key) {
                return Err(Error::Parse(format!("line {}: duplicate key {key:?}", no + 1)));
            }
            pairs.push((key, value));
        }
        let kind = pairs
            .iter()
            .find(|(k, _)| *k == "kind")
            .ok_or_else(|| Error::Parse("missing key \"kind\"".into()))?
            .1
            .parse()?;
        let mut spec = ExperimentSpec::new(kind);
        for (k, v) in pairs.into_iter().filter(|(k, _)| *k != "kind") {
            spec.set(k, v)?;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidInput("samples must be at least 1".into()));
        }
        for key in self.kind.required() {
            let present = match *key {
                "n" => self.n.is_some(),
                "d" => self.d.is_some(),
                "k" => self.k.is_some(),
                _ => unreachable!(),
            };
            if !present {
                return Err(Error::InvalidInput(format!("{} needs {key}", self.kind)));
            }
        }
        if self.kind.samples_graphs() {
            let (n, d) = (self.n.unwrap_or(0), self.d.unwrap_or(0));
            if n == 0 || d == 0 {
                return Err(Error::InvalidInput("n and d must be positive".into()));
            }
            if n * d % 2 == 1 {
                return Err(Error::OddCloneCount { n, d });
            }
        }
        if let Some(k) = self.k {
            if k < 2 {
                return Err(Error::InvalidInput(format!("k={k}, need k ≥ 2")));
            }
        }
        Ok(())
    }

    pub fn knob<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.knobs.get(key) {
            None => Ok(default),
            Some(v) => parse_num(key, v),
        }
    }

    pub fn knob_str<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.knobs.get(key).map_or(default, |s| s.as_str())
    }

    /// Canonical text: `kind` first, then the remaining keys sorted.
    pub fn to_text(&self) -> String {
        let mut entries: BTreeMap<&str, String> = BTreeMap::new();
        if let Some(n) = self.n {
            entries.insert("n", n.to_string());
        }
        if let Some(d) = self.d {
            entries.insert("d", d.to_string());
        }
        if let Some(k) = self.k {
            entries.insert("k", k.to_string());
        }
        entries.insert("samples", self.samples.to_string());
        entries.insert("seed", self.seed.to_string());
        for (k, v) in &self.knobs {
            entries.insert(k, v.clone());
        }
        let mut out = format!("kind = {}\n", self.kind);
        for (k, v) in entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    /// SHA-256 of the canonical text, as lower-case hex.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
