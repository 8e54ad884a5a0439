//! Threshold intervals, the canonical threshold degree and the colouring
//! number it induces.
//!
//! For `k ≥ 3` the interval is `I_k = (a_k − 2 ln 2 − ε_k, a_k − 1 + ε_k)` with
//! `a_k = (2k−1) ln k`. The threshold degree `d_col(k)` is the unique integer
//! in `I_k` if there is one and the midpoint otherwise.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance from a threshold below which `F(d)` is left undefined.
pub const AT_THRESHOLD_TOL: f64 = 1e-9;

/// How `ε_k` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsMode {
    /// `ε_k = k^{−0.9}`.
    Pow09,
    Zero,
    Value(f64),
}

impl EpsMode {
    pub fn eps(&self, k: usize) -> f64 {
        match *self {
            EpsMode::Pow09 => (k as f64).powf(-0.9),
            EpsMode::Zero => 0.0,
            EpsMode::Value(e) => e,
        }
    }
}

impl Default for EpsMode {
    fn default() -> Self {
        EpsMode::Pow09
    }
}

impl fmt::Display for EpsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsMode::Pow09 => write!(f, "pow09"),
            EpsMode::Zero => write!(f, "zero"),
            EpsMode::Value(e) => write!(f, "value:{e}"),
        }
    }
}

impl FromStr for EpsMode {
    type Err = Error;

    /// `pow09`, `zero` or `value:<ε>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pow09" => Ok(EpsMode::Pow09),
            "zero" => Ok(EpsMode::Zero),
            _ => {
                let v = s
                    .strip_prefix("value:")
                    .or_else(|| s.strip_prefix("value="))
                    .ok_or_else(|| Error::Parse(format!("unknown eps mode {s:?}")))?;
                let e: f64 = v
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad eps value {v:?}")))?;
                if !(e >= 0.0) || !e.is_finite() {
                    return Err(Error::Parse(format!("eps must be finite and ≥ 0, got {e}")));
                }
                Ok(EpsMode::Value(e))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Integer,
    Midpoint,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Integer => "integer",
            Method::Midpoint => "midpoint",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub k: usize,
    pub eps_k: f64,
    pub lo: f64,
    pub hi: f64,
    pub d_col: f64,
    pub integer_in_interval: Option<i64>,
    pub method: Method,
}

impl ThresholdRecord {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Integers strictly inside `(lo, hi)`.
fn integers_inside(lo: f64, hi: f64) -> i64 {
    (hi.ceil() - lo.floor() - 1.0).max(0.0) as i64
}

/// Endpoints of `I_k`.
pub fn interval(k: usize, eps_k: f64) -> (f64, f64) {
    let kf = k as f64;
    let a = (2.0 * kf - 1.0) * kf.ln();
    (a - 2.0 * std::f64::consts::LN_2 - eps_k, a - 1.0 + eps_k)
}

pub fn threshold_record(k: usize, eps_k: f64) -> Result<ThresholdRecord> {
    if k < 3 {
        return Err(Error::InvalidInput(format!("k={k}, need k ≥ 3")));
    }
    if !(eps_k >= 0.0) || !eps_k.is_finite() {
        return Err(Error::InvalidInput(format!("ε_k={eps_k}, need a finite ε_k ≥ 0")));
    }
    let (lo, hi) = interval(k, eps_k);
    let count = integers_inside(lo, hi);
    if count > 1 {
        return Err(Error::MultipleIntegers { k, count: count as usize });
    }
    let (d_col, integer_in_interval, method) = if count == 1 {
        let m = lo.floor() + 1.0;
        (m, Some(m as i64), Method::Integer)
    } else {
        ((lo + hi) / 2.0, None, Method::Midpoint)
    };
    Ok(ThresholdRecord {
        k,
        eps_k,
        lo,
        hi,
        d_col,
        integer_in_interval,
        method,
    })
}

pub fn d_col(k: usize, eps: EpsMode) -> Result<f64> {
    Ok(threshold_record(k, eps.eps(k))?.d_col)
}

/// Smallest `k₀ ≥ 3` such that every `I_k` with `k₀ ≤ k ≤ k_max` holds at
/// most one integer; `None` if even `I_{k_max}` holds two.
pub fn k0_scan(eps: EpsMode, k_max: usize) -> Option<usize> {
    let mut k0 = None;
    for k in (3..=k_max).rev() {
        let (lo, hi) = interval(k, eps.eps(k));
        if integers_inside(lo, hi) > 1 {
            break;
        }
        k0 = Some(k);
    }
    k0
}

/// The colouring number `F(d)`: the smallest `k ∈ [3, k_max]` with
/// `d < d_col(k)`, so that `d_col(k−1) ≤ d < d_col(k)`.
///
/// Degrees within [`AT_THRESHOLD_TOL`] of a scanned threshold are rejected,
/// as are degrees at or beyond `d_col(k_max)`.
pub fn coloring_number(d: f64, k_max: usize, eps: EpsMode) -> Result<usize> {
    if !d.is_finite() {
        return Err(Error::InvalidInput(format!("degree {d} is not finite")));
    }
    for k in 3..=k_max {
        let t = d_col(k, eps)?;
        if (d - t).abs() <= AT_THRESHOLD_TOL {
            return Err(Error::AtThreshold { d, k });
        }
        if d < t {
            return Ok(k);
        }
    }
    Err(Error::InvalidInput(format!(
        "d={d} is not below d_col({k_max}); raise k_max"
    )))
}

/// `k` with `d_col(k+1) − d_col(k) ≤ 2 ln k` in `[k_lo, k_hi)`.
pub fn spacing_violations(eps: EpsMode, k_lo: usize, k_hi: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    let mut prev = d_col(k_lo, eps)?;
    for k in k_lo..k_hi {
        let next = d_col(k + 1, eps)?;
        if next - prev <= 2.0 * (k as f64).ln() {
            out.push(k);
        }
        prev = next;
    }
    Ok(out)
}

/// Earlier comparison intervals: exact colourability and colourability up to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KpgwIntervals {
    /// Open interval `((2k−3) ln(k−1), (2k−2) ln(k−1))` where `χ = k`.
    pub exact: (f64, f64),
    /// Closed interval `[(2k−2) ln(k−1), (2k−1) ln k]` where `χ ∈ {k, k+1}`.
    pub pm1: (f64, f64),
}

pub fn kpgw_intervals(k: usize) -> Result<KpgwIntervals> {
    if k < 3 {
        return Err(Error::InvalidInput(format!("k={k}, need k ≥ 3")));
    }
    let kf = k as f64;
    let l = (kf - 1.0).ln();
    Ok(KpgwIntervals {
        exact: ((2.0 * kf - 3.0) * l, (2.0 * kf - 2.0) * l),
        pm1: ((2.0 * kf - 2.0) * l, (2.0 * kf - 1.0) * kf.ln()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub eps: EpsMode,
    /// From [`k0_scan`] over the table's range.
    pub k0: Option<usize>,
    pub records: Vec<ThresholdRecord>,
}

impl ThresholdTable {
    /// Below the scanned `k₀`. The asymptotic statements behind every row
    /// hold only for unspecified large `k`, so this flag is a lower bound
    /// on caution, not a guarantee for unflagged rows.
    pub fn outside_proven_regime(&self, k: usize) -> bool {
        self.k0.map_or(true, |k0| k < k0)
    }
}

pub fn threshold_table(k_lo: usize, k_hi: usize, eps: EpsMode) -> Result<ThresholdTable> {
    if k_lo < 3 || k_hi < k_lo {
        return Err(Error::InvalidInput(format!("bad k range {k_lo}..{k_hi}")));
    }
    let records = (k_lo..=k_hi)
        .map(|k| threshold_record(k, eps.eps(k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdTable {
        eps,
        k0: k0_scan(eps, k_hi),
        records,
    })
}

pub const CSV_HEADER: &str = "k,lo,hi,d_col,method";

pub fn write_threshold_csv<W: Write>(records: &[ThresholdRecord], out: &mut W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{},{},{},{},{}", r.k, r.lo, r.hi, r.d_col, r.method)?;
    }
    Ok(())
}

pub fn threshold_csv(records: &[ThresholdRecord]) -> String {
    let mut buf = Vec::new();
    write_threshold_csv(records, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}
