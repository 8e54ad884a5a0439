//! Sample mean, variance and a normal-approximation confidence interval.

use serde::{Deserialize, Serialize};

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub mean: f64,
    /// Unbiased sample variance; 0 for a single sample.
    pub var: f64,
    /// `mean ± Z95·sqrt(var/n)`, only with at least two samples.
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub n_samples: usize,
    /// Predicted or exact value the metric is compared against, if any.
    pub reference: Option<f64>,
}

impl Metric {
    pub fn with_reference(mut self, r: f64) -> Self {
        self.reference = Some(r);
        self
    }

    pub fn covers(&self, x: f64) -> bool {
        matches!((self.ci_lo, self.ci_hi), (Some(lo), Some(hi)) if lo <= x && x <= hi)
    }

    pub fn std_err(&self) -> f64 {
        (self.var / self.n_samples as f64).sqrt()
    }
}

pub fn summarize(name: impl Into<String>, xs: &[f64]) -> Metric {
    let n = xs.len();
    let mean = if n == 0 { f64::NAN } else { xs.iter().sum::<f64>() / n as f64 };
    let var = if n < 2 {
        0.0
    } else {
        xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
    };
    let (ci_lo, ci_hi) = if n < 2 {
        (None, None)
    } else {
        let h = Z95 * (var / n as f64).sqrt();
        (Some(mean - h), Some(mean + h))
    };
    Metric {
        name: name.into(),
        mean,
        var,
        ci_lo,
        ci_hi,
        n_samples: n,
        reference: None,
    }
}
