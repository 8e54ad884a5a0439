use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// Non-negative weights on a finite index set summing to at most one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidInput(format!("weight {i} is negative or not finite")));
        }
        let s: f64 = weights.iter().sum();
        if s > 1.0 + SUM_TOL {
            return Err(Error::InvalidInput(format!("weights sum to {s} > 1")));
        }
        Ok(Distribution { weights })
    }

    pub fn uniform(k: usize) -> Self {
        Distribution {
            weights: vec![1.0 / k as f64; k],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_probability(&self) -> bool {
        (self.weights.iter().sum::<f64>() - 1.0).abs() <= SUM_TOL
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(&self.weights)
    }

    /// `‖μ‖₂²`.
    pub fn norm_sq(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum()
    }
}

/// `x ln x` with `0 ln 0 = 0`.
pub fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `−Σ μ(x) ln μ(x)`.
pub fn entropy_of(weights: &[f64]) -> f64 {
    -weights.iter().map(|&w| xlogx(w)).sum::<f64>()
}

pub fn entropy(mu: &Distribution) -> f64 {
    entropy_of(mu.weights())
}

/// `Σ μ(x) ln(μ(x)/ν(x))`, with terms where `μ(x) = 0` omitted.
pub fn kl_divergence(mu: &Distribution, nu: &Distribution) -> Result<f64> {
    kl_of(mu.weights(), nu.weights())
}

pub fn kl_of(mu: &[f64], nu: &[f64]) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::DimensionMismatch(format!(
            "distributions of length {} and {}",
            mu.len(),
            nu.len()
        )));
    }
    let mut s = 0.0;
    for (i, (&a, &b)) in mu.iter().zip(nu).enumerate() {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return Err(Error::SupportViolation(i));
        }
        s += a * (a / b).ln();
    }
    Ok(s)
}

/// Binary divergence `KL(p‖q)` of Bernoulli laws.
pub fn binary_kl(p: f64, q: f64) -> f64 {
    let a = if p == 0.0 { 0.0 } else { p * (p / q).ln() };
    let b = if p == 1.0 {
        0.0
    } else {
        (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln()
    };
    a + b
}

fn open_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} = {x} must lie in (0,1)")))
    }
}

/// Exponential rate of `P[Bin(n, q) = pn]`: `−KL(p‖q)`.
pub fn binomial_ldp_rate(p: f64, q: f64) -> Result<f64> {
    open_unit("p", p)?;
    open_unit("q", q)?;
    Ok(-binary_kl(p, q))
}

/// `φ(x) = (1+x) ln(1+x) − x` for `x ≥ −1`.
pub fn chernoff_phi(x: f64) -> f64 {
    xlogx(1.0 + x) - x
}

/// Tail bounds for a binomial variable with mean `mean`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffBounds {
    /// Bound on `P[X ≥ mean + t]`.
    pub upper: f64,
    /// Bound on `P[X ≤ mean − t]`; zero once `t > mean`, where the event is empty.
    pub lower: f64,
}

pub fn chernoff_bounds(mean: f64, t: f64) -> Result<ChernoffBounds> {
    if !(mean > 0.0) || !(t > 0.0) {
        return Err(Error::InvalidInput("mean and t must be positive".into()));
    }
    let upper = (-mean * chernoff_phi(t / mean)).exp();
    let lower = if t > mean {
        0.0
    } else {
        (-mean * chernoff_phi(-t / mean)).exp()
    };
    Ok(ChernoffBounds { upper, lower })
}

/// `P[X ≥ t·mean] ≤ exp(−t·mean·ln(t/e))` for `t > 1`.
pub fn chernoff_multiplicative_upper(mean: f64, t: f64) -> Result<f64> {
    if !(mean > 0.0) || !(t > 1.0) {
        return Err(Error::InvalidInput("need mean > 0 and t > 1".into()));
    }
    Ok((-t * mean * (t.ln() - 1.0)).exp())
}
