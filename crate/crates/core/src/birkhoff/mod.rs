/*!
The second-moment function over the Birkhoff polytope.

Derivatives live in the chart that drops entry `(k,k)` and recovers it from
the total mass `Σρ_ij = k`. Maximisation is exploratory: a multi-start
projected-gradient ascent, not a certified optimiser.
*/

mod calculus;
mod optimize;

pub use calculus::{
    chart_coords, chart_lift, f_chart, grad_energy, grad_f, hessian_f, hessian_f_at_flat,
    HessianReport,
};
pub use optimize::{in_region, maximize_f, MaximizeOptions, MaximizeResult, Region, TracePoint};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{check_doubly_stochastic, stochastic_residuals};

/// Tolerance of the doubly stochastic invariant.
pub const DS_TOL: f64 = 1e-9;

/// Overlap threshold above which an entry must already be stable.
pub const SEPARABLE_THRESHOLD: f64 = 0.51;

/// A `k×k` matrix with non-negative entries and unit row and column sums.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublyStochasticMatrix {
    m: DMatrix<f64>,
}

impl DoublyStochasticMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        check_doubly_stochastic(&m, DS_TOL)?;
        Ok(DoublyStochasticMatrix { m })
    }

    /// The flat matrix with every entry `1/k`.
    pub fn flat(k: usize) -> Self {
        DoublyStochasticMatrix {
            m: DMatrix::from_element(k, k, 1.0 / k as f64),
        }
    }

    pub fn identity(k: usize) -> Self {
        DoublyStochasticMatrix {
            m: DMatrix::identity(k, k),
        }
    }

    pub fn k(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.m
    }

    /// Entries as rows, for serialisation.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    /// Largest absolute entrywise difference.
    pub fn sup_distance(&self, other: &DMatrix<f64>) -> f64 {
        (&self.m - other).amax()
    }
}

/// Result of a Sinkhorn projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub matrix: DoublyStochasticMatrix,
    pub iterations: usize,
}

/// Alternating row and column normalisation of a positive matrix.
///
/// Stops as soon as both residuals are below `tol`; an input that already
/// satisfies this is returned unchanged with zero iterations.
pub fn project_doubly_stochastic(m: &DMatrix<f64>, tol: f64, max_iters: usize) -> Result<Projection> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::DimensionMismatch("projection needs a non-empty square matrix".into()));
    }
    if let Some(x) = m.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "projection needs positive finite entries, found {x}"
        )));
    }
    let residual = |a: &DMatrix<f64>| {
        let (r, c) = stochastic_residuals(a);
        r.max(c)
    };
    let mut a = m.clone();
    let mut res = residual(&a);
    let mut it = 0;
    while res >= tol {
        if it == max_iters {
            return Err(Error::NonConvergence {
                iterations: it,
                residual: res,
            });
        }
        for mut row in a.row_iter_mut() {
            let s = row.sum();
            row /= s;
        }
        for mut col in a.column_iter_mut() {
            let s = col.sum();
            col /= s;
        }
        it += 1;
        res = residual(&a);
    }
    Ok(Projection {
        matrix: DoublyStochasticMatrix { m: a },
        iterations: it,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilityClass {
    /// Separable with exactly `s` entries at least `1 − κ`.
    Stable(usize),
    NonSeparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub s: usize,
    pub separable: bool,
    pub class: StabilityClass,
}

/// Counts entries `≥ 1 − κ`; separable when every entry above 0.51 is one of them.
pub fn classify_stability(rho: &DoublyStochasticMatrix, kappa: f64) -> StabilityReport {
    let s = rho.m.iter().filter(|&&x| x >= 1.0 - kappa).count();
    let separable = rho
        .m
        .iter()
        .all(|&x| x <= SEPARABLE_THRESHOLD || x >= 1.0 - kappa);
    let class = if separable {
        StabilityClass::Stable(s)
    } else {
        StabilityClass::NonSeparable
    };
    StabilityReport { s, separable, class }
}
