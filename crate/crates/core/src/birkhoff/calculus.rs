//! Gradient and Hessian of `f` in the chart dropping entry `(k,k)`.
//!
//! A chart point `x ∈ R^{k²−1}` lists the entries `(i,j) ≠ (k,k)` row-major;
//! the lifted matrix has `ρ_kk = k − Σx`. The chart covers every matrix of
//! total mass `k`, doubly stochastic or not, so finite differences in any
//! coordinate direction stay on it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::moments::f_unchecked;

/// Chart coordinates of `ρ`: all entries but the last, row-major.
pub fn chart_coords(rho: &DMatrix<f64>) -> DVector<f64> {
    let k = rho.nrows();
    DVector::from_iterator(
        k * k - 1,
        (0..k * k - 1).map(|a| rho[(a / k, a % k)]),
    )
}

/// Inverse of [`chart_coords`] on matrices of total mass `k`.
pub fn chart_lift(x: &DVector<f64>, k: usize) -> Result<DMatrix<f64>> {
    if x.len() + 1 != k * k {
        return Err(Error::DimensionMismatch(format!(
            "chart point of length {} for k={k}",
            x.len()
        )));
    }
    let last = k as f64 - x.sum();
    Ok(DMatrix::from_fn(k, k, |i, j| {
        let a = i * k + j;
        if a + 1 == k * k {
            last
        } else {
            x[a]
        }
    }))
}

/// `f ∘ L` at a chart point.
pub fn f_chart(x: &DVector<f64>, k: usize, d: f64) -> Result<f64> {
    Ok(f_unchecked(&chart_lift(x, k)?, d))
}

fn energy_denominator(rho: &DMatrix<f64>) -> f64 {
    let k = rho.nrows() as f64;
    let sq: f64 = rho.iter().map(|x| x * x).sum();
    k * k - 2.0 * k + sq
}

// Pull back a full-coordinate gradient: ∂_a − ∂_kk.
fn pull_back(full: &DMatrix<f64>) -> DVector<f64> {
    let k = full.nrows();
    let last = full[(k - 1, k - 1)];
    DVector::from_iterator(
        k * k - 1,
        (0..k * k - 1).map(|a| full[(a / k, a % k)] - last),
    )
}

/// Chart gradient of the energy part `(d/2) ln(1 − 2/k + Σρ²/k²)` alone.
///
/// In full coordinates the partial is `d·ρ_ij / (k² − 2k + Σρ²)`; defined on
/// the boundary, unlike the entropy part.
pub fn grad_energy(rho: &DMatrix<f64>, d: f64) -> DVector<f64> {
    let den = energy_denominator(rho);
    pull_back(&rho.map(|x| d * x / den))
}

fn check_interior(rho: &DMatrix<f64>) -> Result<()> {
    if rho.nrows() != rho.ncols() || rho.nrows() < 2 {
        return Err(Error::DimensionMismatch("square matrix with k ≥ 2 expected".into()));
    }
    if let Some((a, _)) = rho.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
        let k = rho.nrows();
        return Err(Error::InvalidInput(format!(
            "entry ({},{}) on the boundary, the entropy term is singular there",
            a % k + 1,
            a / k + 1
        )));
    }
    Ok(())
}

/// Analytic chart gradient of `f`.
///
/// Full-coordinate partials are `−(ln ρ_ij + 1)/k + d·ρ_ij/(k² − 2k + Σρ²)`.
pub fn grad_f(rho: &DMatrix<f64>, d: f64) -> Result<DVector<f64>> {
    check_interior(rho)?;
    let k = rho.nrows() as f64;
    let den = energy_denominator(rho);
    Ok(pull_back(&rho.map(|x| -(x.ln() + 1.0) / k + d * x / den)))
}

/// Analytic chart Hessian `JᵀFJ`, where `F` is the full-coordinate Hessian
/// and `J` the Jacobian of the lift.
pub fn hessian_f(rho: &DMatrix<f64>, d: f64) -> Result<DMatrix<f64>> {
    check_interior(rho)?;
    let k = rho.nrows();
    let kf = k as f64;
    let m = k * k;
    let den = energy_denominator(rho);
    // Entries in column-major order would not match the chart; go explicit.
    let v: Vec<f64> = (0..m).map(|a| rho[(a / k, a % k)]).collect();
    let full = DMatrix::from_fn(m, m, |a, b| {
        let diag = if a == b { -1.0 / (kf * v[a]) + d / den } else { 0.0 };
        diag - 2.0 * d * v[a] * v[b] / (den * den)
    });
    let last = m - 1;
    Ok(DMatrix::from_fn(last, last, |a, b| {
        full[(a, b)] - full[(a, last)] - full[(last, b)] + full[(last, last)]
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HessianReport {
    pub hessian: DMatrix<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub max_eigenvalue: f64,
    /// Largest entry of `|H − Hᵀ|`.
    pub asymmetry: f64,
}

/// Chart Hessian at the flat matrix with its spectrum.
pub fn hessian_f_at_flat(k: usize, d: f64) -> Result<HessianReport> {
    if k < 3 {
        return Err(Error::InvalidInput(format!("k={k}, need k ≥ 3")));
    }
    let hessian = hessian_f(&DMatrix::from_element(k, k, 1.0 / k as f64), d)?;
    let asymmetry = (&hessian - hessian.transpose()).amax();
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(hessian.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eigenvalues.sort_by(f64::total_cmp);
    let max_eigenvalue = *eigenvalues.last().unwrap();
    Ok(HessianReport {
        hessian,
        eigenvalues,
        max_eigenvalue,
        asymmetry,
    })
}
