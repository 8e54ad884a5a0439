use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::count::{frontier_count, visit_colorings, SizeBounds};
use super::{overlap, Coloring, ColoringParams, OverlapMatrix};
use crate::error::{Error, Result};
use crate::graphs::MultiGraph;
use crate::limits::{guard, LIMITS};

fn cluster_guard(n: usize, k: usize) -> Result<()> {
    guard("n for cluster oracles", n, LIMITS.cluster_max_n)?;
    guard("k for cluster oracles", k, LIMITS.cluster_max_k)
}

fn balanced_bounds(n: usize, k: usize) -> Option<SizeBounds> {
    (n % k == 0).then(|| SizeBounds::exact(&vec![n / k; k]))
}

/// All balanced proper colourings whose diagonal overlaps with `sigma`
/// exceed the cluster threshold, by exhaustive enumeration.
pub fn cluster_of(g: &MultiGraph, sigma: &Coloring, params: &ColoringParams) -> Result<Vec<Coloring>> {
    let (n, k) = (g.n(), sigma.k());
    cluster_guard(n, k)?;
    let Some(bounds) = balanced_bounds(n, k) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    visit_colorings(g, k, &bounds, &mut |cols| {
        let tau = Coloring { colors: cols.to_vec(), k };
        let rho = overlap(sigma, &tau).expect("same shape");
        if (0..k).all(|i| rho.exceeds(i, i, params.cluster_threshold)) {
            out.push(tau);
        }
        true
    });
    out.sort();
    Ok(out)
}

/// Every overlap entry above the cluster threshold against any balanced
/// proper colouring is at least `1 − κ`.
pub fn is_separable(g: &MultiGraph, sigma: &Coloring, params: &ColoringParams) -> Result<bool> {
    let (n, k) = (g.n(), sigma.k());
    cluster_guard(n, k)?;
    let Some(bounds) = balanced_bounds(n, k) else {
        return Ok(true);
    };
    let mut ok = true;
    visit_colorings(g, k, &bounds, &mut |cols| {
        let tau = Coloring { colors: cols.to_vec(), k };
        let rho = overlap(sigma, &tau).expect("same shape");
        ok = separable_overlap(&rho, params);
        ok
    });
    Ok(ok)
}

pub(crate) fn separable_overlap(rho: &OverlapMatrix, params: &ColoringParams) -> bool {
    let k = rho.k();
    (0..k).all(|i| {
        (0..k).all(|j| {
            !rho.exceeds(i, j, params.cluster_threshold) || rho.at_least(i, j, 1.0 - params.kappa)
        })
    })
}

/// The first two niceness conditions: near-uniform class sizes and
/// near-uniform inter-class edge densities.
pub fn nice_conditions_12(g: &MultiGraph, sigma: &Coloring) -> (bool, bool) {
    let (n, k) = (g.n() as f64, sigma.k());
    let kf = k as f64;
    let lnk = kf.ln().powf(-1.0 / 3.0);
    let sizes = sigma.class_sizes();
    let rho_dev: f64 = sizes
        .iter()
        .map(|&s| (s as f64 / n - 1.0 / kf).powi(2))
        .sum::<f64>()
        .sqrt();
    let cond1 = rho_dev < lnk / kf;

    let e = g.class_edge_counts(sigma.colors(), k);
    let dn = (g.d() * g.n()) as f64;
    let mut mu_dev = 0.0;
    for i in 0..k {
        for j in 0..k {
            let bar = if i == j { 0.0 } else { 1.0 / (kf * (kf - 1.0)) };
            mu_dev += (e[i][j] as f64 / dn - bar).powi(2);
        }
    }
    let cond2 = mu_dev.sqrt() < 8.0 * lnk / (kf * (kf - 1.0));
    (cond1, cond2)
}

/// Outcome of the three niceness conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceReport {
    pub sizes_near_uniform: bool,
    pub densities_near_uniform: bool,
    pub cluster_rigid: bool,
}

impl NiceReport {
    pub fn is_nice(&self) -> bool {
        self.sizes_near_uniform && self.densities_near_uniform && self.cluster_rigid
    }
}

/// All three niceness conditions. The rigidity condition ranges over every
/// proper colouring (balanced or not) whose diagonal overlaps with `sigma`
/// exceed the cluster threshold and whose class sizes are within
/// `n/(k·ln^{1/3} k)` of `n/k`; each must have diagonal overlaps of at least
/// `params.nice_diagonal`. Only available at oracle scale; use
/// [`nice_conditions_12`] otherwise.
pub fn is_nice(g: &MultiGraph, sigma: &Coloring, params: &ColoringParams) -> Result<NiceReport> {
    let (n, k) = (g.n(), sigma.k());
    cluster_guard(n, k)?;
    let (c1, c2) = nice_conditions_12(g, sigma);
    let kf = k as f64;
    let width = n as f64 / (kf * kf.ln().powf(1.0 / 3.0));
    let center = n as f64 / kf;
    let admissible = |s: usize| (s as f64 - center).abs() < width;
    let lo = (0..=n).find(|&s| admissible(s));
    let hi = (0..=n).rev().find(|&s| admissible(s));
    let mut rigid = true;
    if let (Some(lo), Some(hi)) = (lo, hi) {
        let bounds = SizeBounds {
            min: vec![lo; k],
            max: vec![hi; k],
        };
        visit_colorings(g, k, &bounds, &mut |cols| {
            let tau = Coloring { colors: cols.to_vec(), k };
            let rho = overlap(sigma, &tau).expect("same shape");
            let in_star = (0..k).all(|i| rho.exceeds(i, i, params.cluster_threshold));
            if in_star && !(0..k).all(|i| rho.at_least(i, i, params.nice_diagonal)) {
                rigid = false;
            }
            rigid
        });
    }
    Ok(NiceReport {
        sizes_near_uniform: c1,
        densities_near_uniform: c2,
        cluster_rigid: rigid,
    })
}

/// Ordered pairs `(σ, τ)` of balanced proper colourings with overlap `rho`.
///
/// Counted as colourings with `k²` colours `(σ(v), τ(v))`, adjacent vertices
/// differing in both coordinates, with exactly `rho.count(i, j)` vertices of
/// colour `(i, j)`.
pub fn count_pairs_with_overlap(g: &MultiGraph, k: usize, rho: &OverlapMatrix) -> Result<BigUint> {
    let n = g.n();
    cluster_guard(n, k)?;
    if rho.k() != k || rho.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "overlap is {}×{} over n={}, expected k={k}, n={n}",
            rho.k(),
            rho.k(),
            rho.n()
        )));
    }
    if !rho.is_doubly_stochastic() {
        return Ok(BigUint::from(0u32));
    }
    let compat = |a: usize, b: usize| a / k != b / k && a % k != b % k;
    let target: Vec<usize> = (0..k * k).map(|c| rho.count(c / k, c % k)).collect();
    Ok(BigUint::from(frontier_count(g, k * k, &compat, Some(&target))))
}
