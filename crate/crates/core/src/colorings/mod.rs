/*!
Colourings, their predicates, overlaps and exact counting oracles.

A colouring is a map `V → [k]`; nothing forces it to be proper. Colour classes
are labelled throughout, so every count is a count of labelled colourings.
*/

mod cluster;
mod count;

pub use cluster::{
    cluster_of, count_pairs_with_overlap, is_nice, is_separable, nice_conditions_12, NiceReport,
};

use nalgebra::DMatrix;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::MultiGraph;
use crate::limits::{guard, LIMITS};
use count::{frontier_count, visit_colorings, SizeBounds};

/// A map from vertices to colours `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coloring {
    colors: Vec<usize>,
    k: usize,
}

impl Coloring {
    pub fn new(colors: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("k must be positive".into()));
        }
        if let Some((v, &c)) = colors.iter().enumerate().find(|(_, &c)| c >= k) {
            return Err(Error::InvalidInput(format!(
                "vertex {v} has colour {c}, outside 0..{k}"
            )));
        }
        Ok(Coloring { colors, k })
    }

    /// The balanced colouring `v ↦ v mod k`.
    pub fn round_robin(n: usize, k: usize) -> Self {
        Coloring {
            colors: (0..n).map(|v| v % k).collect(),
            k,
        }
    }

    /// The balanced colouring with classes of consecutive vertices.
    pub fn blocks(n: usize, k: usize) -> Result<Self> {
        if k == 0 || n % k != 0 {
            return Err(Error::InvalidInput(format!("k={k} does not divide n={n}")));
        }
        Ok(Coloring {
            colors: (0..n).map(|v| v / (n / k)).collect(),
            k,
        })
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &c in &self.colors {
            s[c] += 1;
        }
        s
    }

    /// Vertices of colour `i`, ascending.
    pub fn class(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.colors[v] == i).collect()
    }
}

/// Thresholds of the cluster, separability and niceness predicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColoringParams {
    /// Strict lower bound on every diagonal overlap inside a cluster.
    pub cluster_threshold: f64,
    /// Separability slack: entries above the cluster threshold must reach `1 − kappa`.
    pub kappa: f64,
    /// Diagonal overlap demanded by the rigidity condition of niceness.
    pub nice_diagonal: f64,
}

impl Default for ColoringParams {
    fn default() -> Self {
        ColoringParams {
            cluster_threshold: 0.51,
            kappa: 0.1,
            nice_diagonal: 0.9,
        }
    }
}

/// The asymptotic separability slack `ln^500 k / k`; it exceeds 1 for every
/// `k` of practical size, which is why [`ColoringParams`] defaults to 0.1.
pub fn asymptotic_kappa(k: usize) -> f64 {
    let k = k as f64;
    (500.0 * k.ln().ln()).exp() / k
}

pub fn is_proper(g: &MultiGraph, sigma: &Coloring) -> bool {
    g.edges()
        .iter()
        .all(|&(u, v)| sigma.color(u) != sigma.color(v))
}

pub fn is_balanced(sigma: &Coloring) -> bool {
    let (n, k) = (sigma.n(), sigma.k());
    n % k == 0 && sigma.class_sizes().iter().all(|&s| s == n / k)
}

/// Overlap of two colourings: `ρ_ij = (k/n)·|σ⁻¹(i) ∩ τ⁻¹(j)|`, stored as the
/// integer intersection sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OverlapMatrix {
    n: usize,
    k: usize,
    counts: Vec<Vec<usize>>,
}

impl OverlapMatrix {
    pub fn from_counts(n: usize, counts: Vec<Vec<usize>>) -> Result<Self> {
        let k = counts.len();
        if k == 0 || counts.iter().any(|r| r.len() != k) {
            return Err(Error::DimensionMismatch("overlap counts must be k×k".into()));
        }
        if counts.iter().flatten().sum::<usize>() != n {
            return Err(Error::InvalidInput("overlap counts must sum to n".into()));
        }
        Ok(OverlapMatrix { n, k, counts })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `|σ⁻¹(i) ∩ τ⁻¹(j)|`.
    pub fn count(&self, i: usize, j: usize) -> usize {
        self.counts[i][j]
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        (self.k * self.counts[i][j]) as f64 / self.n as f64
    }

    /// `ρ_ij > t`, decided on `k·count` against `t·n`.
    pub fn exceeds(&self, i: usize, j: usize, t: f64) -> bool {
        (self.k * self.counts[i][j]) as f64 > t * self.n as f64
    }

    /// `ρ_ij ≥ t`.
    pub fn at_least(&self, i: usize, j: usize, t: f64) -> bool {
        (self.k * self.counts[i][j]) as f64 >= t * self.n as f64
    }

    pub fn transpose(&self) -> Self {
        let counts = (0..self.k)
            .map(|i| (0..self.k).map(|j| self.counts[j][i]).collect())
            .collect();
        OverlapMatrix {
            n: self.n,
            k: self.k,
            counts,
        }
    }

    /// Row and column sums all equal one, decided exactly.
    pub fn is_doubly_stochastic(&self) -> bool {
        let target = self.n;
        (0..self.k).all(|i| {
            self.k * self.counts[i].iter().sum::<usize>() == target
                && self.k * (0..self.k).map(|j| self.counts[j][i]).sum::<usize>() == target
        })
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.k, self.k, |i, j| self.entry(i, j))
    }
}

pub fn overlap(sigma: &Coloring, tau: &Coloring) -> Result<OverlapMatrix> {
    if sigma.n() != tau.n() || sigma.k() != tau.k() {
        return Err(Error::DimensionMismatch(format!(
            "colourings have (n,k) = ({},{}) and ({},{})",
            sigma.n(),
            sigma.k(),
            tau.n(),
            tau.k()
        )));
    }
    let k = sigma.k();
    let mut counts = vec![vec![0usize; k]; k];
    for v in 0..sigma.n() {
        counts[sigma.color(v)][tau.color(v)] += 1;
    }
    Ok(OverlapMatrix {
        n: sigma.n(),
        k,
        counts,
    })
}

/// Every diagonal overlap strictly above 0.51.
pub fn in_cluster(sigma: &Coloring, tau: &Coloring) -> Result<bool> {
    in_cluster_with(sigma, tau, ColoringParams::default().cluster_threshold)
}

pub fn in_cluster_with(sigma: &Coloring, tau: &Coloring, threshold: f64) -> Result<bool> {
    let rho = overlap(sigma, tau)?;
    Ok((0..rho.k()).all(|i| rho.exceeds(i, i, threshold)))
}

/// Largest deviation `|e(V_i, V_j) − dn/(k(k−1))|` over `i < j`.
pub fn max_edge_deviation(g: &MultiGraph, sigma: &Coloring) -> f64 {
    let k = sigma.k();
    let e = g.class_edge_counts(sigma.colors(), k);
    let expected = (g.d() * g.n()) as f64 / (k * (k - 1)) as f64;
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in (i + 1)..k {
            worst = worst.max((e[i][j] as f64 - expected).abs());
        }
    }
    worst
}

/// Some inter-class edge count deviates from `dn/(k(k−1))` by strictly more
/// than `√n·ln n`.
pub fn is_skewed(g: &MultiGraph, sigma: &Coloring) -> bool {
    let n = g.n() as f64;
    max_edge_deviation(g, sigma) > n.sqrt() * n.ln()
}

/// Vertices that see every colour other than their own.
pub fn rainbow_vertices(g: &MultiGraph, sigma: &Coloring) -> Vec<usize> {
    let k = sigma.k();
    let deg = g.class_degrees(sigma.colors(), k);
    (0..g.n())
        .filter(|&v| (0..k).all(|i| i == sigma.color(v) || deg[v * k + i] > 0))
        .collect()
}

/// `V_ij`: vertices of colour `i` without a neighbour of colour `j`, for `i ≠ j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VacantTable {
    k: usize,
    sets: Vec<Vec<usize>>,
}

impl VacantTable {
    pub fn get(&self, i: usize, j: usize) -> &[usize] {
        &self.sets[i * self.k + j]
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

pub fn vacant_table(g: &MultiGraph, sigma: &Coloring) -> VacantTable {
    let k = sigma.k();
    let deg = g.class_degrees(sigma.colors(), k);
    let mut sets = vec![Vec::new(); k * k];
    for v in 0..g.n() {
        let i = sigma.color(v);
        for j in 0..k {
            if j != i && deg[v * k + j] == 0 {
                sets[i * k + j].push(v);
            }
        }
    }
    VacantTable { k, sets }
}

/// Vertices that are both `j`- and `j2`-vacant.
pub fn doubly_vacant(g: &MultiGraph, sigma: &Coloring, j: usize, j2: usize) -> Vec<usize> {
    (0..g.n())
        .filter(|&v| {
            let c = sigma.color(v);
            c != j
                && c != j2
                && g.neighbors(v)
                    .iter()
                    .all(|&w| sigma.color(w) != j && sigma.color(w) != j2)
        })
        .collect()
}

/// Which colourings [`count_colorings`] counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountFilter {
    /// All proper colourings.
    None,
    /// Proper colourings with all classes of size `n/k`.
    Balanced,
    /// Proper colourings with the given class sizes.
    Profile(Vec<usize>),
    /// Balanced proper colourings that are skewed.
    Skewed,
    /// Proper colourings meeting the first two niceness conditions.
    NiceConditions12,
}

/// Exact number of proper `k`-colourings passing `filter`.
pub fn count_colorings(g: &MultiGraph, k: usize, filter: &CountFilter) -> Result<BigUint> {
    guard("n for exact counting", g.n(), LIMITS.count_max_n)?;
    guard("k for exact counting", k, LIMITS.count_max_k)?;
    let n = g.n();
    let ne = |a: usize, b: usize| a != b;
    let c = match filter {
        CountFilter::None => frontier_count(g, k, &ne, None),
        CountFilter::Balanced => {
            if n % k != 0 {
                0
            } else {
                frontier_count(g, k, &ne, Some(&vec![n / k; k]))
            }
        }
        CountFilter::Profile(sizes) => {
            if sizes.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "profile has {} entries, expected {k}",
                    sizes.len()
                )));
            }
            frontier_count(g, k, &ne, Some(sizes))
        }
        CountFilter::Skewed => {
            guard("n for visiting counts", n, LIMITS.visit_max_n)?;
            if n % k != 0 {
                0
            } else {
                let mut c = 0u128;
                visit_colorings(g, k, &SizeBounds::exact(&vec![n / k; k]), &mut |cols| {
                    let sigma = Coloring { colors: cols.to_vec(), k };
                    if is_skewed(g, &sigma) {
                        c += 1;
                    }
                    true
                });
                c
            }
        }
        CountFilter::NiceConditions12 => {
            guard("n for visiting counts", n, LIMITS.visit_max_n)?;
            let mut c = 0u128;
            visit_colorings(g, k, &SizeBounds::free(n, k), &mut |cols| {
                let sigma = Coloring { colors: cols.to_vec(), k };
                let (a, b) = nice_conditions_12(g, &sigma);
                if a && b {
                    c += 1;
                }
                true
            });
            c
        }
    };
    Ok(BigUint::from(c))
}

/// Every proper `k`-colouring, optionally only balanced ones, in visiting order.
pub fn proper_colorings(g: &MultiGraph, k: usize, balanced_only: bool) -> Result<Vec<Coloring>> {
    guard("n for enumeration", g.n(), LIMITS.visit_max_n)?;
    guard("k for enumeration", k, LIMITS.count_max_k)?;
    let n = g.n();
    if balanced_only && n % k != 0 {
        return Ok(Vec::new());
    }
    let bounds = if balanced_only {
        SizeBounds::exact(&vec![n / k; k])
    } else {
        SizeBounds::free(n, k)
    };
    let mut out = Vec::new();
    visit_colorings(g, k, &bounds, &mut |cols| {
        out.push(Coloring { colors: cols.to_vec(), k });
        true
    });
    Ok(out)
}
