/*!
Core and cluster geometry of a coloured multigraph.

Edge counts `e(v, S)` are taken with multiplicity, so a double edge into a
class counts twice. Colourings need not be proper, but the constructions are
only meaningful for proper ones.
*/

mod density;
mod wuy;

pub use density::{default_size_cap, density_predicate, DensityReport, DEFAULT_BOUND_C};
pub use wuy::{build_wuy, check_core_inclusion, InclusionReport, WuySets};

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::colorings::Coloring;
use crate::error::{Error, Result};
use crate::graphs::MultiGraph;

/// Desk-scale default for the core parameter `ℓ`; the asymptotic argument uses 100.
pub const DEFAULT_ELL: usize = 3;

fn check_pair(g: &MultiGraph, sigma: &Coloring) -> Result<()> {
    if g.n() != sigma.n() {
        return Err(Error::DimensionMismatch(format!(
            "graph on {} vertices, colouring of {}",
            g.n(),
            sigma.n()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreResult {
    pub ell: usize,
    /// Core vertices in increasing order.
    pub core: Vec<usize>,
    pub in_core: Vec<bool>,
    /// Evicted vertices in eviction order.
    pub peel_order: Vec<usize>,
    /// For evicted vertices, a colour and the edge count into it that fell
    /// short of `ℓ` at eviction time.
    pub deficiency: Vec<Option<(usize, usize)>>,
}

impl CoreResult {
    pub fn len(&self) -> usize {
        self.core.len()
    }

    pub fn is_empty(&self) -> bool {
        self.core.is_empty()
    }
}

/// First vertex of `mask` with fewer than `ℓ` edges into some other class
/// inside `mask`, with that class.
pub fn core_violation(g: &MultiGraph, sigma: &Coloring, ell: usize, mask: &[bool]) -> Option<(usize, usize)> {
    let k = sigma.k();
    let mut cnt = vec![0usize; k];
    (0..g.n()).filter(|&v| mask[v]).find_map(|v| {
        cnt.iter_mut().for_each(|c| *c = 0);
        for &w in g.neighbors(v) {
            if mask[w] {
                cnt[sigma.color(w)] += 1;
            }
        }
        (0..k)
            .find(|&i| i != sigma.color(v) && cnt[i] < ell)
            .map(|i| (v, i))
    })
}

struct Peeler<'a> {
    g: &'a MultiGraph,
    sigma: &'a Coloring,
    ell: usize,
    k: usize,
    cnt: Vec<usize>,
    alive: Vec<bool>,
}

impl<'a> Peeler<'a> {
    fn new(g: &'a MultiGraph, sigma: &'a Coloring, ell: usize) -> Self {
        let k = sigma.k();
        Peeler {
            g,
            sigma,
            ell,
            k,
            cnt: g.class_degrees(sigma.colors(), k),
            alive: vec![true; g.n()],
        }
    }

    fn deficient(&self, v: usize) -> Option<(usize, usize)> {
        let own = self.sigma.color(v);
        (0..self.k)
            .filter(|&i| i != own)
            .map(|i| (i, self.cnt[v * self.k + i]))
            .find(|&(_, c)| c < self.ell)
    }

    // Removes `v` and returns the neighbours whose counts dropped.
    fn evict(&mut self, v: usize) -> impl Iterator<Item = usize> + 'a {
        self.alive[v] = false;
        let c = self.sigma.color(v);
        let g = self.g;
        for &w in g.neighbors(v) {
            if w != v {
                self.cnt[w * self.k + c] -= 1;
            }
        }
        g.neighbors(v).iter().copied().filter(move |&w| w != v)
    }

    fn finish(self, peel_order: Vec<usize>, deficiency: Vec<Option<(usize, usize)>>) -> CoreResult {
        let core: Vec<usize> = (0..self.g.n()).filter(|&v| self.alive[v]).collect();
        debug_assert!(core_violation(self.g, self.sigma, self.ell, &self.alive).is_none());
        CoreResult {
            ell: self.ell,
            core,
            in_core: self.alive,
            peel_order,
            deficiency,
        }
    }
}

/// The `(σ,ℓ)`-core: the largest vertex set in which every vertex has at
/// least `ℓ` edges into each colour class other than its own.
///
/// Worklist peeling; each vertex enters the list once, when it first becomes
/// deficient, so the work is `O((n + m)·k)`.
pub fn sigma_ell_core(g: &MultiGraph, sigma: &Coloring, ell: usize) -> Result<CoreResult> {
    check_pair(g, sigma)?;
    let n = g.n();
    let mut p = Peeler::new(g, sigma, ell);
    let mut queued = vec![false; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        if p.deficient(v).is_some() {
            queued[v] = true;
            queue.push_back(v);
        }
    }
    let mut order = Vec::new();
    let mut deficiency = vec![None; n];
    while let Some(v) = queue.pop_front() {
        deficiency[v] = p.deficient(v);
        order.push(v);
        for w in p.evict(v) {
            if p.alive[w] && !queued[w] && p.deficient(w).is_some() {
                queued[w] = true;
                queue.push_back(w);
            }
        }
    }
    Ok(p.finish(order, deficiency))
}

/// Same core, evicting a uniformly random deficient vertex at each step.
pub fn sigma_ell_core_random_order<R: Rng + ?Sized>(
    g: &MultiGraph,
    sigma: &Coloring,
    ell: usize,
    rng: &mut R,
) -> Result<CoreResult> {
    check_pair(g, sigma)?;
    let n = g.n();
    let mut p = Peeler::new(g, sigma, ell);
    let mut queued = vec![false; n];
    let mut pending: Vec<usize> = (0..n).filter(|&v| p.deficient(v).is_some()).collect();
    pending.iter().for_each(|&v| queued[v] = true);
    let mut order = Vec::new();
    let mut deficiency = vec![None; n];
    while !pending.is_empty() {
        let i = rng.gen_range(0..pending.len());
        let v = pending.swap_remove(i);
        deficiency[v] = p.deficient(v);
        order.push(v);
        for w in p.evict(v) {
            if p.alive[w] && !queued[w] && p.deficient(w).is_some() {
                queued[w] = true;
                pending.push(w);
            }
        }
        pending.shuffle(rng);
    }
    Ok(p.finish(order, deficiency))
}

/// How colours without core neighbours are counted for `a`-freeness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FreeCounting {
    /// Count every colour `i ∈ [k]` with no core neighbour, the vertex's own
    /// colour included; `a`-free means at least `a + 1` of them. For a
    /// proper colouring the own class is always empty of neighbours, so this
    /// is "at least `a` other colours missing".
    #[default]
    AllColors,
    /// Count only colours other than the vertex's own, still requiring
    /// `a + 1`. Stricter by one for proper colourings.
    OtherColors,
}

/// Number of colours without a core neighbour of `v`, per `mode`.
pub fn missing_colors(g: &MultiGraph, sigma: &Coloring, in_core: &[bool], v: usize, mode: FreeCounting) -> usize {
    let k = sigma.k();
    let mut seen = vec![false; k];
    for &w in g.neighbors(v) {
        if in_core[w] {
            seen[sigma.color(w)] = true;
        }
    }
    let own = sigma.color(v);
    (0..k)
        .filter(|&i| !seen[i] && (mode == FreeCounting::AllColors || i != own))
        .count()
}

pub fn is_a_free(g: &MultiGraph, sigma: &Coloring, in_core: &[bool], v: usize, a: usize, mode: FreeCounting) -> bool {
    missing_colors(g, sigma, in_core, v, mode) >= a + 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreedomReport {
    pub mode: FreeCounting,
    pub free_1: Vec<usize>,
    pub free_2: Vec<usize>,
    /// Vertices that are not 1-free.
    pub complete: Vec<usize>,
    /// `|F₁∖F₂| + |F₂|·log₂ k`, the log of the cluster-size bound.
    pub cluster_log2_upper: f64,
}

pub fn freedom_report_with_core(g: &MultiGraph, sigma: &Coloring, core: &CoreResult, mode: FreeCounting) -> Result<FreedomReport> {
    check_pair(g, sigma)?;
    let (mut free_1, mut free_2, mut complete) = (Vec::new(), Vec::new(), Vec::new());
    for v in 0..g.n() {
        let m = missing_colors(g, sigma, &core.in_core, v, mode);
        if m >= 2 {
            free_1.push(v);
        } else {
            complete.push(v);
        }
        if m >= 3 {
            free_2.push(v);
        }
    }
    let only_1 = (free_1.len() - free_2.len()) as f64;
    let cluster_log2_upper = only_1 + free_2.len() as f64 * (sigma.k() as f64).log2();
    Ok(FreedomReport {
        mode,
        free_1,
        free_2,
        complete,
        cluster_log2_upper,
    })
}

/// Free and complete vertices relative to the `(σ,ℓ)`-core.
pub fn freedom_report(g: &MultiGraph, sigma: &Coloring, ell: usize, mode: FreeCounting) -> Result<FreedomReport> {
    let core = sigma_ell_core(g, sigma, ell)?;
    freedom_report_with_core(g, sigma, &core, mode)
}

/// Leading-order comparison of the cluster-size bound with the balanced
/// first moment, writing `d = (2k − 1) ln k − c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterRate {
    /// `ln 2 / k`.
    pub upper: f64,
    /// `c / (2k)`.
    pub first_moment: f64,
    /// `c/(2k) − ln 2/k`; positive when clusters are small against the first moment.
    pub margin: f64,
    pub c: f64,
}

pub fn cluster_size_rate(k: usize, d: f64) -> Result<ClusterRate> {
    if k < 3 {
        return Err(Error::InvalidInput(format!("k={k}, need k ≥ 3")));
    }
    let kf = k as f64;
    let c = (2.0 * kf - 1.0) * kf.ln() - d;
    let upper = std::f64::consts::LN_2 / kf;
    let first_moment = c / (2.0 * kf);
    Ok(ClusterRate {
        upper,
        first_moment,
        margin: first_moment - upper,
        c,
    })
}
