//! Search for small vertex sets spanning too many edges.
//!
//! A falsifier only: finding nothing is evidence, not proof. A minimal set
//! with `e(S) > c·|S|` has minimum inner degree above `c` (dropping a vertex
//! of degree `≤ c` keeps the ratio above `c`), so the search runs greedy
//! min-degree peeling inside each component of the `(⌊c⌋+1)`-core, and
//! exhaustively over all subsets on small graphs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::graphs::MultiGraph;
use crate::limits::LIMITS;

pub const DEFAULT_BOUND_C: f64 = 5.0;

/// `k^{−4/3}·n`.
pub fn default_size_cap(n: usize, k: usize) -> usize {
    (n as f64 * (k as f64).powf(-4.0 / 3.0)).floor() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub bound_c: f64,
    pub size_cap: usize,
    /// A set with `|S| ≤ size_cap` and more than `bound_c·|S|` edges.
    pub witness: Option<Vec<usize>>,
    pub witness_edges: usize,
    /// Whether every subset up to the cap was examined.
    pub exhaustive: bool,
}

// Edges with both ends in `mask`, loops once, parallel edges with multiplicity.
fn spanned(g: &MultiGraph, set: &[usize], mask: &[bool]) -> usize {
    let twice: usize = set
        .iter()
        .map(|&v| g.neighbors(v).iter().filter(|&&w| mask[w]).count())
        .sum();
    // A loop shows up twice in its vertex's list, like any other edge end pair.
    twice / 2
}

// Inner degree counting a loop once.
fn inner_degree(g: &MultiGraph, v: usize, mask: &[bool]) -> usize {
    let nb = g.neighbors(v);
    let loops = nb.iter().filter(|&&w| w == v).count() / 2;
    nb.iter().filter(|&&w| w != v && mask[w]).count() + loops
}

fn core_mask(g: &MultiGraph, min_deg: usize) -> Vec<bool> {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..n).map(|v| inner_degree(g, v, &alive)).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] < min_deg).collect();
    let mut queued = vec![false; n];
    stack.iter().for_each(|&v| queued[v] = true);
    while let Some(v) = stack.pop() {
        alive[v] = false;
        for &w in g.neighbors(v) {
            if w != v && alive[w] {
                deg[w] -= 1;
                if deg[w] < min_deg && !queued[w] {
                    queued[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    alive
}

fn components(g: &MultiGraph, mask: &[bool]) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if !mask[s] || seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut i = 0;
        while i < comp.len() {
            let v = comp[i];
            i += 1;
            for &w in g.neighbors(v) {
                if mask[w] && !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

// Greedy min-degree peeling of `comp`; returns the smallest violating suffix.
fn peel_component(g: &MultiGraph, comp: &[usize], c: f64, cap: usize) -> Option<(Vec<usize>, usize)> {
    let mut mask = vec![false; g.n()];
    comp.iter().for_each(|&v| mask[v] = true);
    let mut edges = spanned(g, comp, &mask);
    let mut deg: Vec<usize> = (0..g.n()).map(|v| if mask[v] { inner_degree(g, v, &mask) } else { 0 }).collect();
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = comp.iter().map(|&v| Reverse((deg[v], v))).collect();
    let mut size = comp.len();
    let mut removed = Vec::with_capacity(size);
    let mut best: Option<(usize, usize)> = None;
    let violates = |size: usize, edges: usize| size <= cap && edges as f64 > c * size as f64;
    if violates(size, edges) {
        best = Some((size, edges));
    }
    while let Some(Reverse((dv, v))) = heap.pop() {
        if !mask[v] || dv != deg[v] {
            continue;
        }
        mask[v] = false;
        removed.push(v);
        edges -= deg[v];
        size -= 1;
        for &w in g.neighbors(v) {
            if w != v && mask[w] {
                deg[w] -= 1;
                heap.push(Reverse((deg[w], w)));
            }
        }
        if size > 0 && violates(size, edges) && best.map_or(true, |(s, _)| size < s) {
            best = Some((size, edges));
        }
    }
    best.map(|(s, e)| {
        let gone = comp.len() - s;
        let mut out: Vec<usize> = comp.iter().copied().filter(|v| !removed[..gone].contains(v)).collect();
        out.sort_unstable();
        (out, e)
    })
}

fn exhaustive(g: &MultiGraph, c: f64, cap: usize) -> Option<(Vec<usize>, usize)> {
    let n = g.n();
    let mut best: Option<(Vec<usize>, usize)> = None;
    for bits in 1u32..(1 << n) {
        let size = bits.count_ones() as usize;
        if size > cap || best.as_ref().is_some_and(|(s, _)| s.len() <= size) {
            continue;
        }
        let mask: Vec<bool> = (0..n).map(|v| bits >> v & 1 == 1).collect();
        let set: Vec<usize> = (0..n).filter(|&v| mask[v]).collect();
        let e = spanned(g, &set, &mask);
        if e as f64 > c * size as f64 {
            best = Some((set, e));
        }
    }
    best
}

/// Looks for `S` with `|S| ≤ size_cap` and `e(S) > bound_c·|S|`; returns the
/// smallest witness found.
pub fn density_predicate(g: &MultiGraph, bound_c: f64, size_cap: usize) -> DensityReport {
    let is_exhaustive = g.n() <= LIMITS.density_exhaustive_n;
    let found = if is_exhaustive {
        exhaustive(g, bound_c, size_cap)
    } else {
        let min_deg = bound_c.max(0.0).floor() as usize + 1;
        let mask = core_mask(g, min_deg);
        components(g, &mask)
            .iter()
            .filter_map(|comp| peel_component(g, comp, bound_c, size_cap))
            .min_by_key(|(s, _)| s.len())
    };
    let (witness, witness_edges) = match found {
        Some((s, e)) => (Some(s), e),
        None => (None, 0),
    };
    DensityReport {
        bound_c,
        size_cap,
        witness,
        witness_edges,
        exhaustive: is_exhaustive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustergeo::tests::planted;
    use crate::graphs::sample_configuration;
    use crate::rng::stream_rng;

    fn clique_in_cycle(q: usize, n: usize) -> MultiGraph {
        let mut edges = Vec::new();
        for u in 0..q {
            for v in u + 1..q {
                edges.push((u, v));
            }
        }
        for v in q..n {
            edges.push((v, if v + 1 == n { q } else { v + 1 }));
        }
        edges.push((0, q));
        MultiGraph::with_edges(n, edges).unwrap()
    }

    #[test]
    fn forests_never_violate() {
        let edges: Vec<_> = (1..40).map(|v| (v, (v - 1) / 2)).collect();
        let g = MultiGraph::with_edges(40, edges).unwrap();
        let r = density_predicate(&g, 1.0, 40);
        assert!(r.witness.is_none() && !r.exhaustive);
        let small = MultiGraph::with_edges(8, (1..8).map(|v| (v, v - 1)).collect()).unwrap();
        let r = density_predicate(&small, 1.0, 8);
        assert!(r.witness.is_none() && r.exhaustive);
    }

    #[test]
    fn dense_cliques_are_found() {
        // K_m spans m(m−1)/2 edges, more than 5m once m ≥ 12: K12 has 66 > 60
        // and K11 has 55, not more than 55.
        let g = clique_in_cycle(13, 60);
        let r = density_predicate(&g, 5.0, 20);
        let w = r.witness.unwrap();
        assert_eq!((w.len(), r.witness_edges), (12, 66));
        assert!(w.iter().all(|&v| v < 13));
        let g = clique_in_cycle(12, 60);
        assert_eq!(density_predicate(&g, 5.0, 20).witness, Some((0..12).collect()));
        let g = clique_in_cycle(11, 60);
        assert!(density_predicate(&g, 5.0, 20).witness.is_none());
        // The cap binds.
        let g = clique_in_cycle(13, 60);
        assert!(density_predicate(&g, 5.0, 11).witness.is_none());
    }

    #[test]
    fn exhaustive_matches_peeling_on_small_graphs() {
        // K5 with a doubled edge: 11 edges on 5 vertices > 2·5.
        let mut edges = vec![(0, 1)];
        for u in 0..5 {
            for v in u + 1..5 {
                edges.push((u, v));
            }
        }
        edges.extend([(5, 6), (6, 7), (7, 5), (4, 5)]);
        let g = MultiGraph::with_edges(8, edges).unwrap();
        let r = density_predicate(&g, 2.0, 8);
        assert!(r.exhaustive);
        assert_eq!(r.witness, Some(vec![0, 1, 2, 3, 4]));
        assert_eq!(r.witness_edges, 11);
        let comps = components(&g, &core_mask(&g, 3));
        let peeled = peel_component(&g, &comps[0], 2.0, 8).unwrap();
        assert_eq!(peeled.0, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn loops_count_once() {
        let g = MultiGraph::with_edges(3, vec![(0, 0), (0, 1), (1, 2)]).unwrap();
        let mask = vec![true; 3];
        assert_eq!(spanned(&g, &[0, 1, 2], &mask), 3);
        assert_eq!(inner_degree(&g, 0, &mask), 2);
    }

    #[test]
    fn sparse_random_graphs_have_no_witness() {
        for s in 0..20 {
            let g = sample_configuration(500, 8, &mut stream_rng(s, 0)).unwrap().contract();
            let r = density_predicate(&g, DEFAULT_BOUND_C, default_size_cap(500, 8));
            assert!(r.witness.is_none());
            let (g, _) = planted(400, 4, 9, s);
            assert!(density_predicate(&g, DEFAULT_BOUND_C, default_size_cap(400, 4)).witness.is_none());
        }
    }
}
