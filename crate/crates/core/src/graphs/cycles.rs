use serde::{Deserialize, Serialize};

use super::MultiGraph;

/// Cycle counts `Ξ_1, …, Ξ_L`; `counts[j - 1]` holds the number of `j`-cycles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCensus {
    pub counts: Vec<u64>,
}

impl CycleCensus {
    pub fn get(&self, j: usize) -> u64 {
        self.counts[j - 1]
    }
}

/// Counts cycles of every length up to `max_len`.
///
/// 1-cycles are loops and 2-cycles are unordered pairs of parallel edges.
/// Longer cycles are enumerated as paths from their smallest vertex through
/// larger vertices only; each cycle is found once per direction and every
/// traversal is weighted by the product of the edge multiplicities it uses.
pub fn cycle_census(g: &MultiGraph, max_len: usize) -> CycleCensus {
    assert!(max_len >= 1, "max_len must be at least 1");
    let n = g.n();
    let mut simple: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
    let mut counts = vec![0u64; max_len];
    counts[0] = g.loop_count() as u64;
    let mut pairs: Vec<((usize, usize), usize)> = g.multiplicities().into_iter().collect();
    pairs.sort_unstable();
    for ((u, v), m) in pairs {
        if max_len >= 2 {
            counts[1] += (m * (m - 1) / 2) as u64;
        }
        simple[u].push((v, m as u64));
        simple[v].push((u, m as u64));
    }
    if max_len >= 3 {
        let mut on_path = vec![false; n];
        let mut per_len = vec![0u64; max_len + 1];
        for s in 0..n {
            on_path[s] = true;
            walk(&simple, s, s, 1, 1, max_len, &mut on_path, &mut per_len);
            on_path[s] = false;
        }
        for j in 3..=max_len {
            counts[j - 1] = per_len[j] / 2;
        }
    }
    CycleCensus { counts }
}

#[allow(clippy::too_many_arguments)]
fn walk(
    adj: &[Vec<(usize, u64)>],
    start: usize,
    at: usize,
    len: usize,
    weight: u64,
    max_len: usize,
    on_path: &mut [bool],
    per_len: &mut [u64],
) {
    for &(w, m) in &adj[at] {
        if w == start && len >= 3 {
            per_len[len] += weight * m;
        } else if w > start && !on_path[w] && len < max_len {
            on_path[w] = true;
            walk(adj, start, w, len + 1, weight * m, max_len, on_path, per_len);
            on_path[w] = false;
        }
    }
}
