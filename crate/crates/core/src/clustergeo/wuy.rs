//! Sets `W`, `U`, `U′` and `Y` whose complement lies inside the core.
//!
//! For a vertex `v` of colour `i`, write `e(v, S)` for its edge count into
//! `S`. Then
//!
//! * `W_ij`: `e(v, V_j) < 3ℓ` and `e(v, V_h) < 2ℓ ln k` for every `h` (`j ≠ i`);
//! * `U_ij`: `v ∉ W` with `e(v, W_j) > ℓ`;
//! * `U′_ij`: `v ∉ W` with `e(v, V_j) > 2ℓ ln k`;
//! * `Y`: start from `U ∪ U′` and repeatedly add the smallest vertex outside
//!   with more than `ℓ` edges into the current set.
//!
//! Every `v ∉ W ∪ Y` then keeps at least `3ℓ − ℓ − ℓ` edges into each other
//! class after removing `W ∪ Y`, so `V ∖ (W ∪ Y)` lies in the `ℓ`-core.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{check_pair, sigma_ell_core, CoreResult};
use crate::colorings::Coloring;
use crate::error::Result;
use crate::graphs::MultiGraph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WuySets {
    pub k: usize,
    pub ell: usize,
    /// `3ℓ`.
    pub three_ell: usize,
    /// `2ℓ ln k`.
    pub two_ell_ln_k: f64,
    /// `W_ij` flattened as `i * k + j`; diagonal entries are empty.
    pub w_ij: Vec<Vec<usize>>,
    pub w: Vec<usize>,
    pub u: Vec<usize>,
    pub u_prime: Vec<usize>,
    pub y: Vec<usize>,
    /// Vertices in the order they joined `Y` after `U ∪ U′`.
    pub y_additions: Vec<usize>,
}

impl WuySets {
    pub fn w_of(&self, i: usize, j: usize) -> &[usize] {
        &self.w_ij[i * self.k + j]
    }

    /// `V ∖ (W ∪ Y)` as a mask.
    pub fn remainder_mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![true; n];
        for &v in self.w.iter().chain(&self.y) {
            m[v] = false;
        }
        m
    }
}

fn mask_to_vec(m: &[bool]) -> Vec<usize> {
    (0..m.len()).filter(|&v| m[v]).collect()
}

pub fn build_wuy(g: &MultiGraph, sigma: &Coloring, ell: usize) -> Result<WuySets> {
    check_pair(g, sigma)?;
    let (n, k) = (g.n(), sigma.k());
    let two_ell_ln_k = 2.0 * ell as f64 * (k as f64).ln();
    let three_ell = 3 * ell;
    let deg = g.class_degrees(sigma.colors(), k);
    let row = |v: usize| &deg[v * k..(v + 1) * k];

    let mut w_ij = vec![Vec::new(); k * k];
    let mut in_w = vec![false; n];
    for v in 0..n {
        let i = sigma.color(v);
        let r = row(v);
        if !r.iter().all(|&e| (e as f64) < two_ell_ln_k) {
            continue;
        }
        for j in (0..k).filter(|&j| j != i && r[j] < three_ell) {
            w_ij[i * k + j].push(v);
            in_w[v] = true;
        }
    }

    let mut in_y = vec![false; n];
    let mut in_u = vec![false; n];
    let mut in_u_prime = vec![false; n];
    for v in (0..n).filter(|&v| !in_w[v]) {
        let i = sigma.color(v);
        let mut into_w = vec![0usize; k];
        for &x in g.neighbors(v) {
            if in_w[x] {
                into_w[sigma.color(x)] += 1;
            }
        }
        let r = row(v);
        for j in (0..k).filter(|&j| j != i) {
            in_u[v] |= into_w[j] > ell;
            in_u_prime[v] |= r[j] as f64 > two_ell_ln_k;
        }
        in_y[v] = in_u[v] || in_u_prime[v];
    }

    // Edge counts into Y only grow, so a vertex stays eligible once it is;
    // a min-heap then yields the smallest eligible vertex at each step.
    let mut into_y = vec![0usize; n];
    let mut heap = BinaryHeap::new();
    let mut pushed = vec![false; n];
    for v in (0..n).filter(|&v| in_y[v]) {
        for &x in g.neighbors(v) {
            into_y[x] += 1;
        }
    }
    for v in (0..n).filter(|&v| !in_y[v] && into_y[v] > ell) {
        pushed[v] = true;
        heap.push(Reverse(v));
    }
    let mut y_additions = Vec::new();
    while let Some(Reverse(v)) = heap.pop() {
        in_y[v] = true;
        y_additions.push(v);
        for &x in g.neighbors(v) {
            into_y[x] += 1;
            if !in_y[x] && !pushed[x] && into_y[x] > ell {
                pushed[x] = true;
                heap.push(Reverse(x));
            }
        }
    }

    Ok(WuySets {
        k,
        ell,
        three_ell,
        two_ell_ln_k,
        w_ij,
        w: mask_to_vec(&in_w),
        u: mask_to_vec(&in_u),
        u_prime: mask_to_vec(&in_u_prime),
        y: mask_to_vec(&in_y),
        y_additions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub holds: bool,
    /// A vertex of `V ∖ (W ∪ Y)` outside the core, if any.
    pub witness: Option<usize>,
    pub remainder_size: usize,
    pub core_size: usize,
}

/// Checks `V ∖ (W ∪ Y) ⊆ (σ,ℓ)-core`. A failure is an implementation bug:
/// the inclusion follows deterministically from the definitions.
pub fn check_core_inclusion(g: &MultiGraph, sigma: &Coloring, ell: usize) -> Result<InclusionReport> {
    let sets = build_wuy(g, sigma, ell)?;
    let core = sigma_ell_core(g, sigma, ell)?;
    Ok(inclusion_of(&sets, &core, g.n()))
}

pub(crate) fn inclusion_of(sets: &WuySets, core: &CoreResult, n: usize) -> InclusionReport {
    let rem = sets.remainder_mask(n);
    let witness = (0..n).find(|&v| rem[v] && !core.in_core[v]);
    InclusionReport {
        holds: witness.is_none(),
        witness,
        remainder_size: rem.iter().filter(|&&b| b).count(),
        core_size: core.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustergeo::tests::planted;
    use crate::rng::stream_rng;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;

    fn brute_y(g: &MultiGraph, start: &[bool], ell: usize) -> Vec<usize> {
        let mut y = start.to_vec();
        loop {
            let next = (0..g.n()).find(|&v| !y[v] && g.edges_into(v, &y) > ell);
            match next {
                Some(v) => y[v] = true,
                None => return mask_to_vec(&y),
            }
        }
    }

    #[test]
    fn rich_graph_has_empty_sets() {
        // Complete 5-partite graph with parts of size 3, ℓ = 1: three edges
        // into each other class, 3ℓ = 3 and 2 ln 5 ≈ 3.22.
        let sigma = Coloring::blocks(15, 5).unwrap();
        let mut edges = Vec::new();
        for u in 0..15 {
            for v in u + 1..15 {
                if sigma.color(u) != sigma.color(v) {
                    edges.push((u, v));
                }
            }
        }
        let g = MultiGraph::with_edges(15, edges).unwrap();
        let s = build_wuy(&g, &sigma, 1).unwrap();
        assert_eq!(s.three_ell, 3);
        assert!(s.w.is_empty() && s.u.is_empty() && s.u_prime.is_empty() && s.y.is_empty());
        let r = check_core_inclusion(&g, &sigma, 1).unwrap();
        assert!(r.holds);
        assert_eq!((r.remainder_size, r.core_size), (15, 15));
    }

    #[test]
    fn hand_built_u_prime() {
        // k = 2, ℓ = 1: 2 ln 2 ≈ 1.386 and 3ℓ = 3. Colours 0,0,0,1,1,1.
        // Vertices 0 and 5 have two edges into the other class, the rest one.
        let sigma = Coloring::blocks(6, 2).unwrap();
        let g = MultiGraph::with_edges(6, vec![(0, 3), (0, 4), (1, 5), (2, 5)]).unwrap();
        let s = build_wuy(&g, &sigma, 1).unwrap();
        assert_eq!(s.u_prime, vec![0, 5]);
        assert_eq!(s.w, vec![1, 2, 3, 4]);
        assert_eq!(s.w_of(0, 1), &[1, 2]);
        assert_eq!(s.w_of(1, 0), &[3, 4]);
        assert!(s.w_of(0, 0).is_empty());
        // 0 and 5 each send two edges into W.
        assert_eq!(s.u, vec![0, 5]);
        assert_eq!(s.y, vec![0, 5]);
        assert!(s.y_additions.is_empty());
    }

    #[test]
    fn y_grows_by_smallest_vertex() {
        // k = 3, ℓ = 1, 2 ln 3 ≈ 2.20. The triple edge puts 0 and 1 in U′;
        // 2 then has two edges into Y, and after it joins so does 3.
        let sigma = Coloring::new(vec![0, 1, 2, 0, 1], 3).unwrap();
        let edges = vec![(0, 1), (0, 1), (0, 1), (0, 2), (1, 2), (2, 3), (1, 3), (3, 4)];
        let g = MultiGraph::with_edges(5, edges).unwrap();
        let s = build_wuy(&g, &sigma, 1).unwrap();
        assert_eq!(s.u_prime, vec![0, 1]);
        assert!(s.u.is_empty());
        assert_eq!(s.w, vec![2, 3, 4]);
        assert_eq!(s.y_additions, vec![2, 3]);
        assert_eq!(s.y, vec![0, 1, 2, 3]);
    }

    #[test]
    fn y_matches_brute_force_fixpoint() {
        for s in 0..30 {
            let (g, sigma) = planted(200, 4, 8, s);
            for ell in 1..4 {
                let sets = build_wuy(&g, &sigma, ell).unwrap();
                let mut start = vec![false; 200];
                for &v in sets.u.iter().chain(&sets.u_prime) {
                    start[v] = true;
                }
                assert_eq!(sets.y, brute_y(&g, &start, ell));
                assert_eq!(build_wuy(&g, &sigma, ell).unwrap(), sets);
            }
        }
    }

    #[test]
    fn inclusion_on_planted_instances() {
        for s in 0..40 {
            let k = 4 + 2 * (s as usize % 3);
            let (g, sigma) = planted(400, k, [8, 18, 29][s as usize % 3], s);
            for ell in 1..=3 {
                let r = check_core_inclusion(&g, &sigma, ell).unwrap();
                assert!(r.holds, "seed {s} ℓ={ell}: {:?}", r.witness);
            }
        }
    }

    #[test]
    fn inclusion_with_large_w() {
        // Sparse planted graphs put most vertices in W.
        for s in 0..40 {
            let (g, sigma) = planted(300, 5, 4, s);
            let sets = build_wuy(&g, &sigma, 2).unwrap();
            assert!(sets.w.len() > 200);
            assert!(check_core_inclusion(&g, &sigma, 2).unwrap().holds);
        }
    }

    proptest! {
        #[test]
        fn relabelling_is_equivariant(seed in 0u64..200, ell in 1usize..4) {
            let (g, sigma) = planted(90, 3, 6, seed);
            let mut perm: Vec<usize> = (0..90).collect();
            perm.shuffle(&mut stream_rng(seed, 1));
            let edges = g.edges().iter().map(|&(u, v)| (perm[u], perm[v])).collect();
            let h = MultiGraph::with_edges(90, edges).unwrap();
            let mut colors = vec![0; 90];
            for v in 0..90 {
                colors[perm[v]] = sigma.color(v);
            }
            let tau = Coloring::new(colors, 3).unwrap();
            let a = build_wuy(&g, &sigma, ell).unwrap();
            let b = build_wuy(&h, &tau, ell).unwrap();
            let back = |set: &[usize]| {
                let mut s: Vec<usize> = set.iter().map(|&v| perm[v]).collect();
                s.sort_unstable();
                s
            };
            prop_assert_eq!(back(&a.w), b.w);
            prop_assert_eq!(back(&a.u), b.u);
            prop_assert_eq!(back(&a.u_prime), b.u_prime);
            prop_assert_eq!(back(&a.y), b.y);
        }
    }
}
