//! Exact colouring counts.
//!
//! Pure counts run a dynamic program over a vertex order: the state is the
//! colouring of the current frontier (processed vertices that still have an
//! unprocessed neighbour) plus, when a class profile is prescribed, the class
//! sizes so far. Counts that must inspect every colouring use a backtracking
//! visitor with forward checking instead.

use std::collections::HashMap;

use crate::graphs::MultiGraph;

/// Vertex order: highest degree first, then repeatedly the vertex with the
/// most already-ordered neighbours (ties by degree, then index).
pub(crate) fn vertex_order(g: &MultiGraph) -> Vec<usize> {
    let n = g.n();
    let mut placed = vec![false; n];
    let mut links = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| (links[v], g.degree(v), std::cmp::Reverse(v)))
            .unwrap();
        placed[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if w != v {
                links[w] += 1;
            }
        }
    }
    order
}

/// Number of assignments `V → [colors]` such that `compat(a, b)` holds for
/// the colours at the ends of every edge, optionally with exactly
/// `target[c]` vertices of colour `c`.
pub(crate) fn frontier_count(
    g: &MultiGraph,
    colors: usize,
    compat: &dyn Fn(usize, usize) -> bool,
    target: Option<&[usize]>,
) -> u128 {
    let n = g.n();
    if let Some(t) = target {
        if t.iter().sum::<usize>() != n {
            return 0;
        }
    }
    let order = vertex_order(g);
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let last_use: Vec<usize> = (0..n)
        .map(|v| g.neighbors(v).iter().map(|&w| pos[w]).max().unwrap_or(0).max(pos[v]))
        .collect();

    let track = target.is_some();
    let mut frontier: Vec<usize> = Vec::new();
    let mut states: HashMap<Vec<u8>, u128> = HashMap::new();
    // key layout: [frontier colours..., class sizes...]
    let init = if track { vec![0u8; colors] } else { Vec::new() };
    states.insert(init, 1);

    for (t, &v) in order.iter().enumerate() {
        let has_loop = g.neighbors(v).iter().any(|&w| w == v);
        let back: Vec<usize> = frontier
            .iter()
            .enumerate()
            .filter(|(_, &u)| g.neighbors(v).contains(&u))
            .map(|(slot, _)| slot)
            .collect();
        let keep: Vec<usize> = (0..frontier.len())
            .filter(|&slot| last_use[frontier[slot]] > t)
            .collect();
        let v_stays = last_use[v] > t;
        let fw = frontier.len();

        let mut next: HashMap<Vec<u8>, u128> = HashMap::with_capacity(states.len());
        for (key, cnt) in &states {
            for c in 0..colors {
                if has_loop && !compat(c, c) {
                    continue;
                }
                if back.iter().any(|&slot| !compat(c, key[slot] as usize)) {
                    continue;
                }
                let mut nk = Vec::with_capacity(keep.len() + 1 + if track { colors } else { 0 });
                nk.extend(keep.iter().map(|&slot| key[slot]));
                if v_stays {
                    nk.push(c as u8);
                }
                if track {
                    let sizes = &key[fw..];
                    let t = target.unwrap();
                    if sizes[c] as usize + 1 > t[c] {
                        continue;
                    }
                    nk.extend_from_slice(sizes);
                    let l = nk.len();
                    nk[l - colors + c] += 1;
                }
                *next.entry(nk).or_insert(0) += *cnt;
            }
        }
        frontier = keep.iter().map(|&slot| frontier[slot]).collect();
        if v_stays {
            frontier.push(v);
        }
        states = next;
        if states.is_empty() {
            return 0;
        }
    }
    states.values().sum()
}

/// Inclusive per-colour size window for the backtracking visitor.
#[derive(Debug, Clone)]
pub(crate) struct SizeBounds {
    pub min: Vec<usize>,
    pub max: Vec<usize>,
}

impl SizeBounds {
    pub fn free(n: usize, k: usize) -> Self {
        SizeBounds {
            min: vec![0; k],
            max: vec![n; k],
        }
    }

    pub fn exact(sizes: &[usize]) -> Self {
        SizeBounds {
            min: sizes.to_vec(),
            max: sizes.to_vec(),
        }
    }
}

/// Calls `visit` on every proper `k`-colouring whose class sizes lie in
/// `bounds`. Stops early when `visit` returns `false`.
pub(crate) fn visit_colorings(
    g: &MultiGraph,
    k: usize,
    bounds: &SizeBounds,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) {
    let n = g.n();
    if g.loop_count() > 0 {
        return;
    }
    let order = vertex_order(g);
    let mut v = Visitor {
        g,
        k,
        order,
        bounds,
        colors: vec![usize::MAX; n],
        blocked: vec![0u32; n * k],
        sizes: vec![0; k],
        stop: false,
    };
    v.rec(0, visit);
}

struct Visitor<'a> {
    g: &'a MultiGraph,
    k: usize,
    order: Vec<usize>,
    bounds: &'a SizeBounds,
    colors: Vec<usize>,
    blocked: Vec<u32>,
    sizes: Vec<usize>,
    stop: bool,
}

impl Visitor<'_> {
    fn rec(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize]) -> bool) {
        if self.stop {
            return;
        }
        let n = self.order.len();
        if depth == n {
            if (0..self.k).all(|c| self.sizes[c] >= self.bounds.min[c]) && !visit(&self.colors) {
                self.stop = true;
            }
            return;
        }
        let remaining = n - depth;
        let deficit: usize = (0..self.k)
            .map(|c| self.bounds.min[c].saturating_sub(self.sizes[c]))
            .sum();
        if deficit > remaining {
            return;
        }
        let v = self.order[depth];
        let k = self.k;
        for c in 0..k {
            if self.blocked[v * k + c] > 0 || self.sizes[c] >= self.bounds.max[c] {
                continue;
            }
            self.colors[v] = c;
            self.sizes[c] += 1;
            let mut wiped = false;
            for &w in self.g.neighbors(v) {
                self.blocked[w * k + c] += 1;
                if self.colors[w] == usize::MAX
                    && (0..k).all(|x| self.blocked[w * k + x] > 0)
                {
                    wiped = true;
                }
            }
            if !wiped {
                self.rec(depth + 1, visit);
            }
            for &w in self.g.neighbors(v) {
                self.blocked[w * k + c] -= 1;
            }
            self.sizes[c] -= 1;
            self.colors[v] = usize::MAX;
            if self.stop {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::sample_configuration;
    use crate::rng::stream_rng;

    fn brute_force(g: &MultiGraph, k: usize, target: Option<&[usize]>) -> u128 {
        let n = g.n();
        let mut count = 0;
        let mut colors = vec![0usize; n];
        let total = (k as u64).pow(n as u32);
        for code in 0..total {
            let mut x = code;
            for c in colors.iter_mut() {
                *c = (x % k as u64) as usize;
                x /= k as u64;
            }
            if g.edges().iter().any(|&(u, v)| colors[u] == colors[v]) {
                continue;
            }
            if let Some(t) = target {
                let mut sizes = vec![0usize; k];
                for &c in &colors {
                    sizes[c] += 1;
                }
                if sizes != t {
                    continue;
                }
            }
            count += 1;
        }
        count
    }

    /// Chromatic polynomial by deletion–contraction on simple graphs.
    fn chromatic(n: usize, edges: &[(usize, usize)], k: i128) -> i128 {
        if edges.is_empty() {
            return k.pow(n as u32);
        }
        let (u, v) = edges[0];
        let deleted: Vec<(usize, usize)> = edges[1..].to_vec();
        // contract v into u, relabel the last vertex into v's slot
        let last = n - 1;
        let relabel = |x: usize| {
            let x = if x == v { u } else { x };
            if x == last { v } else { x }
        };
        let mut contracted: Vec<(usize, usize)> = Vec::new();
        for &(a, b) in &edges[1..] {
            let (a, b) = (relabel(a), relabel(b));
            let e = if a < b { (a, b) } else { (b, a) };
            if a != b && !contracted.contains(&e) {
                contracted.push(e);
            }
        }
        chromatic(n, &deleted, k) - chromatic(n - 1, &contracted, k)
    }

    #[test]
    fn frontier_matches_brute_force() {
        let ne = |a: usize, b: usize| a != b;
        for s in 0..40 {
            let n = 6 + (s as usize % 3) * 2;
            let g = sample_configuration(n, 3, &mut stream_rng(s, 0)).unwrap().contract();
            for k in 2..=4 {
                assert_eq!(frontier_count(&g, k, &ne, None), brute_force(&g, k, None));
                if n % k == 0 {
                    let t = vec![n / k; k];
                    assert_eq!(
                        frontier_count(&g, k, &ne, Some(&t)),
                        brute_force(&g, k, Some(&t))
                    );
                }
            }
        }
    }

    #[test]
    fn visitor_matches_frontier() {
        let ne = |a: usize, b: usize| a != b;
        for s in 0..40 {
            let g = sample_configuration(10, 3, &mut stream_rng(s, 1)).unwrap().contract();
            for k in 2..=4 {
                let mut seen = 0u128;
                visit_colorings(&g, k, &SizeBounds::free(10, k), &mut |_| {
                    seen += 1;
                    true
                });
                assert_eq!(seen, frontier_count(&g, k, &ne, None));
            }
        }
    }

    #[test]
    fn chromatic_polynomial_agreement() {
        let ne = |a: usize, b: usize| a != b;
        let graphs: Vec<(usize, Vec<(usize, usize)>)> = vec![
            (4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]),
            (4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
            (5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (1, 3), (2, 4)]),
            (6, vec![(0, 1), (1, 2), (2, 0), (3, 4), (4, 5)]),
            (5, vec![(0, 1), (0, 2), (0, 3), (0, 4)]),
        ];
        for (n, edges) in graphs {
            assert!(edges.len() <= 8);
            let g = MultiGraph::with_edges(n, edges.clone()).unwrap();
            for k in 1..=4 {
                assert_eq!(
                    frontier_count(&g, k, &ne, None) as i128,
                    chromatic(n, &edges, k as i128),
                    "n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn loops_kill_every_coloring() {
        let ne = |a: usize, b: usize| a != b;
        let g = MultiGraph::new(2, 2, vec![(0, 0), (1, 1)]).unwrap();
        assert_eq!(frontier_count(&g, 3, &ne, None), 0);
        let mut seen = 0;
        visit_colorings(&g, 3, &SizeBounds::free(2, 3), &mut |_| {
            seen += 1;
            true
        });
        assert_eq!(seen, 0);
    }
}
