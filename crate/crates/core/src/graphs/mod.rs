/*!
Configuration model, contracted multigraphs and structural queries.

A configuration on `n` vertices of degree `d` is a perfect matching of the
`dn` clones `(v, p)`, stored as a flat involution over clone indices
`v * d + p`. Contracting the clones of each vertex yields a `d`-regular
multigraph in which loops and parallel edges may appear.

Edge counts `e(A, B)` are taken at clone level: every clone of a vertex in
`A` whose partner belongs to a vertex in `B` contributes one. A loop thus adds
two to `e({v}, {v})`, and `e(V, V) = dn`.
*/

mod cycles;
mod enumerate;
pub mod io;
mod planted;

pub use cycles::{cycle_census, CycleCensus};
pub use enumerate::{enumerate_configurations, ConfigurationIter};
pub use planted::{
    near_uniform_edge_counts, sample_planted, sample_planted_configuration,
    sample_planted_round_robin, uniform_edge_counts,
};

use std::collections::HashMap;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Half-edge `port` of `vertex`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CloneId {
    pub vertex: usize,
    pub port: usize,
}

/// Perfect matching of the `dn` clones.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    n: usize,
    d: usize,
    matching: Vec<u32>,
}

impl Configuration {
    /// Builds a configuration from its involution, checking that it is a
    /// fixed-point-free involution on `dn` clones.
    pub fn new(n: usize, d: usize, matching: Vec<u32>) -> Result<Self> {
        check_even(n, d)?;
        if matching.len() != n * d {
            return Err(Error::DimensionMismatch(format!(
                "matching has {} entries, expected {}",
                matching.len(),
                n * d
            )));
        }
        let c = Configuration { n, d, matching };
        if !c.is_valid() {
            return Err(Error::InvalidInput(
                "matching is not a fixed-point-free involution".into(),
            ));
        }
        Ok(c)
    }

    pub(crate) fn from_raw(n: usize, d: usize, matching: Vec<u32>) -> Self {
        debug_assert_eq!(matching.len(), n * d);
        Configuration { n, d, matching }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn clone_count(&self) -> usize {
        self.matching.len()
    }

    pub fn matching(&self) -> &[u32] {
        &self.matching
    }

    pub fn clone_index(&self, c: CloneId) -> usize {
        c.vertex * self.d + c.port
    }

    pub fn clone_id(&self, idx: usize) -> CloneId {
        CloneId {
            vertex: idx / self.d,
            port: idx % self.d,
        }
    }

    pub fn partner(&self, c: CloneId) -> CloneId {
        self.clone_id(self.matching[self.clone_index(c)] as usize)
    }

    /// True iff the matching is an involution without fixed points.
    pub fn is_valid(&self) -> bool {
        let m = self.matching.len();
        self.matching.iter().enumerate().all(|(c, &p)| {
            let p = p as usize;
            p < m && p != c && self.matching[p] as usize == c
        })
    }

    /// The contracted multigraph.
    pub fn contract(&self) -> MultiGraph {
        let mut edges = Vec::with_capacity(self.matching.len() / 2);
        for (c, &p) in self.matching.iter().enumerate() {
            let p = p as usize;
            if c < p {
                edges.push((c / self.d, p / self.d));
            }
        }
        MultiGraph::build(self.n, self.d, edges)
    }
}

pub(crate) fn check_even(n: usize, d: usize) -> Result<()> {
    if (n * d) % 2 == 1 {
        Err(Error::OddCloneCount { n, d })
    } else {
        Ok(())
    }
}

/// Number of configurations, `(dn − 1)!!`.
pub fn count_configurations(n: usize, d: usize) -> Result<BigUint> {
    check_even(n, d)?;
    Ok(double_factorial_odd(n * d))
}

/// Number of perfect matchings of `m` items: `(m − 1)!!` for even `m`, zero
/// for odd `m`.
pub fn perfect_matchings(m: usize) -> BigUint {
    if m % 2 == 1 {
        BigUint::from(0u32)
    } else {
        double_factorial_odd(m)
    }
}

fn double_factorial_odd(m: usize) -> BigUint {
    let mut acc = BigUint::from(1u32);
    let mut j = 1;
    while j + 1 <= m {
        acc *= j as u64;
        j += 2;
    }
    acc
}

/// A uniformly random configuration (shuffle the clones, pair neighbours).
pub fn sample_configuration<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Configuration> {
    check_even(n, d)?;
    let m = n * d;
    let mut perm: Vec<u32> = (0..m as u32).collect();
    perm.shuffle(rng);
    let mut matching = vec![0u32; m];
    for pair in perm.chunks_exact(2) {
        matching[pair[0] as usize] = pair[1];
        matching[pair[1] as usize] = pair[0];
    }
    Ok(Configuration::from_raw(n, d, matching))
}

/// Multigraph with loops and parallel edges.
///
/// Graphs built from configurations are `d`-regular; [`MultiGraph::with_edges`]
/// also admits synthetic irregular inputs, in which case `d` is the maximum
/// degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    d: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl MultiGraph {
    /// A `d`-regular multigraph; fails if some degree differs from `d`.
    pub fn new(n: usize, d: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        check_vertices(n, &edges)?;
        let g = MultiGraph::build(n, d, edges);
        if let Some(v) = (0..n).find(|&v| g.degree(v) != d) {
            return Err(Error::InvalidInput(format!(
                "vertex {v} has degree {}, expected {d}",
                g.degree(v)
            )));
        }
        Ok(g)
    }

    /// A multigraph with arbitrary degrees.
    pub fn with_edges(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        check_vertices(n, &edges)?;
        let mut deg = vec![0usize; n];
        for &(u, v) in &edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let d = deg.iter().copied().max().unwrap_or(0);
        Ok(MultiGraph::build(n, d, edges))
    }

    fn build(n: usize, d: usize, edges: Vec<(usize, usize)>) -> Self {
        let edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| if u <= v { (u, v) } else { (v, u) })
            .collect();
        let mut adj = vec![Vec::with_capacity(d); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        MultiGraph { n, d, edges, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Edges as `(u, v)` with `u <= v`, in construction order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbours of `v`, one entry per clone (a loop appears twice).
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn is_regular(&self) -> bool {
        (0..self.n).all(|v| self.degree(v) == self.d)
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(u, v)| u == v).count()
    }

    /// Multiplicities of the non-loop vertex pairs.
    pub fn multiplicities(&self) -> HashMap<(usize, usize), usize> {
        let mut m = HashMap::new();
        for &(u, v) in &self.edges {
            if u != v {
                *m.entry((u, v)).or_insert(0) += 1;
            }
        }
        m
    }

    /// True iff there is neither a loop nor a parallel edge.
    pub fn is_simple(&self) -> bool {
        self.loop_count() == 0 && self.multiplicities().values().all(|&c| c == 1)
    }

    /// Clone-level edge count `e(A, B)`.
    pub fn edge_count_between(&self, a: &[usize], b: &[usize]) -> usize {
        let in_b = self.membership(b);
        let in_a = self.membership(a);
        (0..self.n)
            .filter(|&v| in_a[v])
            .map(|v| self.adj[v].iter().filter(|&&w| in_b[w]).count())
            .sum()
    }

    /// Number of clones of `v` whose partner lies in the set marked by `mask`.
    pub fn edges_into(&self, v: usize, mask: &[bool]) -> usize {
        self.adj[v].iter().filter(|&&w| mask[w]).count()
    }

    /// Per-vertex counts `e(v, σ⁻¹(i))` for every colour `i`, flattened as
    /// `v * k + i`.
    pub fn class_degrees(&self, colors: &[usize], k: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.n * k];
        for v in 0..self.n {
            for &w in &self.adj[v] {
                out[v * k + colors[w]] += 1;
            }
        }
        out
    }

    /// Matrix of clone-level counts `e(σ⁻¹(i), σ⁻¹(j))`.
    pub fn class_edge_counts(&self, colors: &[usize], k: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![0usize; k]; k];
        for v in 0..self.n {
            for &w in &self.adj[v] {
                out[colors[v]][colors[w]] += 1;
            }
        }
        out
    }

    fn membership(&self, set: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for &v in set {
            mask[v] = true;
        }
        mask
    }
}

fn check_vertices(n: usize, edges: &[(usize, usize)]) -> Result<()> {
    match edges.iter().find(|&&(u, v)| u >= n || v >= n) {
        Some(&(u, v)) => Err(Error::InvalidInput(format!(
            "edge ({u},{v}) references a vertex outside 0..{n}"
        ))),
        None => Ok(()),
    }
}
