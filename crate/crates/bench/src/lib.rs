//! Fixed inputs shared by the benchmarks.

use regcolor_core::graphs::{sample_configuration, sample_planted_round_robin};
use regcolor_core::{stream_rng, Coloring, MultiGraph};

pub const SEED: u64 = 0x5eed;

/// Configuration-model graph on `n` vertices of degree `d`.
pub fn uniform_graph(n: usize, d: usize) -> MultiGraph {
    let mut rng = stream_rng(SEED, 0);
    sample_configuration(n, d, &mut rng).expect("dn even").contract()
}

/// Planted instance for the round-robin colouring.
pub fn planted(n: usize, k: usize, d: usize) -> (MultiGraph, Coloring) {
    let mut rng = stream_rng(SEED, 1);
    let (g, sigma, _) = sample_planted_round_robin(n, k, d, &mut rng).expect("feasible planted instance");
    (g, sigma)
}
