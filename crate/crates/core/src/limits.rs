//! Feasibility limits for the exhaustive oracles, kept in one place.

use crate::error::{Error, Result};

/// Guard constants for every exhaustive routine in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest clone count `dn` accepted by configuration enumeration.
    pub enumerate_max_clones: usize,
    /// Largest `n` for exact coloring counts.
    pub count_max_n: usize,
    /// Largest `k` for exact coloring counts.
    pub count_max_k: usize,
    /// Largest `n` for counts that must visit every coloring (skewed and nice filters).
    pub visit_max_n: usize,
    /// Largest `n` for cluster, separability and niceness oracles.
    pub cluster_max_n: usize,
    /// Largest `k` for cluster, separability and niceness oracles.
    pub cluster_max_k: usize,
    /// Largest `dn` for exact partition probabilities.
    pub partition_max_clones: usize,
    /// Largest vertex count for exhaustive subset search in the density falsifier.
    pub density_exhaustive_n: usize,
}

pub const LIMITS: OracleLimits = OracleLimits {
    enumerate_max_clones: 16,
    count_max_n: 30,
    count_max_k: 4,
    visit_max_n: 18,
    cluster_max_n: 14,
    cluster_max_k: 4,
    partition_max_clones: 40,
    density_exhaustive_n: 12,
};

pub(crate) fn guard(what: &'static str, got: usize, limit: usize) -> Result<()> {
    if got > limit {
        Err(Error::GuardExceeded { what, limit, got })
    } else {
        Ok(())
    }
}
