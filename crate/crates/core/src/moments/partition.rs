//! Partition identities of the configuration model.
//!
//! Fix a partition `V_1, …, V_K` of the vertices with `|V_i| = ρ_i n`. The
//! number of configurations with exactly `M_ij = μ_ij·dn` clones of `V_i`
//! matched into `V_j` is `N_μ·M_μ`, where `N_μ` splits the clones of every
//! class into labelled blocks and `M_μ` matches the blocks: a bijection for
//! every pair `i < j` and a perfect matching inside every diagonal block.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::info::{entropy_of, kl_of};
use crate::error::{Error, Result, Violation};
use crate::graphs::{count_configurations, perfect_matchings};
use crate::limits::{guard, LIMITS};

const FLOAT_TOL: f64 = 1e-9;

/// Class sizes and clone counts of a `(d, n)`-admissible pair.
///
/// `sizes[i] = ρ_i·n`, `edges[i][j] = μ_ij·dn`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdmissiblePair {
    n: u64,
    d: u64,
    sizes: Vec<u64>,
    edges: Vec<Vec<u64>>,
}

impl AdmissiblePair {
    /// Builds a pair from integer data, listing every violated constraint.
    pub fn from_counts(n: u64, d: u64, sizes: Vec<u64>, edges: Vec<Vec<u64>>) -> Result<Self> {
        let k = sizes.len();
        if k == 0 || edges.len() != k || edges.iter().any(|r| r.len() != k) {
            return Err(Error::Inadmissible(vec![Violation::Dimension]));
        }
        let mut bad = Vec::new();
        if sizes.iter().sum::<u64>() != n {
            bad.push(Violation::NotDistribution);
        }
        for i in 0..k {
            for j in (i + 1)..k {
                if edges[i][j] != edges[j][i] {
                    bad.push(Violation::Symmetry(i, j));
                }
            }
        }
        for i in 0..k {
            if edges[i].iter().sum::<u64>() != d * sizes[i] {
                bad.push(Violation::RowMarginal(i));
            }
            if (0..k).map(|j| edges[j][i]).sum::<u64>() != d * sizes[i] {
                bad.push(Violation::ColumnMarginal(i));
            }
        }
        if bad.is_empty() {
            Ok(AdmissiblePair { n, d, sizes, edges })
        } else {
            Err(Error::Inadmissible(bad))
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn edges(&self) -> &[Vec<u64>] {
        &self.edges
    }

    pub fn rho(&self) -> Vec<f64> {
        self.sizes.iter().map(|&s| s as f64 / self.n as f64).collect()
    }

    /// `μ` flattened row-major.
    pub fn mu(&self) -> Vec<f64> {
        let dn = (self.d * self.n) as f64;
        self.edges.iter().flatten().map(|&m| m as f64 / dn).collect()
    }

    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.k()).all(|i| self.edges[i][i] == 0)
    }
}

/// Checks `(ρ, μ)` against symmetry, both marginals and integrality of `ρ_i n`
/// and `μ_ij dn`.
pub fn validate_admissible(rho: &[f64], mu: &[Vec<f64>], n: u64, d: u64) -> Result<AdmissiblePair> {
    let k = rho.len();
    if k == 0 || mu.len() != k || mu.iter().any(|r| r.len() != k) {
        return Err(Error::Inadmissible(vec![Violation::Dimension]));
    }
    let mut bad = Vec::new();
    let dn = (d * n) as f64;
    for i in 0..k {
        for j in 0..k {
            if mu[i][j] < 0.0 {
                bad.push(Violation::Negative(i, j));
            }
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            if (mu[i][j] - mu[j][i]).abs() > FLOAT_TOL {
                bad.push(Violation::Symmetry(i, j));
            }
        }
    }
    for i in 0..k {
        if (mu[i].iter().sum::<f64>() - rho[i]).abs() > FLOAT_TOL {
            bad.push(Violation::RowMarginal(i));
        }
        if ((0..k).map(|j| mu[j][i]).sum::<f64>() - rho[i]).abs() > FLOAT_TOL {
            bad.push(Violation::ColumnMarginal(i));
        }
    }
    if (rho.iter().sum::<f64>() - 1.0).abs() > FLOAT_TOL {
        bad.push(Violation::NotDistribution);
    }
    let integral = |x: f64| (x - x.round()).abs() <= FLOAT_TOL * x.abs().max(1.0);
    for i in 0..k {
        if !integral(rho[i] * n as f64) {
            bad.push(Violation::IntegralityRho(i));
        }
    }
    for i in 0..k {
        for j in 0..k {
            if !integral(mu[i][j] * dn) {
                bad.push(Violation::IntegralityMu(i, j));
            }
        }
    }
    if !bad.is_empty() {
        return Err(Error::Inadmissible(bad));
    }
    let sizes = rho.iter().map(|&r| (r * n as f64).round() as u64).collect();
    let edges = mu
        .iter()
        .map(|r| r.iter().map(|&m| (m * dn).round() as u64).collect())
        .collect();
    AdmissiblePair::from_counts(n, d, sizes, edges)
}

fn factorial(m: u64) -> BigUint {
    (1..=m).fold(BigUint::one(), |acc, x| acc * x)
}

/// `P[e(V_i, V_j) = μ_ij·dn for all i, j] = N_μ·M_μ/(dn − 1)!!`, exactly.
///
/// A diagonal block of odd size admits no perfect matching and makes the
/// probability zero.
pub fn exact_partition_probability(pair: &AdmissiblePair) -> Result<BigRational> {
    let dn = (pair.d * pair.n) as usize;
    guard("clone count dn for exact partitions", dn, LIMITS.partition_max_clones)?;
    let total = count_configurations(pair.n as usize, pair.d as usize)?;
    let k = pair.k();
    let mut num = BigUint::one();
    for i in 0..k {
        num *= factorial(pair.d * pair.sizes[i]);
        for j in 0..k {
            num /= factorial(pair.edges[i][j]);
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            num *= factorial(pair.edges[i][j]);
        }
        num *= perfect_matchings(pair.edges[i][i] as usize);
    }
    Ok(BigRational::new(num.into(), total.into()))
}

/// Every admissible clone-count matrix for the given class sizes.
pub fn admissible_edge_matrices(sizes: &[u64], d: u64) -> Vec<Vec<Vec<u64>>> {
    let k = sizes.len();
    let mut out = Vec::new();
    let mut m = vec![vec![0u64; k]; k];
    let mut residual: Vec<u64> = sizes.iter().map(|&s| s * d).collect();
    fill(0, 0, k, &mut m, &mut residual, &mut out);
    out
}

fn fill(
    i: usize,
    j: usize,
    k: usize,
    m: &mut Vec<Vec<u64>>,
    residual: &mut Vec<u64>,
    out: &mut Vec<Vec<Vec<u64>>>,
) {
    if i == k {
        out.push(m.clone());
        return;
    }
    if j == k {
        if residual[i] == 0 {
            fill(i + 1, i + 1, k, m, residual, out);
        }
        return;
    }
    if i == j {
        // the diagonal takes clones from one row only
        for x in 0..=residual[i] {
            m[i][i] = x;
            residual[i] -= x;
            fill(i, j + 1, k, m, residual, out);
            residual[i] += x;
        }
        m[i][i] = 0;
        return;
    }
    if j == k - 1 {
        // the last entry of row i is forced
        let x = residual[i];
        if x <= residual[j] {
            m[i][j] = x;
            m[j][i] = x;
            residual[i] -= x;
            residual[j] -= x;
            fill(i, j + 1, k, m, residual, out);
            residual[i] += x;
            residual[j] += x;
        }
        m[i][j] = 0;
        m[j][i] = 0;
        return;
    }
    let cap = residual[i].min(residual[j]);
    for x in 0..=cap {
        m[i][j] = x;
        m[j][i] = x;
        residual[i] -= x;
        residual[j] -= x;
        fill(i, j + 1, k, m, residual, out);
        residual[i] += x;
        residual[j] += x;
    }
    m[i][j] = 0;
    m[j][i] = 0;
}

/// Leading-order rate `−(d/2)·KL(μ ‖ ρ⊗ρ)` of `(1/n) ln P`.
pub fn log_partition_probability(pair: &AdmissiblePair) -> f64 {
    let rho = pair.rho();
    let product: Vec<f64> = rho
        .iter()
        .flat_map(|&a| rho.iter().map(move |&b| a * b))
        .collect();
    let kl = kl_of(&pair.mu(), &product).expect("admissible μ is supported on ρ⊗ρ");
    -(pair.d as f64 / 2.0) * kl
}

/// `H(ρ) − (d/2)·KL(μ ‖ ρ⊗ρ)`.
pub fn log_expected_partitions(pair: &AdmissiblePair) -> f64 {
    entropy_of(&pair.rho()) + log_partition_probability(pair)
}

/// `H(ρ) + (d/2) ln(1 − ‖ρ‖²) − (d/2)·KL(μ ‖ ρ̂)` for pairs with zero diagonal,
/// where `ρ̂_ij = 1{i≠j} ρ_i ρ_j / (1 − ‖ρ‖²)`.
pub fn log_expected_partitions_offdiag(pair: &AdmissiblePair) -> Result<f64> {
    if let Some(i) = (0..pair.k()).find(|&i| pair.edges[i][i] != 0) {
        return Err(Error::Inadmissible(vec![Violation::DiagonalNonZero(i)]));
    }
    let rho = pair.rho();
    let k = rho.len();
    let norm: f64 = rho.iter().map(|r| r * r).sum();
    let hat: Vec<f64> = (0..k * k)
        .map(|x| {
            let (i, j) = (x / k, x % k);
            if i == j {
                0.0
            } else {
                rho[i] * rho[j] / (1.0 - norm)
            }
        })
        .collect();
    let d = pair.d as f64;
    let kl = kl_of(&pair.mu(), &hat)?;
    Ok(entropy_of(&rho) + d / 2.0 * (1.0 - norm).ln() - d / 2.0 * kl)
}

fn multinomial(n: u64, parts: &[u64]) -> BigUint {
    let mut r = factorial(n);
    for &p in parts {
        r /= factorial(p);
    }
    r
}

fn compositions(n: u64, k: usize) -> Vec<Vec<u64>> {
    if k == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Exact expected number of proper `k`-colourings (maps `V → [k]` without
/// monochromatic edges) of the random configuration, by linearity of
/// expectation over class-size profiles. With `profile` only colourings of
/// that class profile are counted.
pub fn expected_proper_colorings(n: u64, d: u64, k: usize, profile: Option<&[u64]>) -> Result<BigRational> {
    guard("clone count dn for exact partitions", (n * d) as usize, LIMITS.partition_max_clones)?;
    let profiles = match profile {
        Some(p) => vec![p.to_vec()],
        None => compositions(n, k),
    };
    let mut total = BigRational::zero();
    for sizes in profiles {
        if sizes.len() != k || sizes.iter().sum::<u64>() != n {
            return Err(Error::InvalidInput("profile must have k parts summing to n".into()));
        }
        let mut p = BigRational::zero();
        for edges in admissible_edge_matrices(&sizes, d) {
            if (0..k).any(|i| edges[i][i] != 0) {
                continue;
            }
            let pair = AdmissiblePair::from_counts(n, d, sizes.clone(), edges)?;
            p += exact_partition_probability(&pair)?;
        }
        total += p * BigRational::from_integer(multinomial(n, &sizes).into());
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::enumerate_configurations;
    use num_traits::ToPrimitive;
    use std::collections::HashMap;

    fn ratio(a: u64, b: u64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn validation_examples() {
        let ok = validate_admissible(&[0.5, 0.5], &[vec![0.0, 0.5], vec![0.5, 0.0]], 4, 2).unwrap();
        assert_eq!(ok.edges(), &[vec![0, 4], vec![4, 0]]);
        let err = validate_admissible(&[0.5, 0.5], &[vec![0.1, 0.4], vec![0.5, 0.0]], 4, 2)
            .unwrap_err()
            .to_string();
        assert!(err.contains("symmetry (1,2)"), "{err}");
        let err = validate_admissible(&[0.375, 0.625], &[vec![0.0, 0.375], vec![0.375, 0.25]], 4, 2)
            .unwrap_err()
            .to_string();
        assert!(err.contains("integrality ρ_1"), "{err}");
    }

    #[test]
    fn trivial_partition_has_probability_one() {
        let pair = AdmissiblePair::from_counts(4, 3, vec![4], vec![vec![12]]).unwrap();
        assert_eq!(exact_partition_probability(&pair).unwrap(), BigRational::one());
    }

    #[test]
    fn two_crossing_edges_on_four_clones() {
        // n=4, d=1: classes {0,1}, {2,3}. Of the 3 matchings, 2 cross.
        let pair = AdmissiblePair::from_counts(4, 1, vec![2, 2], vec![vec![0, 2], vec![2, 0]]).unwrap();
        let formula = exact_partition_probability(&pair).unwrap();
        let hits = enumerate_configurations(4, 1)
            .unwrap()
            .filter(|c| {
                let g = c.contract();
                g.edge_count_between(&[0, 1], &[2, 3]) == 2
            })
            .count();
        assert_eq!(hits, 2);
        assert_eq!(formula, ratio(2, 3));
    }

    #[test]
    fn probabilities_sum_to_one_and_match_enumeration() {
        for (n, d) in [(4u64, 1u64), (4, 2), (3, 2), (6, 2), (4, 3), (2, 5), (5, 2)] {
            let configs: Vec<_> = enumerate_configurations(n as usize, d as usize).unwrap().collect();
            let total = configs.len() as u64;
            for sizes in [vec![1, n - 1], vec![n / 2, n - n / 2]] {
                let colors: Vec<usize> = (0..n as usize).map(|v| usize::from(v as u64 >= sizes[0])).collect();
                let mut hist: HashMap<Vec<Vec<usize>>, u64> = HashMap::new();
                for c in &configs {
                    *hist.entry(c.contract().class_edge_counts(&colors, 2)).or_default() += 1;
                }
                let mut sum = BigRational::zero();
                for edges in admissible_edge_matrices(&sizes, d) {
                    let pair = AdmissiblePair::from_counts(n, d, sizes.clone(), edges.clone()).unwrap();
                    let p = exact_partition_probability(&pair).unwrap();
                    let key: Vec<Vec<usize>> = edges.iter().map(|r| r.iter().map(|&x| x as usize).collect()).collect();
                    assert_eq!(p, ratio(*hist.get(&key).unwrap_or(&0), total));
                    sum += p;
                }
                assert_eq!(sum, BigRational::one());
            }
        }
    }

    #[test]
    fn leading_order_rate_tracks_exact_probabilities() {
        // |(1/n) ln P − rate| ≤ C ln n / n, with C fitted on this sweep and frozen at 3.
        let c = 3.0;
        for (n, d) in [(4u64, 3u64), (6, 2), (4, 2), (12, 1), (6, 1)] {
            for k in [2usize, 3] {
                for sizes in compositions(n, k) {
                    if sizes.iter().any(|&s| s == 0) {
                        continue;
                    }
                    for edges in admissible_edge_matrices(&sizes, d) {
                        let pair = AdmissiblePair::from_counts(n, d, sizes.clone(), edges).unwrap();
                        let p = exact_partition_probability(&pair).unwrap();
                        if p.is_zero() {
                            continue;
                        }
                        let lp = (p.numer().to_f64().unwrap().ln() - p.denom().to_f64().unwrap().ln()) / n as f64;
                        let rate = log_partition_probability(&pair);
                        let nf = n as f64;
                        assert!(rate <= 0.0);
                        assert!((lp - rate).abs() <= c * nf.ln() / nf + 1e-12, "n={n} d={d} {:?} {lp} {rate}", pair.edges());
                    }
                }
            }
        }
    }

    #[test]
    fn offdiag_form_agrees_with_general_form() {
        for (n, d) in [(6u64, 2u64), (9, 2), (8, 3)] {
            for sizes in compositions(n, 3) {
                if sizes.iter().any(|&s| s == 0) {
                    continue;
                }
                for edges in admissible_edge_matrices(&sizes, d) {
                    let pair = AdmissiblePair::from_counts(n, d, sizes.clone(), edges).unwrap();
                    if pair.has_zero_diagonal() {
                        let a = log_expected_partitions_offdiag(&pair).unwrap();
                        let b = log_expected_partitions(&pair);
                        assert!((a - b).abs() < 1e-12);
                    } else {
                        assert!(log_expected_partitions_offdiag(&pair).is_err());
                    }
                }
            }
        }
    }

    #[test]
    fn product_measure_examples() {
        // K=2, ρ uniform, μ = ρ⊗ρ at n=4, d=4: every entry of μ is 1/4, i.e. 4 clones.
        let pair = AdmissiblePair::from_counts(4, 4, vec![2, 2], vec![vec![4, 4], vec![4, 4]]).unwrap();
        assert_eq!(log_partition_probability(&pair), 0.0);
        assert!((log_expected_partitions(&pair) - 2f64.ln()).abs() < 1e-15);
        // μ = ρ̂ for uniform ρ over k=3: rate ln 3 + (d/2) ln(2/3)
        let pair = AdmissiblePair::from_counts(6, 2, vec![2, 2, 2], vec![vec![0, 2, 2], vec![2, 0, 2], vec![2, 2, 0]]).unwrap();
        let v = log_expected_partitions_offdiag(&pair).unwrap();
        assert!((v - (3f64.ln() + (2f64 / 3.0).ln())).abs() < 1e-14);
    }

    #[test]
    fn expected_colorings_by_enumeration() {
        for (n, d, k) in [(4u64, 3u64, 3usize), (4, 2, 2), (6, 2, 3), (3, 2, 3)] {
            let configs: Vec<_> = enumerate_configurations(n as usize, d as usize).unwrap().collect();
            let mut proper = 0u64;
            for c in &configs {
                let g = c.contract();
                let z = crate::colorings::count_colorings(&g, k, &crate::colorings::CountFilter::None).unwrap();
                proper += z.to_u64().unwrap();
            }
            assert_eq!(
                expected_proper_colorings(n, d, k, None).unwrap(),
                ratio(proper, configs.len() as u64)
            );
        }
    }
}
