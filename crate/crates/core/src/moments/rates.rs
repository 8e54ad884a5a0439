//! First and second moment rate functions and related constants.
//!
//! Every rate is the coefficient of `n` in the logarithm of the quantity it
//! describes; polynomial corrections are returned separately where known.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::info::{binary_kl, entropy_of, kl_of, xlogx, Distribution};
use crate::error::{Error, Result, Violation};

/// `ln k + (d/2) ln(1 − 1/k)`.
pub fn first_moment_rate(k: usize, d: f64) -> f64 {
    let k = k as f64;
    k.ln() + d / 2.0 * (1.0 - 1.0 / k).ln()
}

/// `H(ρ) + (d/2) ln(1 − ‖ρ‖²)`: rate of the expected number of colourings
/// with class profile `ρ`.
pub fn first_moment_rate_profile(rho: &Distribution, d: f64) -> f64 {
    rho.entropy() + d / 2.0 * (1.0 - rho.norm_sq()).ln()
}

/// Expected number of balanced colourings: `n·(ln k + (d/2) ln(1 − 1/k))`
/// and the polynomial exponent `−(k−1)/2` of its `n`-dependent prefactor.
pub fn balanced_first_moment(n: usize, k: usize, d: f64) -> Result<(f64, f64)> {
    if k == 0 || n % k != 0 {
        return Err(Error::InvalidInput(format!("k={k} does not divide n={n}")));
    }
    Ok((n as f64 * first_moment_rate(k, d), -((k - 1) as f64) / 2.0))
}

/// Row and column residuals `max_i |Σ_j ρ_ij − 1|`.
pub fn stochastic_residuals(rho: &DMatrix<f64>) -> (f64, f64) {
    let k = rho.nrows();
    let row = (0..k)
        .map(|i| (rho.row(i).sum() - 1.0).abs())
        .fold(0.0, f64::max);
    let col = (0..k)
        .map(|j| (rho.column(j).sum() - 1.0).abs())
        .fold(0.0, f64::max);
    (row, col)
}

pub(crate) fn check_doubly_stochastic(rho: &DMatrix<f64>, tol: f64) -> Result<()> {
    if rho.nrows() != rho.ncols() {
        return Err(Error::DimensionMismatch("overlap matrix must be square".into()));
    }
    let (row, col) = stochastic_residuals(rho);
    if row > tol || col > tol || rho.iter().any(|&x| x < 0.0) {
        return Err(Error::NotDoublyStochastic {
            row_residual: row,
            col_residual: col,
        });
    }
    Ok(())
}

/// Neumaier-compensated sum. The rate near the threshold is a small
/// difference of O(ln k) terms, so plain summation over k² entries is not
/// accurate enough.
pub(crate) fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `f(ρ) = H(ρ/k) + (d/2) ln(1 − 2/k + Σρ²/k²)` without checking `ρ`.
pub(crate) fn f_unchecked(rho: &DMatrix<f64>, d: f64) -> f64 {
    let k = rho.nrows() as f64;
    let h = k.ln() - compensated_sum(rho.iter().map(|&x| xlogx(x))) / k;
    let sq = compensated_sum(rho.iter().map(|x| x * x));
    h + d / 2.0 * (sq / (k * k) - 2.0 / k).ln_1p()
}

/// Second-moment rate `f(ρ) = H(ρ/k) + E(ρ)` of a doubly stochastic `ρ`.
///
/// `H(ρ/k) = −Σ (ρ_ij/k) ln(ρ_ij/k) = ln k − (1/k) Σ ρ_ij ln ρ_ij` and
/// `E(ρ) = (d/2) ln(1 − 2/k + Σ ρ_ij²/k²)`.
pub fn second_moment_rate(rho: &DMatrix<f64>, d: f64) -> Result<f64> {
    check_doubly_stochastic(rho, 1e-9)?;
    Ok(f_unchecked(rho, d))
}

/// `ρ` together with a distribution `μ` on `[k]⁴`, indexed as
/// `((i·k + j)·k + s)·k + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatiblePair {
    k: usize,
    rho: DMatrix<f64>,
    mu: Vec<f64>,
    d: f64,
    n: Option<u64>,
}

const PAIR_TOL: f64 = 1e-9;

impl CompatiblePair {
    /// Validates symmetry `μ_ijst = μ_stij`, the forbidden set
    /// `{i = s or j = t}`, marginals `Σ_st μ_ijst = ρ_ij/k`, and, when `n` is
    /// given, integrality of `n ρ_ij/k` and `dn μ_ijst`.
    pub fn new(rho: DMatrix<f64>, mu: Vec<f64>, d: f64, n: Option<u64>) -> Result<Self> {
        check_doubly_stochastic(&rho, PAIR_TOL)?;
        let k = rho.nrows();
        if mu.len() != k.pow(4) {
            return Err(Error::Inadmissible(vec![Violation::Dimension]));
        }
        let idx = |i: usize, j: usize, s: usize, t: usize| ((i * k + j) * k + s) * k + t;
        let mut bad = Vec::new();
        for i in 0..k {
            for j in 0..k {
                let mut marg = 0.0;
                for s in 0..k {
                    for t in 0..k {
                        let x = mu[idx(i, j, s, t)];
                        marg += x;
                        if x < 0.0 {
                            bad.push(Violation::Negative(i * k + j, s * k + t));
                        }
                        if (i == s || j == t) && x != 0.0 {
                            bad.push(Violation::Forbidden(i, j, s, t));
                        }
                        if (i, j) < (s, t) && (x - mu[idx(s, t, i, j)]).abs() > PAIR_TOL {
                            bad.push(Violation::SymmetryQuad(i, j, s, t));
                        }
                    }
                }
                if (marg - rho[(i, j)] / k as f64).abs() > PAIR_TOL {
                    bad.push(Violation::Marginal(i, j));
                }
            }
        }
        if let Some(n) = n {
            let integral = |x: f64| (x - x.round()).abs() <= PAIR_TOL * x.abs().max(1.0);
            for i in 0..k {
                for j in 0..k {
                    if !integral(n as f64 * rho[(i, j)] / k as f64) {
                        bad.push(Violation::IntegralityRho(i * k + j));
                    }
                }
            }
            let dn = d * n as f64;
            for (x, &m) in mu.iter().enumerate() {
                if !integral(m * dn) {
                    bad.push(Violation::IntegralityMu(x / (k * k), x % (k * k)));
                }
            }
        }
        if bad.is_empty() {
            Ok(CompatiblePair { k, rho, mu, d, n })
        } else {
            Err(Error::Inadmissible(bad))
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rho(&self) -> &DMatrix<f64> {
        &self.rho
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn n(&self) -> Option<u64> {
        self.n
    }
}

/// `ρ̂_ijst = ρ_ij ρ_st / (k² − 2k + ‖ρ‖²)` off the forbidden set, zero on it.
pub fn rho_hat(rho: &DMatrix<f64>) -> Vec<f64> {
    let k = rho.nrows();
    let norm: f64 = rho.iter().map(|x| x * x).sum();
    let z = (k * k) as f64 - 2.0 * k as f64 + norm;
    let mut out = vec![0.0; k.pow(4)];
    for i in 0..k {
        for j in 0..k {
            for s in 0..k {
                for t in 0..k {
                    if i != s && j != t {
                        out[((i * k + j) * k + s) * k + t] = rho[(i, j)] * rho[(s, t)] / z;
                    }
                }
            }
        }
    }
    out
}

/// `f(ρ) − (d/(2k))·KL(μ ‖ ρ̂)`.
pub fn compatible_rate(pair: &CompatiblePair) -> Result<f64> {
    let f = f_unchecked(&pair.rho, pair.d);
    let kl = kl_of(&pair.mu, &rho_hat(&pair.rho))?;
    Ok(f - pair.d / (2.0 * pair.k as f64) * kl)
}

/// Cycle-count constants of small subgraph conditioning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgraphConstants {
    /// `λ_j = (d−1)^j / (2j)`, `j = 1..=L`.
    pub lambda: Vec<f64>,
    /// `δ_j = −(1−k)^{1−j}`.
    pub delta: Vec<f64>,
    /// Running sums `Σ_{i≤j} λ_i δ_i²`.
    pub partial_sums: Vec<f64>,
    /// `exp` of the last partial sum.
    pub correction: f64,
    /// `(d−1)/(k−1)² < 1`.
    pub converges: bool,
    /// `−((k−1)²/2) ln(1 − (d−1)/(k−1)²)`, the full series, when it converges.
    pub limit: Option<f64>,
}

pub fn subgraph_constants(k: usize, d: usize, max_len: usize) -> SubgraphConstants {
    let (kf, df) = (k as f64, d as f64);
    let mut lambda = Vec::with_capacity(max_len);
    let mut delta = Vec::with_capacity(max_len);
    let mut partial_sums = Vec::with_capacity(max_len);
    let mut acc = 0.0;
    for j in 1..=max_len {
        let l = (df - 1.0).powi(j as i32) / (2.0 * j as f64);
        let dl = -(1.0 - kf).powi(1 - j as i32);
        acc += l * dl * dl;
        lambda.push(l);
        delta.push(dl);
        partial_sums.push(acc);
    }
    let ratio = (df - 1.0) / ((kf - 1.0) * (kf - 1.0));
    let converges = ratio < 1.0;
    SubgraphConstants {
        lambda,
        delta,
        partial_sums,
        correction: acc.exp(),
        converges,
        limit: converges.then(|| -(kf - 1.0).powi(2) / 2.0 * (1.0 - ratio).ln()),
    }
}

fn open_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} = {x} must lie in (0,1)")))
    }
}

/// `h(p, q) = −KL(p‖q) − (1 − p) ln 2`.
pub fn rainbow_h(p: f64, q: f64) -> f64 {
    -binary_kl(p, q) - (1.0 - p) * 2f64.ln()
}

/// `∂h/∂p = ln(q/p) − ln((1−q)/(1−p)) + ln 2`.
pub fn rainbow_h_slope(p: f64, q: f64) -> f64 {
    (q / p).ln() - ((1.0 - q) / (1.0 - p)).ln() + 2f64.ln()
}

/// Rate of colourings in which a `p` fraction of the vertices is rainbow:
/// `ln k + (d/2) ln(1 − 1/k) − KL(p′‖q) − (1 − p) ln 2`.
pub fn rainbow_rate(p: f64, p_prime: f64, q: f64, k: usize, d: f64) -> Result<f64> {
    open_unit("p", p)?;
    open_unit("p'", p_prime)?;
    open_unit("q", q)?;
    Ok(first_moment_rate(k, d) - binary_kl(p_prime, q) - (1.0 - p) * 2f64.ln())
}

/// Closed-form maximiser `2q/(1+q)` of `h(·, q)`.
pub fn rainbow_h_argmax(q: f64) -> f64 {
    2.0 * q / (1.0 + q)
}

/// Closed-form maximum `ln(1 − (1−q)/2)` of `h(·, q)`.
pub fn rainbow_h_max(q: f64) -> f64 {
    (1.0 - (1.0 - q) / 2.0).ln()
}

/// Maximises `h(·, q)` on `(0, 1)` numerically by bisection on the slope,
/// which is strictly decreasing.
pub fn maximize_rainbow_h(q: f64) -> Result<(f64, f64)> {
    open_unit("q", q)?;
    let (mut lo, mut hi) = (f64::EPSILON, 1.0 - f64::EPSILON);
    if rainbow_h_slope(hi, q) >= 0.0 {
        return Ok((hi, rainbow_h(hi, q)));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rainbow_h_slope(mid, q) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    Ok((p, rainbow_h(p, q)))
}

/// `(2k−1) ln k − 1 + 3/ln^{3/2} k`.
pub fn dplus(k: usize) -> f64 {
    let l = (k as f64).ln();
    (2.0 * k as f64 - 1.0) * l - 1.0 + 3.0 / l.powf(1.5)
}

/// Components echoed by the `rates` command.
pub fn profile_components(rho: &Distribution, d: f64) -> (f64, f64) {
    (entropy_of(rho.weights()), d / 2.0 * (1.0 - rho.norm_sq()).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn flat(k: usize) -> DMatrix<f64> {
        DMatrix::from_element(k, k, 1.0 / k as f64)
    }

    fn random_ds(k: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = stream_rng(seed, 0);
        let mut m = DMatrix::from_fn(k, k, |_, _| rng.gen_range(0.1..1.0));
        for _ in 0..2000 {
            for i in 0..k {
                let s = m.row(i).sum();
                m.row_mut(i).scale_mut(1.0 / s);
            }
            for j in 0..k {
                let s = m.column(j).sum();
                m.column_mut(j).scale_mut(1.0 / s);
            }
        }
        m
    }

    #[test]
    fn first_moment_examples() {
        assert!((first_moment_rate(2, 0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((first_moment_rate(3, 5.0) - 0.084_950_5).abs() < 1e-6);
        assert_eq!(balanced_first_moment(9, 3, 2.0).unwrap().1, -1.0);
        assert!(balanced_first_moment(10, 3, 2.0).is_err());
        for k in 3..=100 {
            let d = (2 * k - 1) as f64 * (k as f64).ln();
            assert!(first_moment_rate(k, d) < 0.0);
        }
    }

    #[test]
    fn profile_rate_peaks_at_uniform() {
        let u = Distribution::uniform(3);
        assert!((first_moment_rate_profile(&u, 4.0) - first_moment_rate(3, 4.0)).abs() < 1e-14);
        let skew = Distribution::new(vec![0.4, 0.35, 0.25]).unwrap();
        assert!(first_moment_rate_profile(&skew, 4.0) < first_moment_rate(3, 4.0));
    }

    #[test]
    fn f_examples() {
        let f = second_moment_rate(&flat(3), 5.0).unwrap();
        assert!((f - (2.0 * 3f64.ln() + 5.0 * (2f64 / 3.0).ln())).abs() < 1e-14);
        assert!((f - 0.169_901).abs() < 1e-5);
        for k in [3usize, 4, 7] {
            let id = DMatrix::identity(k, k);
            let d = 6.5;
            let want = (k as f64).ln() + d / 2.0 * (1.0 - 1.0 / k as f64).ln();
            assert!((second_moment_rate(&id, d).unwrap() - want).abs() < 1e-13);
        }
        let bad = DMatrix::from_element(3, 3, 0.3);
        assert!(matches!(
            second_moment_rate(&bad, 2.0),
            Err(Error::NotDoublyStochastic { .. })
        ));
    }

    #[test]
    fn flat_identity_for_many_k() {
        for k in (3usize..=1000).step_by(7).chain([57, 300, 1000]) {
            let d = (2 * k - 2) as f64 * ((k - 1) as f64).ln();
            let got = f_unchecked(&flat(k), d);
            let want = 2.0 * (k as f64).ln() + d * (-1.0 / k as f64).ln_1p();
            assert!((got - want).abs() <= 1e-12 * want.abs(), "k={k} {got} {want}");
        }
    }

    #[test]
    fn rho_hat_normalisation() {
        for s in 0..20 {
            let k = 3 + (s as usize % 3);
            let rho = random_ds(k, s);
            let norm: f64 = rho.iter().map(|x| x * x).sum();
            let mut raw = 0.0;
            for i in 0..k {
                for j in 0..k {
                    for a in 0..k {
                        for b in 0..k {
                            if i != a && j != b {
                                raw += rho[(i, j)] * rho[(a, b)];
                            }
                        }
                    }
                }
            }
            let z = (k * k) as f64 - 2.0 * k as f64 + norm;
            assert!((raw - z).abs() < 1e-12);
            let hat = rho_hat(&rho);
            assert!((hat.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn compatible_rate_at_rho_hat() {
        // for the flat matrix ρ̂ has block sums ρ_ij/k, so it is itself compatible
        for k in 3..6 {
            let rho = flat(k);
            let d = 4.0;
            let pair = CompatiblePair::new(rho.clone(), rho_hat(&rho), d, None).unwrap();
            assert!((compatible_rate(&pair).unwrap() - f_unchecked(&rho, d)).abs() < 1e-14);
        }
    }

    fn compatible_rate_raw(rho: &DMatrix<f64>, mu: &[f64], d: f64) -> f64 {
        f_unchecked(rho, d) - d / (2.0 * rho.nrows() as f64) * kl_of(mu, &rho_hat(rho)).unwrap()
    }

    #[test]
    fn compatible_pair_validation() {
        let rho = flat(3);
        let mut mu = rho_hat(&rho);
        mu[0] = 0.01;
        let err = CompatiblePair::new(rho.clone(), mu, 3.0, None).unwrap_err().to_string();
        assert!(err.contains("forbidden entry (1,1,1,1)"), "{err}");
        let mut mu = rho_hat(&rho);
        let idx = |i: usize, j: usize, s: usize, t: usize| ((i * 3 + j) * 3 + s) * 3 + t;
        mu[idx(0, 1, 1, 2)] += 0.001;
        let err = CompatiblePair::new(rho.clone(), mu, 3.0, None).unwrap_err().to_string();
        assert!(err.contains("symmetry (1,2,2,3)") && err.contains("marginal (1,2)"), "{err}");
        // flat ρ̂ has entries 1/36 and nρ_ij/k = n/9: n = 36 is integral, n = 9 is not
        assert!(CompatiblePair::new(rho.clone(), rho_hat(&rho), 3.0, Some(36)).is_ok());
        assert!(CompatiblePair::new(rho.clone(), rho_hat(&rho), 3.0, Some(9)).is_err());
    }

    #[test]
    fn subgraph_examples() {
        let c = subgraph_constants(3, 3, 40);
        assert_eq!(&c.lambda[..3], &[1.0, 1.0, 4.0 / 3.0]);
        assert_eq!(c.delta[0], -1.0);
        assert!(c.converges);
        let limit = c.limit.unwrap();
        assert!(c.partial_sums.windows(2).all(|w| w[1] > w[0]));
        assert!(c.partial_sums.iter().all(|&s| s <= limit + 1e-12));
        assert!((c.partial_sums[39] - limit).abs() < 1e-9);
        for k in 2..10 {
            assert_eq!(subgraph_constants(k, 5, 1).delta[0], -1.0);
            assert!(subgraph_constants(k, 5, 12).delta.iter().all(|d| d.abs() <= 1.0));
        }
        assert!(!subgraph_constants(3, 6, 4).converges);
        assert!(subgraph_constants(3, 6, 4).limit.is_none());
    }

    #[test]
    fn rainbow_examples() {
        let q = 0.7;
        let v = rainbow_rate(1.0 - 1e-15, q, q, 5, 12.0).unwrap();
        assert!((v - first_moment_rate(5, 12.0)).abs() < 1e-12);
        assert!(rainbow_rate(1.0, q, q, 5, 12.0).is_err());
        let (p, h) = maximize_rainbow_h(q).unwrap();
        assert!((p - rainbow_h_argmax(q)).abs() < 1e-10);
        assert!((h - rainbow_h_max(q)).abs() < 1e-10);
    }

    #[test]
    fn dplus_examples() {
        assert!((dplus(10) - 43.61).abs() < 0.01);
        for k in 3..2000 {
            let base = (2 * k - 1) as f64 * (k as f64).ln();
            assert!(dplus(k) > base - 1.0);
            if k >= 21 {
                assert!(dplus(k) < base);
            }
        }
    }

    proptest! {
        #[test]
        fn rainbow_h_concavity(p in 0.05f64..0.95, q in 0.05f64..0.95) {
            let step = 1e-4;
            let fd = (rainbow_h(p + step, q) - 2.0 * rainbow_h(p, q) + rainbow_h(p - step, q)) / (step * step);
            let exact = -1.0 / (p * (1.0 - p));
            prop_assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0) + 1e-5);
        }

        #[test]
        fn compatible_rate_never_exceeds_f(seed in any::<u64>(), k in 3usize..5, weight in 0.0f64..1.0) {
            let rho = random_ds(k, seed);
            let hat = rho_hat(&rho);
            let mut rng = stream_rng(seed, 9);
            let mixed: Vec<f64> = hat
                .iter()
                .map(|&h| if h > 0.0 { (1.0 - weight) * h + weight * rng.gen_range(0.0..1.0) } else { 0.0 })
                .collect();
            let s: f64 = mixed.iter().sum();
            let mu: Vec<f64> = mixed.iter().map(|x| x / s).collect();
            prop_assert!(compatible_rate_raw(&rho, &mu, 3.0) <= f_unchecked(&rho, 3.0) + 1e-12);
        }
    }
}
