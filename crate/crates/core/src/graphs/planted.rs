//! Planted colouring model.
//!
//! Given a colouring σ with classes `V_1, …, V_k` and a symmetric matrix `M`
//! of clone counts with zero diagonal and row sums `d·|V_i|`, the sampler
//! returns a configuration drawn uniformly among those with exactly `M_ij`
//! clones of `V_i` matched into `V_j`.
//!
//! Each class's clone list is shuffled and cut into consecutive blocks of
//! sizes `M_i1, …, M_ik`; block `(i, j)` is then paired position by position
//! with block `(j, i)`. A uniform shuffle makes the split of the clones of
//! `V_i` into labelled blocks uniform, and the order inside each block a
//! uniform permutation, so the bijection between blocks `(i, j)` and `(j, i)`
//! is uniform and independent across pairs. Every admissible configuration
//! arises from the same number of shuffle outcomes, namely
//! `Π_i Π_{j ≤ i} |block (i, j)|!`, which gives the conditional uniformity.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Configuration, MultiGraph};
use crate::colorings::Coloring;
use crate::error::{Error, Result, Violation};

/// Samples the planted configuration for `sigma` with clone counts `counts`.
pub fn sample_planted_configuration<R: Rng + ?Sized>(
    sigma: &Coloring,
    counts: &[Vec<u64>],
    d: usize,
    rng: &mut R,
) -> Result<Configuration> {
    let k = sigma.k();
    let n = sigma.n();
    let sizes = sigma.class_sizes();
    check_counts(&sizes, counts, d)?;

    let mut class_clones: Vec<Vec<u32>> = vec![Vec::new(); k];
    for v in 0..n {
        let c = sigma.color(v);
        class_clones[c].extend((v * d..(v + 1) * d).map(|x| x as u32));
    }
    for list in &mut class_clones {
        list.shuffle(rng);
    }
    let mut block_start = vec![vec![0usize; k]; k];
    for i in 0..k {
        let mut off = 0usize;
        for j in 0..k {
            block_start[i][j] = off;
            off += counts[i][j] as usize;
        }
    }
    let mut matching = vec![0u32; n * d];
    for i in 0..k {
        for j in (i + 1)..k {
            let m = counts[i][j] as usize;
            let a = &class_clones[i][block_start[i][j]..block_start[i][j] + m];
            let b = &class_clones[j][block_start[j][i]..block_start[j][i] + m];
            for (&x, &y) in a.iter().zip(b) {
                matching[x as usize] = y;
                matching[y as usize] = x;
            }
        }
    }
    Ok(Configuration::from_raw(n, d, matching))
}

/// Samples the planted multigraph for `sigma` with clone counts `counts`.
pub fn sample_planted<R: Rng + ?Sized>(
    sigma: &Coloring,
    counts: &[Vec<u64>],
    d: usize,
    rng: &mut R,
) -> Result<MultiGraph> {
    Ok(sample_planted_configuration(sigma, counts, d, rng)?.contract())
}

/// A planted instance for the round-robin colouring of `n` vertices with
/// `k` colours, using [`near_uniform_edge_counts`]. Returns the graph, the
/// colouring and the clone counts.
pub fn sample_planted_round_robin<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    d: usize,
    rng: &mut R,
) -> Result<(MultiGraph, Coloring, Vec<Vec<u64>>)> {
    if k < 2 || n < k {
        return Err(Error::InvalidInput(format!("planted instance needs 2 ≤ k ≤ n (n={n}, k={k})")));
    }
    let sigma = Coloring::round_robin(n, k);
    let counts = near_uniform_edge_counts(&sigma.class_sizes(), d)?;
    let g = sample_planted(&sigma, &counts, d, rng)?;
    Ok((g, sigma, counts))
}

fn check_counts(sizes: &[usize], counts: &[Vec<u64>], d: usize) -> Result<()> {
    let k = sizes.len();
    if counts.len() != k || counts.iter().any(|r| r.len() != k) {
        return Err(Error::Inadmissible(vec![Violation::Dimension]));
    }
    let mut bad = Vec::new();
    for i in 0..k {
        if counts[i][i] != 0 {
            bad.push(Violation::DiagonalNonZero(i));
        }
        for j in (i + 1)..k {
            if counts[i][j] != counts[j][i] {
                bad.push(Violation::Symmetry(i, j));
            }
        }
    }
    for i in 0..k {
        let row: u64 = counts[i].iter().sum();
        if row != (d * sizes[i]) as u64 {
            bad.push(Violation::RowMarginal(i));
        }
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Inadmissible(bad))
    }
}

/// Clone counts `dn/(k(k−1))` off the diagonal for a balanced colouring.
pub fn uniform_edge_counts(n: usize, k: usize, d: usize) -> Result<Vec<Vec<u64>>> {
    if k < 2 || n % k != 0 || (d * n) % (k * (k - 1)) != 0 {
        return Err(Error::InvalidInput(format!(
            "uniform planted counts need k ≥ 2, k | n and k(k−1) | dn (n={n}, k={k}, d={d})"
        )));
    }
    let m = (d * n / (k * (k - 1))) as u64;
    Ok((0..k)
        .map(|i| (0..k).map(|j| if i == j { 0 } else { m }).collect())
        .collect())
}

/// A symmetric zero-diagonal count matrix with row sums `d·sizes[i]` whose
/// entries are as close to proportional to `sizes[i]·sizes[j]` as rounding
/// allows. Used for classes that are not exactly balanced.
pub fn near_uniform_edge_counts(sizes: &[usize], d: usize) -> Result<Vec<Vec<u64>>> {
    let k = sizes.len();
    let n: usize = sizes.iter().sum();
    if k < 2 || (d * n) % 2 == 1 {
        return Err(Error::InvalidInput("need k ≥ 2 and dn even".into()));
    }
    let max = *sizes.iter().max().unwrap();
    if d * max > d * (n - max) {
        return Err(Error::InvalidInput(
            "largest class has more clones than all other classes together".into(),
        ));
    }
    let mut m = vec![vec![0u64; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                let a = (d * sizes[i] * sizes[j]) as f64 / (n - sizes[i]) as f64;
                let b = (d * sizes[i] * sizes[j]) as f64 / (n - sizes[j]) as f64;
                m[i][j] = a.min(b).floor() as u64;
            }
        }
    }
    let mut residual: Vec<i64> = (0..k)
        .map(|i| (d * sizes[i]) as i64 - m[i].iter().sum::<u64>() as i64)
        .collect();
    loop {
        let mut order: Vec<usize> = (0..k).filter(|&i| residual[i] > 0).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(residual[i]), i));
        match order.len() {
            0 => break,
            1 => {
                let i = order[0];
                // Reroute one existing edge a–b into a–i and b–i.
                let pair = (0..k)
                    .flat_map(|a| (0..k).map(move |b| (a, b)))
                    .find(|&(a, b)| a != i && b != i && a != b && m[a][b] > 0);
                let (a, b) = pair.ok_or_else(|| {
                    Error::InvalidInput("cannot balance planted edge counts".into())
                })?;
                m[a][b] -= 1;
                m[b][a] -= 1;
                m[a][i] += 1;
                m[i][a] += 1;
                m[b][i] += 1;
                m[i][b] += 1;
                residual[i] -= 2;
            }
            _ => {
                let (i, j) = (order[0], order[1]);
                m[i][j] += 1;
                m[j][i] += 1;
                residual[i] -= 1;
                residual[j] -= 1;
            }
        }
    }
    Ok(m)
}
