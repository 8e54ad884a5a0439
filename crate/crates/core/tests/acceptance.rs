//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! status 1 if any criterion fails.
//!
//! Run a subset with `cargo test -p regcolor-core --test acceptance -- 4 9`.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::Rng;

use regcolor_core::birkhoff::{chart_coords, f_chart, grad_f, hessian_f_at_flat};
use regcolor_core::clustergeo::{check_core_inclusion, freedom_report, FreeCounting};
use regcolor_core::colorings::{cluster_of, count_colorings, vacant_table, ColoringParams, CountFilter};
use regcolor_core::experiments::{run_experiment, ExperimentSpec};
use regcolor_core::graphs::{count_configurations, enumerate_configurations, sample_planted_round_robin};
use regcolor_core::moments::{
    admissible_edge_matrices, exact_partition_probability, expected_proper_colorings, first_moment_rate,
    maximize_rainbow_h, second_moment_rate, AdmissiblePair,
};
use regcolor_core::threshold::{interval, threshold_record, EpsMode};
use regcolor_core::{stream_rng, MultiGraph};

const SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "exact partition identity", limit: Duration::from_secs(120), run: c1 },
        Criterion { id: 2, name: "first-moment oracle", limit: Duration::from_secs(60), run: c2 },
        Criterion { id: 3, name: "Poisson cycle means", limit: Duration::from_secs(300), run: c3 },
        Criterion { id: 4, name: "stationarity and Hessian", limit: Duration::from_secs(60), run: c4 },
        Criterion { id: 5, name: "flat-matrix identity", limit: Duration::from_secs(30), run: c5 },
        Criterion { id: 6, name: "core inclusion", limit: Duration::from_secs(300), run: c6 },
        Criterion { id: 7, name: "cluster bound", limit: Duration::from_secs(120), run: c7 },
        Criterion { id: 8, name: "vacant-vertex probability", limit: Duration::from_secs(180), run: c8 },
        Criterion { id: 9, name: "threshold table", limit: Duration::from_secs(60), run: c9 },
        Criterion { id: 10, name: "rainbow-rate calculus", limit: Duration::from_secs(10), run: c10 },
        Criterion { id: 11, name: "first-moment sign", limit: Duration::from_secs(10), run: c11 },
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in criteria.iter().filter(|c| only.is_empty() || only.contains(&c.id)) {
        let start = Instant::now();
        let out = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.limit;
        let pass = out.pass && in_time;
        failed += usize::from(!pass);
        let time_note = if in_time { "" } else { " [over time limit]" };
        println!(
            "criterion {:>2} {}: {} ({:.1}s of {}s{}) {}",
            c.id,
            c.name,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            time_note,
            out.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}

fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 1..=n.saturating_sub(parts - 1) {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn block_colors(sizes: &[usize]) -> Vec<usize> {
    sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat(i).take(s)).collect()
}

fn all_graphs(n: usize, d: usize) -> Vec<MultiGraph> {
    enumerate_configurations(n, d).unwrap().map(|c| c.contract()).collect()
}

fn c1() -> Outcome {
    let (mut pairs, mut mismatches, mut strays) = (0usize, 0usize, 0usize);
    for dn in (4..=12).step_by(2) {
        for d in (1..=dn).filter(|d| dn % d == 0) {
            let n = dn / d;
            let graphs = all_graphs(n, d);
            let total = count_configurations(n, d).unwrap();
            assert_eq!(BigUint::from(graphs.len()), total);
            for parts in [2, 3].into_iter().filter(|&p| p <= n) {
                for sizes in compositions(n, parts) {
                    let colors = block_colors(&sizes);
                    let mut tally: HashMap<Vec<Vec<u64>>, u64> = HashMap::new();
                    for g in &graphs {
                        let m = g.class_edge_counts(&colors, parts);
                        let m = m.into_iter().map(|r| r.into_iter().map(|x| x as u64).collect()).collect();
                        *tally.entry(m).or_default() += 1;
                    }
                    let sizes64: Vec<u64> = sizes.iter().map(|&s| s as u64).collect();
                    let matrices = admissible_edge_matrices(&sizes64, d as u64);
                    strays += tally.keys().filter(|m| !matrices.contains(m)).count();
                    for m in matrices {
                        let hits = tally.get(&m).copied().unwrap_or(0);
                        let empirical = BigRational::new(hits.into(), total.clone().into());
                        let pair = AdmissiblePair::from_counts(n as u64, d as u64, sizes64.clone(), m).unwrap();
                        pairs += 1;
                        if exact_partition_probability(&pair).unwrap() != empirical {
                            mismatches += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(
        mismatches == 0 && strays == 0,
        format!("{pairs} admissible pairs, {mismatches} mismatches, {strays} enumerated matrices outside the admissible list"),
    )
}

fn c2() -> Outcome {
    let (n, d, k) = (4, 3, 3);
    let graphs = all_graphs(n, d);
    let mut sum = BigUint::default();
    for g in &graphs {
        sum += count_colorings(g, k, &CountFilter::None).unwrap();
    }
    let total = count_configurations(n, d).unwrap();
    let enumerated = BigRational::new(sum.into(), total.clone().into());
    let linear = expected_proper_colorings(n as u64, d as u64, k, None).unwrap();
    outcome(
        enumerated == linear && graphs.len() == 10395,
        format!("{} configurations, enumeration {enumerated}, linearity {linear}", graphs.len()),
    )
}

fn c3() -> Outcome {
    let spec = ExperimentSpec::parse(&format!("kind=cycle-census\nn=10000\nd=3\nsamples=1000\nseed={SEED}\nmax_len=3"))
        .unwrap();
    let report = run_experiment(&spec).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (j, lambda) in [(1, 1.0), (2, 1.0), (3, 4.0 / 3.0)] {
        let m = report.metric(&format!("xi_{j}")).unwrap();
        let close = (m.mean - lambda).abs() <= 0.05 * lambda;
        let covered = m.covers(lambda);
        pass &= close && covered;
        parts.push(format!(
            "xi_{j} mean {:.4} vs {lambda:.4} (within 5%: {close}, CI [{:.4}, {:.4}] covers: {covered})",
            m.mean,
            m.ci_lo.unwrap(),
            m.ci_hi.unwrap()
        ));
    }
    outcome(pass, parts.join("; "))
}

/// Second differences of the chart function, upper triangle mirrored.
fn fd_hessian(x: &DVector<f64>, k: usize, d: f64, h: f64) -> DMatrix<f64> {
    let f = |y: &DVector<f64>| f_chart(y, k, d).unwrap();
    let m = x.len();
    let f0 = f(x);
    let shifted = |a: usize, sa: f64, b: usize, sb: f64| {
        let mut y = x.clone();
        y[a] += sa;
        y[b] += sb;
        f(&y)
    };
    let mut out = DMatrix::zeros(m, m);
    for a in 0..m {
        out[(a, a)] = (shifted(a, h, a, 0.0) - 2.0 * f0 + shifted(a, -h, a, 0.0)) / (h * h);
        for b in (a + 1)..m {
            let v = (shifted(a, h, b, h) - shifted(a, h, b, -h) - shifted(a, -h, b, h) + shifted(a, -h, b, -h))
                / (4.0 * h * h);
            out[(a, b)] = v;
            out[(b, a)] = v;
        }
    }
    out
}

fn c4() -> Outcome {
    let (mut grad_max, mut fd_max) = (0.0f64, 0.0f64);
    let mut eigen_fail = Vec::new();
    for k in 3..=20usize {
        let d = ((2 * k - 2) as f64 * ((k - 1) as f64).ln()).ceil();
        let flat = DMatrix::from_element(k, k, 1.0 / k as f64);
        grad_max = grad_max.max(grad_f(&flat, d).unwrap().amax());
        let report = hessian_f_at_flat(k, d).unwrap();
        let fd = fd_hessian(&chart_coords(&flat), k, d, 1e-4);
        fd_max = fd_max.max((&report.hessian - fd).amax());
        if report.max_eigenvalue >= -0.5 {
            eigen_fail.push(format!("k={k} (d={d}, λmax={:.3})", report.max_eigenvalue));
        }
    }
    let grad_ok = grad_max < 1e-9;
    let fd_ok = fd_max <= 1e-4;
    outcome(
        grad_ok && fd_ok && eigen_fail.is_empty(),
        format!(
            "gradient sup {grad_max:.1e} (ok: {grad_ok}); Hessian vs differences {fd_max:.1e} (ok: {fd_ok}); \
             eigenvalues < -1/2 fail at {} of 18 k: {}",
            eigen_fail.len(),
            eigen_fail.join(", ")
        ),
    )
}

fn c5() -> Outcome {
    // At the standing degree the two sides of the identity nearly cancel,
    // which is the hard case for relative accuracy.
    let mut worst = (0.0f64, 0usize, 0.0f64);
    for k in 2..=1000usize {
        let kf = k as f64;
        let flat = DMatrix::from_element(k, k, 1.0 / kf);
        let d = (2.0 * kf - 2.0) * (kf - 1.0).ln();
        let got = second_moment_rate(&flat, d).unwrap();
        let want = 2.0 * kf.ln() + d * (-1.0 / kf).ln_1p();
        let rel = (got - want).abs() / want.abs();
        if rel > worst.0 {
            worst = (rel, k, d);
        }
    }
    outcome(
        worst.0 <= 1e-12,
        format!(
            "k = 2..1000 at d = (2k-2)ln(k-1); worst relative error {:.2e} at k={}, d={:.3}",
            worst.0, worst.1, worst.2
        ),
    )
}

fn c6() -> Outcome {
    let n = 1000;
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut degrees = Vec::new();
    for k in [4usize, 6, 8] {
        // Largest integer degree below the threshold interval.
        let d = interval(k, EpsMode::Pow09.eps(k)).0.floor() as usize;
        degrees.push(format!("k={k}: d={d}"));
        for s in 0..100u64 {
            let mut rng = stream_rng(SEED, (k as u64) << 32 | s);
            let (g, sigma, _) = sample_planted_round_robin(n, k, d, &mut rng).unwrap();
            for ell in 1..=3 {
                checked += 1;
                let r = check_core_inclusion(&g, &sigma, ell).unwrap();
                if !r.holds {
                    failures.push(format!("k={k} ell={ell} sample={s} witness={:?}", r.witness));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{checked} instances ({}), {} failures {}", degrees.join(", "), failures.len(), failures.join("; ")),
    )
}

fn c7() -> Outcome {
    let params = ColoringParams::default();
    let (mut checked, mut infeasible) = (0usize, 0usize);
    let mut failures = Vec::new();
    for k in [2usize, 3] {
        for n in (2 * k..=12).filter(|n| n % k == 0) {
            for d in (2..=5).filter(|d| d * n % 2 == 0) {
                for s in 0..10u64 {
                    let stream = ((k * 100 + n) * 10 + d) as u64 * 100 + s;
                    let mut rng = stream_rng(SEED, stream);
                    let Ok((g, sigma, _)) = sample_planted_round_robin(n, k, d, &mut rng) else {
                        infeasible += 1;
                        continue;
                    };
                    let size = cluster_of(&g, &sigma, &params).unwrap().len() as u128;
                    for ell in 1..=3 {
                        checked += 1;
                        let f = freedom_report(&g, &sigma, ell, FreeCounting::default()).unwrap();
                        let only_1 = (f.free_1.len() - f.free_2.len()) as u32;
                        let bound = 2u128.pow(only_1) * (k as u128).pow(f.free_2.len() as u32);
                        if size > bound {
                            failures.push(format!("k={k} n={n} d={d} sample={s} ell={ell}: |C|={size} > {bound}"));
                        }
                    }
                }
            }
        }
    }
    let shown: Vec<_> = failures.iter().take(5).cloned().collect();
    let by_k: Vec<String> = [2, 3]
        .iter()
        .map(|k| format!("k={k}: {}", failures.iter().filter(|f| f.starts_with(&format!("k={k} "))).count()))
        .collect();
    outcome(
        failures.is_empty(),
        format!(
            "{checked} (instance, ell) checks, {infeasible} infeasible draws skipped, {} failures ({}); first: {}",
            failures.len(),
            by_k.join(", "),
            shown.join("; ")
        ),
    )
}

fn c8() -> Outcome {
    let (n, k, d) = (1000, 5, 16);
    let (mut cells, mut inside) = (0usize, 0usize);
    for s in 0..100u64 {
        let mut rng = stream_rng(SEED, s);
        let (g, sigma, counts) = sample_planted_round_robin(n, k, d, &mut rng).unwrap();
        let table = vacant_table(&g, &sigma);
        let sizes = sigma.class_sizes();
        for i in 0..k {
            for j in (0..k).filter(|&j| j != i) {
                let size = sizes[i] as f64;
                let p = (1.0 - counts[i][j] as f64 / (d as f64 * size)).powi(d as i32);
                let sd = (p * (1.0 - p) / size).sqrt();
                let frac = table.get(i, j).len() as f64 / size;
                cells += 1;
                inside += usize::from((frac - p).abs() <= 3.0 * sd);
            }
        }
    }
    let share = inside as f64 / cells as f64;
    outcome(share >= 0.95, format!("{inside}/{cells} off-diagonal cells within 3 sd ({:.2}%)", 100.0 * share))
}

fn c9() -> Outcome {
    const K_MAX: usize = 1_000_000;
    let eps = EpsMode::Pow09;
    let mut length_worst = (0.0f64, 0usize);
    let mut length_bad = 0usize;
    let mut first_length_bad = None;
    let mut multi = Vec::new();
    let mut spacing_bad = Vec::new();
    let mut prev: Option<f64> = None;
    for k in 5..=K_MAX {
        let e = eps.eps(k);
        let want = 2.0 * std::f64::consts::LN_2 - 1.0 + 2.0 * e;
        let (lo, hi) = interval(k, e);
        let err = ((hi - lo) - want).abs();
        if err > length_worst.0 {
            length_worst = (err, k);
        }
        if err > 1e-12 {
            length_bad += 1;
            first_length_bad.get_or_insert(k);
        }
        match threshold_record(k, e) {
            Ok(r) => {
                if let Some(p) = prev {
                    if r.d_col - p <= 2.0 * ((k - 1) as f64).ln() {
                        spacing_bad.push(k - 1);
                    }
                }
                prev = Some(r.d_col);
            }
            Err(_) => {
                multi.push(k);
                prev = None;
            }
        }
    }
    outcome(
        length_bad == 0 && multi.is_empty() && spacing_bad.is_empty(),
        format!(
            "k = 5..{K_MAX}: length error > 1e-12 at {length_bad} k (first k={:?}, worst {:.2e} at k={}); \
             {} k with two or more integers; {} spacing violations {:?}",
            first_length_bad,
            length_worst.0,
            length_worst.1,
            multi.len(),
            spacing_bad.len(),
            &spacing_bad[..spacing_bad.len().min(5)]
        ),
    )
}

fn c10() -> Outcome {
    let mut rng = stream_rng(SEED, 10);
    let (mut p_err, mut v_err) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let q = loop {
            let q: f64 = rng.gen_range(0.5..1.0);
            if q > 0.5 {
                break q;
            }
        };
        let (p, v) = maximize_rainbow_h(q).unwrap();
        p_err = p_err.max((p - 2.0 * q / (1.0 + q)).abs());
        v_err = v_err.max((v - (1.0 - (1.0 - q) / 2.0).ln()).abs());
    }
    outcome(
        p_err <= 1e-10 && v_err <= 1e-10,
        format!("100 q in (0.5,1): argmax error {p_err:.1e}, max-value error {v_err:.1e}"),
    )
}

fn c11() -> Outcome {
    let mut bad = Vec::new();
    for k in 3..=100usize {
        let d0 = (2 * k - 1) as f64 * (k as f64).ln();
        // The rate is affine and decreasing in d, so a grid from d0 up covers the claim.
        for t in 0..=1000 {
            let d = d0 * (1.0 + t as f64 / 100.0);
            if first_moment_rate(k, d) >= 0.0 {
                bad.push(format!("k={k} d={d:.3} not negative"));
                break;
            }
        }
        match threshold_record(k, EpsMode::Pow09.eps(k)) {
            Ok(r) if first_moment_rate(k, r.d_col - 1.0) > 0.0 => {}
            Ok(r) => bad.push(format!("k={k} not positive at d_col-1={:.3}", r.d_col - 1.0)),
            Err(e) => bad.push(format!("k={k}: no d_col ({e})")),
        }
    }
    outcome(bad.is_empty(), format!("k = 3..100: {} violations {}", bad.len(), bad.join("; ")))
}
