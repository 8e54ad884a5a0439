//! Execution of each experiment kind.

use std::time::Instant;

use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;

use super::emit::{RunReport, SCHEMA_VERSION};
use super::stats::{summarize, Metric};
use super::{ExperimentSpec, Kind};
use crate::birkhoff::{maximize_f, MaximizeOptions, Region};
use crate::clustergeo::{build_wuy, freedom_report_with_core, sigma_ell_core, FreeCounting, DEFAULT_ELL};
use crate::clustergeo::check_core_inclusion;
use crate::colorings::{count_colorings, vacant_table, CountFilter};
use crate::error::{Error, Result};
use crate::graphs::{cycle_census, enumerate_configurations, sample_configuration, sample_planted_round_robin, MultiGraph};
use crate::limits::LIMITS;
use crate::moments::expected_proper_colorings;
use crate::rng::{stream_rng, StreamRng};
use crate::threshold::{threshold_table, EpsMode};

/// Runs `f` on every sample index with its own stream, in parallel, and
/// returns the results in index order.
fn per_sample<T, F>(spec: &ExperimentSpec, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, &mut StreamRng) -> Result<T> + Sync,
{
    (0..spec.samples)
        .into_par_iter()
        .map(|i| f(i, &mut stream_rng(spec.seed, i as u64)).map_err(|e| e.context(format!("sample {i}"))))
        .collect()
}

fn column(rows: &[Vec<f64>], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j]).collect()
}

fn uniform_graph(n: usize, d: usize, rng: &mut StreamRng) -> Result<MultiGraph> {
    Ok(sample_configuration(n, d, rng)?.contract())
}

fn nd(spec: &ExperimentSpec) -> (usize, usize) {
    (spec.n.unwrap_or(0), spec.d.unwrap_or(0))
}

fn cycle_census_run(spec: &ExperimentSpec) -> Result<Vec<Metric>> {
    let (n, d) = nd(spec);
    let max_len: usize = spec.knob("max_len", 3)?;
    if max_len == 0 {
        return Err(Error::InvalidInput("max_len must be at least 1".into()));
    }
    let rows = per_sample(spec, |_, rng| {
        let g = uniform_graph(n, d, rng)?;
        Ok(cycle_census(&g, max_len).counts.iter().map(|&c| c as f64).collect::<Vec<_>>())
    })?;
    Ok((1..=max_len)
        .map(|j| {
            // Poisson mean (d−1)^j / (2j).
            let lambda = ((d - 1) as f64).powi(j as i32) / (2 * j) as f64;
            summarize(format!("xi_{j}"), &column(&rows, j - 1)).with_reference(lambda)
        })
        .collect())
}

fn expected_colorings(n: usize, d: usize, k: usize) -> Result<f64> {
    let e = expected_proper_colorings(n as u64, d as u64, k, None)?;
    Ok(e.to_f64().unwrap_or(f64::NAN))
}

fn colorable(g: &MultiGraph, k: usize) -> Result<bool> {
    Ok(!count_colorings(g, k, &CountFilter::None)?.is_zero())
}

/// Exact fraction of configurations whose multigraph is `k`-colourable.
pub(crate) fn exact_colorable_fraction(n: usize, d: usize, k: usize) -> Result<f64> {
    let mut total = 0u64;
    let mut good = 0u64;
    for c in enumerate_configurations(n, d)? {
        total += 1;
        good += colorable(&c.contract(), k)? as u64;
    }
    Ok(good as f64 / total as f64)
}

fn colorability_run(spec: &ExperimentSpec) -> Result<Vec<Metric>> {
    let (n, d) = nd(spec);
    let k = spec.k.unwrap_or(0);
    let oracle = match spec.knob_str("oracle", "auto") {
        "auto" => n * d <= LIMITS.enumerate_max_clones,
        "true" => true,
        "false" => false,
        other => return Err(Error::Parse(format!("oracle = {other:?}, expected auto, true or false"))),
    };
    let rows = per_sample(spec, |_, rng| {
        let g = uniform_graph(n, d, rng)?;
        let z = count_colorings(&g, k, &CountFilter::None)?;
        let zf = z.to_f64().unwrap_or(f64::INFINITY);
        Ok(vec![(zf > 0.0) as u8 as f64, zf])
    })?;
    let mut colorable_m = summarize("colorable", &column(&rows, 0));
    if oracle {
        colorable_m = colorable_m.with_reference(exact_colorable_fraction(n, d, k)?);
    }
    let z = summarize("colorings", &column(&rows, 1)).with_reference(expected_colorings(n, d, k)?);
    Ok(vec![colorable_m, z])
}

fn vacant_run(spec: &ExperimentSpec) -> Result<Vec<Metric>> {
    let (n, d) = nd(spec);
    let k = spec.k.unwrap_or(0);
    let rows = per_sample(spec, |_, rng| {
        let (g, sigma, counts) = sample_planted_round_robin(n, k, d, rng)?;
        let table = vacant_table(&g, &sigma);
        let sizes = sigma.class_sizes();
        let mut row = Vec::new();
        for i in 0..k {
            for j in (0..k).filter(|&j| j != i) {
                row.push(table.get(i, j).len() as f64 / sizes[i] as f64);
                row.push(counts[i][j] as f64 / (d * sizes[i]) as f64);
            }
        }
        Ok(row)
    })?;
    let mut out = Vec::new();
    let mut col = 0;
    for i in 0..k {
        for j in (0..k).filter(|&j| j != i) {
            // The clone counts are the same in every sample.
            let ratio = rows[0][col + 1];
            let m = summarize(format!("vacant_{i}_{j}"), &column(&rows, col));
            out.push(m.with_reference((1.0 - ratio).powi(d as i32)));
            col += 2;
        }
    }
    Ok(out)
}

fn core_run(spec: &ExperimentSpec) -> Result<Vec<Metric>> {
    let (n, d) = nd(spec);
    let k = spec.k.unwrap_or(0);
    let ell: usize = spec.knob("ell", DEFAULT_ELL)?;
    let mode = match spec.knob_str("mode", "all-colors") {
        "all-colors" => FreeCounting::AllColors,
        "other-colors" => FreeCounting::OtherColors,
        other => return Err(Error::Parse(format!("mode = {other:?}, expected all-colors or other-colors"))),
    };
    let names = [
        "core", "w", "u", "u_prime", "y", "free_1", "free_2", "complete", "inclusion_ok", "cluster_log2_upper_per_n",
    ];
    let rows = per_sample(spec, |_, rng| {
        let (g, sigma, _) = sample_planted_round_robin(n, k, d, rng)?;
        let core = sigma_ell_core(&g, &sigma, ell)?;
        let sets = build_wuy(&g, &sigma, ell)?;
        let free = freedom_report_with_core(&g, &sigma, &core, mode)?;
        let incl = check_core_inclusion(&g, &sigma, ell)?;
        let nf = n as f64;
        Ok(vec![
            core.len() as f64 / nf,
            sets.w.len() as f64 / nf,
            sets.u.len() as f64 / nf,
            sets.u_prime.len() as f64 / nf,
            sets.y.len() as f64 / nf,
            free.free_1.len() as f64 / nf,
            free.free_2.len() as f64 / nf,
            free.complete.len() as f64 / nf,
            incl.holds as u8 as f64,
            free.cluster_log2_upper / nf,
        ])
    })?;
    Ok(names
        .iter()
        .enumerate()
        .map(|(j, name)| summarize(*name, &column(&rows, j)))
        .collect())
}

fn moment_run(spec: &ExperimentSpec) -> Result<Vec<Metric>> {
    let (n, d) = nd(spec);
    let k = spec.k.unwrap_or(0);
    let balanced = n % k == 0;
    let rows = per_sample(spec, |_, rng| {
        let g = uniform_graph(n, d, rng)?;
        let z = count_colorings(&g, k, &CountFilter::None)?;
        let mut row = vec![z.to_f64().unwrap_or(f64::INFINITY)];
        if balanced {
            let zb = count_colorings(&g, k, &CountFilter::Balanced)?;
            row.push(zb.to_f64().unwrap_or(f64::INFINITY));
        }
        Ok(row)
    })?;
    let mut out = vec![summarize("z", &column(&rows, 0)).with_reference(expected_colorings(n, d, k)?)];
    if balanced {
        let profile = vec![(n / k) as u64; k];
        let e = expected_proper_colorings(n as u64, d as u64, k, Some(&profile))?;
        out.push(summarize("z_balanced", &column(&rows, 1)).with_reference(e.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(out)
}

fn region_of(spec: &ExperimentSpec) -> Result<Region> {
    let kappa: f64 = spec.knob("kappa", 0.1)?;
    Ok(match spec.knob_str("region", "unconstrained") {
        "unconstrained" => Region::Unconstrained,
        "separable" => Region::Separable { kappa },
        "zero-stable-away" => Region::ZeroStableAway {
            eta: spec.knob("eta", 0.05)?,
            kappa,
        },
        "stability" => Region::Stability {
            s: spec.knob("s", 0)?,
            kappa,
        },
        other => return Err(Error::Parse(format!("unknown region {other:?}"))),
    })
}

fn optimize_run(spec: &ExperimentSpec) -> Result<Vec<Metric>> {
    let k = spec.k.unwrap_or(0);
    let d_lo: f64 = spec.knob("d_lo", 1.0)?;
    let d_hi: f64 = spec.knob("d_hi", d_lo)?;
    let steps: usize = spec.knob("d_steps", 1)?;
    if steps == 0 || d_hi < d_lo {
        return Err(Error::InvalidInput("need d_steps ≥ 1 and d_lo ≤ d_hi".into()));
    }
    let region = region_of(spec)?;
    let opts = MaximizeOptions {
        restarts: spec.knob("restarts", 10)?,
        ..Default::default()
    };
    let mut out = Vec::new();
    for s in 0..steps {
        let d = if steps == 1 {
            d_lo
        } else {
            d_lo + (d_hi - d_lo) * s as f64 / (steps - 1) as f64
        };
        let rows = per_sample(spec, |_, rng| {
            let r = maximize_f(k, d, &region, &opts, rng.gen())?;
            Ok(vec![r.best_value - r.f_flat, r.exceeded_flat as u8 as f64])
        })?;
        out.push(summarize(format!("gap@d={d}"), &column(&rows, 0)));
        out.push(summarize(format!("exceeded@d={d}"), &column(&rows, 1)));
    }
    Ok(out)
}

fn threshold_run(spec: &ExperimentSpec) -> Result<(Vec<Metric>, Vec<crate::threshold::ThresholdRecord>)> {
    let k_lo: usize = spec.knob("k_lo", 3)?;
    let k_hi: usize = spec.knob("k_hi", 100)?;
    let eps: EpsMode = spec.knob_str("eps", "pow09").parse()?;
    let t = threshold_table(k_lo, k_hi, eps)?;
    let length_err = t
        .records
        .iter()
        .map(|r| (r.length() - (2.0 * std::f64::consts::LN_2 - 1.0 + 2.0 * r.eps_k)).abs())
        .fold(0.0, f64::max);
    let integers = t.records.iter().filter(|r| r.integer_in_interval.is_some()).count();
    let metrics = vec![
        summarize("max_length_error", &[length_err]),
        summarize("integer_rows", &[integers as f64]),
        summarize("k0", &[t.k0.map_or(f64::NAN, |k| k as f64)]),
    ];
    Ok((metrics, t.records))
}

/// Runs `spec` and reports per-metric summaries. Deterministic given the
/// spec, apart from `wall_time_secs`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunReport> {
    spec.validate()?;
    let start = Instant::now();
    let ctx = |e: Error| e.context(format!("experiment {} ({})", spec.kind, &spec.hash()[..12]));
    let mut table = None;
    let metrics = match spec.kind {
        Kind::CycleCensus => cycle_census_run(spec),
        Kind::ColorabilityFrequency => colorability_run(spec),
        Kind::VacantFractions => vacant_run(spec),
        Kind::CoreProfile => core_run(spec),
        Kind::MomentVsOracle => moment_run(spec),
        Kind::OptimizeSweep => optimize_run(spec),
        Kind::ThresholdTable => threshold_run(spec).map(|(m, t)| {
            table = Some(t);
            m
        }),
    }
    .map_err(ctx)?;
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        spec: spec.clone(),
        spec_hash: spec.hash(),
        metrics,
        table,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}
