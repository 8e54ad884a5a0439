//! Multi-start projected-gradient ascent of `f` over the Birkhoff polytope.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify_stability, project_doubly_stochastic, DoublyStochasticMatrix, StabilityClass};
use crate::error::{Error, Result};
use crate::moments::f_unchecked;
use crate::rng::stream_rng;

const ARMIJO: f64 = 1e-4;
const CLIP: f64 = 1e-12;
const SINKHORN_TOL: f64 = 1e-13;
const SINKHORN_ITERS: usize = 20_000;
const EXCEED_MARGIN: f64 = 1e-9;

/// Where candidates are accepted. Regions are enforced by rejection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    Unconstrained,
    /// Separable with exactly `s` entries `≥ 1 − κ`.
    Stability { s: usize, kappa: f64 },
    /// 0-stable and at sup-distance at least `η` from the flat matrix.
    ZeroStableAway { eta: f64, kappa: f64 },
    Separable { kappa: f64 },
}

impl Region {
    fn check_feasible(&self, k: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InfeasibleRegion(m));
        let kappa_ok = |kappa: f64| (0.0..1.0).contains(&kappa);
        match *self {
            Region::Unconstrained => Ok(()),
            Region::Separable { kappa } if !kappa_ok(kappa) => bad(format!("κ={kappa} outside [0,1)")),
            Region::Separable { .. } => Ok(()),
            Region::Stability { kappa, .. } | Region::ZeroStableAway { kappa, .. } if !kappa_ok(kappa) => {
                bad(format!("κ={kappa} outside [0,1)"))
            }
            Region::Stability { s, .. } if s > k => bad(format!("{s}-stable needs s ≤ k={k}")),
            // k−1 stable entries leave a last entry of at least 1 − (k−1)κ.
            Region::Stability { s, kappa } if s + 1 == k && kappa < 0.49 && 1.0 - (k - 1) as f64 * kappa > 0.51 => {
                bad(format!("{s}-stable with κ={kappa} forces a further entry above 0.51"))
            }
            Region::ZeroStableAway { eta, .. } if eta > 1.0 - 1.0 / k as f64 => {
                bad(format!("no matrix lies at sup-distance {eta} from flat for k={k}"))
            }
            _ => Ok(()),
        }
    }
}

pub fn in_region(rho: &DoublyStochasticMatrix, region: &Region) -> bool {
    match *region {
        Region::Unconstrained => true,
        Region::Stability { s, kappa } => classify_stability(rho, kappa).class == StabilityClass::Stable(s),
        Region::ZeroStableAway { eta, kappa } => {
            let k = rho.k();
            classify_stability(rho, kappa).class == StabilityClass::Stable(0)
                && rho.sup_distance(&DMatrix::from_element(k, k, 1.0 / k as f64)) >= eta
        }
        Region::Separable { kappa } => classify_stability(rho, kappa).separable,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximizeOptions {
    /// Random interior starts, on top of the flat matrix and corner starts.
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once the projected gradient has sup-norm below this.
    pub grad_tol: f64,
    /// Start from mixtures of partial identities with the flat matrix.
    pub corner_starts: bool,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        MaximizeOptions {
            restarts: 20,
            max_iters: 2000,
            grad_tol: 1e-10,
            corner_starts: true,
        }
    }
}

/// One accepted iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub start: usize,
    pub iter: usize,
    pub value: f64,
    pub in_region: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximizeResult {
    pub best: DoublyStochasticMatrix,
    pub best_value: f64,
    pub best_start: usize,
    pub f_flat: f64,
    /// Some accepted candidate beat `f(ρ̄) + 10⁻⁹`.
    pub exceeded_flat: bool,
    pub starts: usize,
    pub trace: Vec<TracePoint>,
}

fn starting_points(k: usize, opts: &MaximizeOptions) -> usize {
    1 + if opts.corner_starts { k } else { 0 } + opts.restarts
}

// Start 0 is flat, then corners diag(I_s, flat) blended with flat, then random.
fn start_matrix(k: usize, idx: usize, opts: &MaximizeOptions, seed: u64) -> Result<DMatrix<f64>> {
    let flat = DMatrix::from_element(k, k, 1.0 / k as f64);
    let corners = if opts.corner_starts { k } else { 0 };
    if idx == 0 {
        return Ok(flat);
    }
    if idx <= corners {
        let s = idx;
        let rest = (k - s).max(1) as f64;
        let block = DMatrix::from_fn(k, k, |i, j| match (i < s, j < s) {
            (true, true) => (i == j) as u8 as f64,
            (false, false) => 1.0 / rest,
            _ => 0.0,
        });
        return Ok(block * 0.95 + flat * 0.05);
    }
    let mut rng = stream_rng(seed, idx as u64);
    let m = DMatrix::from_fn(k, k, |_, _| rng.gen::<f64>().powi(3) + 1e-6);
    Ok(project_doubly_stochastic(&m, SINKHORN_TOL, SINKHORN_ITERS)?.matrix.into_inner())
}

fn full_gradient(x: &DMatrix<f64>, d: f64) -> DMatrix<f64> {
    let k = x.nrows() as f64;
    let den = k * k - 2.0 * k + x.iter().map(|v| v * v).sum::<f64>();
    x.map(|v| -(v.max(CLIP).ln() + 1.0) / k + d * v / den)
}

// Orthogonal projection onto matrices with zero row and column sums.
fn tangent(g: &DMatrix<f64>) -> DMatrix<f64> {
    let k = g.nrows() as f64;
    let mean = g.sum() / (k * k);
    let rows: Vec<f64> = g.row_iter().map(|r| r.sum() / k).collect();
    let cols: Vec<f64> = g.column_iter().map(|c| c.sum() / k).collect();
    DMatrix::from_fn(g.nrows(), g.ncols(), |i, j| g[(i, j)] - rows[i] - cols[j] + mean)
}

struct StartOutcome {
    trace: Vec<TracePoint>,
    best: Option<(f64, DMatrix<f64>)>,
}

fn ascend(start: usize, x0: DMatrix<f64>, d: f64, region: &Region, opts: &MaximizeOptions) -> StartOutcome {
    let mut x = x0;
    let mut fx = f_unchecked(&x.map(|v| v.max(CLIP)), d);
    let mut trace = Vec::new();
    let mut best = None;
    let mut record = |iter: usize, x: &DMatrix<f64>, fx: f64, trace: &mut Vec<TracePoint>| {
        let ds = DoublyStochasticMatrix { m: x.clone() };
        let inside = in_region(&ds, region);
        trace.push(TracePoint { start, iter, value: fx, in_region: inside });
        if inside && best.as_ref().map_or(true, |(b, _)| fx > *b) {
            best = Some((fx, x.clone()));
        }
    };
    record(0, &x, fx, &mut trace);
    for iter in 1..=opts.max_iters {
        let g = full_gradient(&x, d);
        let p = tangent(&g);
        if p.amax() < opts.grad_tol {
            break;
        }
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-16 {
            let y = (&x + &p * t).map(|v| v.max(CLIP));
            if let Ok(proj) = project_doubly_stochastic(&y, SINKHORN_TOL, SINKHORN_ITERS) {
                let y = proj.matrix.into_inner();
                let fy = f_unchecked(&y, d);
                if fy >= fx + ARMIJO * g.dot(&(&y - &x)) && fy.is_finite() {
                    accepted = Some((y, fy));
                    break;
                }
            }
            t /= 2.0;
        }
        let Some((y, fy)) = accepted else { break };
        let gain = fy - fx;
        x = y;
        fx = fy;
        record(iter, &x, fx, &mut trace);
        if gain < 1e-15 {
            break;
        }
    }
    StartOutcome { trace, best }
}

/// Multi-start ascent of `f` over doubly stochastic `k×k` matrices.
///
/// Starts are the flat matrix, `k` corner starts (if enabled) and
/// `opts.restarts` random interior points drawn from `stream_rng(seed, idx)`.
/// Every accepted iterate is a candidate; those outside `region` are
/// discarded. Ties are broken towards the lower start index, so results do
/// not depend on scheduling.
pub fn maximize_f(k: usize, d: f64, region: &Region, opts: &MaximizeOptions, seed: u64) -> Result<MaximizeResult> {
    if k < 3 {
        return Err(Error::InvalidInput(format!("k={k}, need k ≥ 3")));
    }
    region.check_feasible(k)?;
    let n_starts = starting_points(k, opts);
    let starts = (0..n_starts)
        .map(|i| start_matrix(k, i, opts, seed))
        .collect::<Result<Vec<_>>>()?;
    let outcomes: Vec<StartOutcome> = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, x0)| ascend(i, x0, d, region, opts))
        .collect();
    let f_flat = f_unchecked(&DMatrix::from_element(k, k, 1.0 / k as f64), d);
    let mut best: Option<(f64, usize, DMatrix<f64>)> = None;
    let mut trace = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        trace.extend(o.trace);
        if let Some((v, m)) = o.best {
            if best.as_ref().map_or(true, |(b, _, _)| v > *b) {
                best = Some((v, i, m));
            }
        }
    }
    let Some((best_value, best_start, m)) = best else {
        return Err(Error::InfeasibleRegion(format!(
            "none of {} evaluated candidates lies in {region:?}",
            trace.len()
        )));
    };
    Ok(MaximizeResult {
        best: DoublyStochasticMatrix { m },
        best_value,
        best_start,
        f_flat,
        exceeded_flat: trace.iter().any(|t| t.in_region && t.value > f_flat + EXCEED_MARGIN),
        starts: n_starts,
        trace,
    })
}
