//! `regcolor`: command-line front end to `regcolor-core`.
//!
//! Exit status is 0 on success, 2 when an oracle guard refuses the input and
//! 1 for every other error, including malformed command lines.

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use regcolor_core::birkhoff::{maximize_f, DoublyStochasticMatrix, MaximizeOptions, Region};
use regcolor_core::clustergeo::{
    build_wuy, check_core_inclusion, density_predicate, default_size_cap, freedom_report_with_core, sigma_ell_core,
    FreeCounting, DEFAULT_BOUND_C, DEFAULT_ELL,
};
use regcolor_core::colorings::{
    cluster_of, count_colorings, is_balanced, is_nice, is_proper, is_separable, is_skewed, max_edge_deviation,
    rainbow_vertices, ColoringParams, CountFilter,
};
use regcolor_core::experiments::{self, run_experiment, ExperimentSpec};
use regcolor_core::graphs::io::{parse_coloring, parse_graph, write_coloring, write_graph};
use regcolor_core::graphs::{sample_configuration, sample_planted_round_robin};
use regcolor_core::moments::{first_moment_rate, profile_components, second_moment_rate};
use regcolor_core::threshold::{threshold_csv, threshold_table, EpsMode};
use regcolor_core::{stream_rng, Coloring, Distribution, Error, MultiGraph};

#[derive(Parser, Debug)]
#[command(name = "regcolor", version, about = "Colourability laboratory for random regular graphs")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a configuration-model graph, or a planted one with --k.
    Sample(SampleArgs),
    /// Count proper colourings exactly.
    Count(CountArgs),
    /// First-moment rate and its components, or a CSV sweep.
    Rates(RatesArgs),
    /// Maximise the second-moment function over doubly stochastic matrices.
    Optimize(OptimizeArgs),
    /// Core and free-vertex profile of a coloured graph.
    Core(CoreArgs),
    /// Threshold table.
    Threshold(ThresholdArgs),
    /// Run an experiment spec file.
    Experiment(ExperimentArgs),
    /// Evaluate one colouring or graph predicate.
    Predicate(PredicateArgs),
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    /// Plant the round-robin colouring with this many colours.
    #[arg(long)]
    k: Option<usize>,
    /// Where to write the planted colouring.
    #[arg(long, requires = "k")]
    coloring_out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FilterArg {
    None,
    Balanced,
    Skewed,
    Nice12,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value_t = FilterArg::None, conflicts_with = "sizes")]
    filter: FilterArg,
    /// Count only colourings with these class sizes, comma-separated.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
struct RatesArgs {
    #[arg(long, required_unless_present = "k_range")]
    k: Option<usize>,
    #[arg(long, required_unless_present = "d_range")]
    d: Option<f64>,
    /// Sweep `a..b` (inclusive) over k.
    #[arg(long, requires = "d_range")]
    k_range: Option<Range<usize>>,
    /// Sweep `lo..hi` over d.
    #[arg(long, requires = "k_range")]
    d_range: Option<Range<f64>>,
    #[arg(long, default_value_t = 11)]
    d_steps: usize,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum RegionArg {
    Unconstrained,
    Separable,
    ZeroStableAway,
    Stability,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: f64,
    #[arg(long, value_enum, default_value_t = RegionArg::Unconstrained)]
    region: RegionArg,
    #[arg(long, default_value_t = 0.1)]
    kappa: f64,
    /// Minimum sup-distance from the flat matrix for zero-stable-away.
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    /// Number of stable entries for the stability region.
    #[arg(long, default_value_t = 1)]
    s: usize,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    AllColors,
    OtherColors,
}

impl From<ModeArg> for FreeCounting {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::AllColors => FreeCounting::AllColors,
            ModeArg::OtherColors => FreeCounting::OtherColors,
        }
    }
}

#[derive(Args, Debug)]
struct CoreArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    coloring: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ELL)]
    ell: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::AllColors)]
    mode: ModeArg,
    /// Number of colours; defaults to one more than the largest colour used.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    /// Inclusive range `a..b` of colour counts.
    #[arg(long, default_value = "3..20")]
    k_range: Range<usize>,
    /// `pow09`, `zero` or `value:x`.
    #[arg(long, default_value = "pow09")]
    eps_mode: EpsMode,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Spec file, or `-` for stdin.
    spec: PathBuf,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum PredicateName {
    Proper,
    Balanced,
    Skewed,
    Separable,
    Nice,
    Rainbow,
    ClusterSize,
    Density,
}

#[derive(Args, Debug)]
struct PredicateArgs {
    #[arg(value_enum)]
    name: PredicateName,
    #[arg(long)]
    graph: PathBuf,
    /// Required by every predicate except density.
    #[arg(long)]
    coloring: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    kappa: f64,
    /// Edge bound for density: sets may hold at most `c·|S|` edges.
    #[arg(long, default_value_t = DEFAULT_BOUND_C)]
    bound_c: f64,
    /// Largest set size examined by density; default `n·k^(-4/3)`.
    #[arg(long)]
    size_cap: Option<usize>,
    /// Number of colours; defaults to one more than the largest colour used.
    /// Density uses it for the default size cap, with 3 if absent.
    #[arg(long)]
    k: Option<usize>,
}

/// Inclusive `a..b`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Range<T> {
    lo: T,
    hi: T,
}

impl<T: FromStr + PartialOrd + Copy> FromStr for Range<T> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
        let parse = |x: &str| x.trim().parse::<T>().map_err(|_| format!("bad bound {x:?} in {s:?}"));
        let (lo, hi) = (parse(a)?, parse(b)?);
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        Ok(Range { lo, hi })
    }
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Io(PathBuf, io::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("regcolor: {e}");
            match e {
                CliError::Core(ref err) if err.is_guard() => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Io(path.into(), e))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::Io(path.into(), e))
}

fn read_graph(path: &Path) -> CliResult<MultiGraph> {
    Ok(parse_graph(&read_text(path)?)?)
}

fn read_coloring(path: &Path, g: &MultiGraph, k: Option<usize>) -> CliResult<Coloring> {
    let sigma = parse_coloring(&read_text(path)?, k)?;
    if sigma.n() != g.n() {
        return Err(Error::DimensionMismatch(format!("colouring has {} entries, graph has {} vertices", sigma.n(), g.n())).into());
    }
    Ok(sigma)
}

fn write_out(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Io(p.into(), e)),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Io("<stdout>".into(), e)),
    }
}

fn json_bytes(v: &Value) -> Vec<u8> {
    let mut b = serde_json::to_vec_pretty(v).expect("JSON values always serialise");
    b.push(b'\n');
    b
}

/// The requested format if the command supports it, else `default`.
fn pick(requested: Option<Format>, default: Format, allowed: &[Format], command: &str) -> CliResult<Format> {
    let f = requested.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Usage(format!("{command} does not support --format {f:?}").to_lowercase()))
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let out = cli.out.as_deref();
    let bytes = match &cli.command {
        Command::Sample(a) => {
            let format = pick(cli.format, Format::Text, &[Format::Text, Format::Json], "sample")?;
            sample(a, cli.seed, format)?
        }
        Command::Count(a) => {
            pick(cli.format, Format::Json, &[Format::Json], "count")?;
            count(a)?
        }
        Command::Rates(a) => {
            let default = if a.k_range.is_some() { Format::Csv } else { Format::Json };
            let format = pick(cli.format, default, &[Format::Json, Format::Csv], "rates")?;
            rates(a, format)?
        }
        Command::Optimize(a) => {
            pick(cli.format, Format::Json, &[Format::Json], "optimize")?;
            optimize(a, cli.seed)?
        }
        Command::Core(a) => {
            pick(cli.format, Format::Json, &[Format::Json], "core")?;
            core(a)?
        }
        Command::Threshold(a) => {
            let format = pick(cli.format, Format::Csv, &[Format::Csv, Format::Json], "threshold")?;
            let table = threshold_table(a.k_range.lo, a.k_range.hi, a.eps_mode)?;
            match format {
                Format::Csv => threshold_csv(&table.records).into_bytes(),
                _ => json_bytes(&json!({
                    "eps_mode": a.eps_mode.to_string(),
                    "k0": table.k0,
                    "records": table.records,
                })),
            }
        }
        Command::Experiment(a) => {
            let format = pick(cli.format, Format::Json, &[Format::Json, Format::Csv], "experiment")?;
            let spec = ExperimentSpec::parse(&read_text(&a.spec)?)?;
            let report = run_experiment(&spec)?;
            let f = if format == Format::Csv { experiments::Format::Csv } else { experiments::Format::Json };
            experiments::emit(&report, f)
        }
        Command::Predicate(a) => {
            pick(cli.format, Format::Json, &[Format::Json], "predicate")?;
            predicate(a)?
        }
    };
    write_out(out, &bytes)
}

fn sample(a: &SampleArgs, seed: u64, format: Format) -> CliResult<Vec<u8>> {
    let mut rng = stream_rng(seed, 0);
    let (g, sigma) = match a.k {
        Some(k) => {
            let (g, sigma, _) = sample_planted_round_robin(a.n, k, a.d, &mut rng)?;
            (g, Some(sigma))
        }
        None => (sample_configuration(a.n, a.d, &mut rng)?.contract(), None),
    };
    if let (Some(path), Some(sigma)) = (&a.coloring_out, &sigma) {
        fs::write(path, write_coloring(sigma)).map_err(|e| CliError::Io(path.clone(), e))?;
    }
    Ok(match format {
        Format::Json => json_bytes(&json!({
            "n": g.n(),
            "d": g.d(),
            "seed": seed,
            "edges": g.edges(),
            "coloring": sigma.as_ref().map(|s| s.colors()),
        })),
        _ => write_graph(&g).into_bytes(),
    })
}

fn count(a: &CountArgs) -> CliResult<Vec<u8>> {
    let g = read_graph(&a.graph)?;
    let (filter, name) = match (&a.sizes, a.filter) {
        (Some(sizes), _) => (CountFilter::Profile(sizes.clone()), "profile"),
        (None, FilterArg::None) => (CountFilter::None, "none"),
        (None, FilterArg::Balanced) => (CountFilter::Balanced, "balanced"),
        (None, FilterArg::Skewed) => (CountFilter::Skewed, "skewed"),
        (None, FilterArg::Nice12) => (CountFilter::NiceConditions12, "nice12"),
    };
    let c = count_colorings(&g, a.k, &filter)?;
    Ok(json_bytes(&json!({
        "n": g.n(),
        "d": g.d(),
        "k": a.k,
        "filter": name,
        "sizes": a.sizes,
        "count": c.to_string(),
    })))
}

fn rate_row(k: usize, d: f64) -> CliResult<(f64, f64, f64, f64)> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k={k}, need k ≥ 2")).into());
    }
    let (entropy, penalty) = profile_components(&Distribution::uniform(k), d);
    let second = second_moment_rate(DoublyStochasticMatrix::flat(k).matrix(), d)?;
    Ok((first_moment_rate(k, d), entropy, penalty, second))
}

fn rates(a: &RatesArgs, format: Format) -> CliResult<Vec<u8>> {
    let grid: Vec<(usize, f64)> = match (a.k_range, a.d_range) {
        (Some(kr), Some(dr)) => {
            let steps = a.d_steps.max(1);
            let ds: Vec<f64> = (0..steps)
                .map(|i| if steps == 1 { dr.lo } else { dr.lo + (dr.hi - dr.lo) * i as f64 / (steps - 1) as f64 })
                .collect();
            (kr.lo..=kr.hi).flat_map(|k| ds.iter().map(move |&d| (k, d))).collect()
        }
        _ => vec![(a.k.unwrap_or(0), a.d.unwrap_or(f64::NAN))],
    };
    if format == Format::Csv {
        let mut s = String::from("k,d,first_moment_rate,entropy,penalty,second_moment_flat\n");
        for (k, d) in grid {
            let (v, h, p, f) = rate_row(k, d)?;
            s.push_str(&format!("{k},{d},{v},{h},{p},{f}\n"));
        }
        return Ok(s.into_bytes());
    }
    let rows = grid
        .into_iter()
        .map(|(k, d)| {
            let (v, h, p, f) = rate_row(k, d)?;
            Ok(json!({
                "input": {"k": k, "d": d},
                "value": v,
                "components": {"entropy": h, "penalty": p},
                "second_moment_flat": f,
            }))
        })
        .collect::<CliResult<Vec<Value>>>()?;
    Ok(json_bytes(&if rows.len() == 1 { rows[0].clone() } else { Value::Array(rows) }))
}

fn optimize(a: &OptimizeArgs, seed: u64) -> CliResult<Vec<u8>> {
    let region = match a.region {
        RegionArg::Unconstrained => Region::Unconstrained,
        RegionArg::Separable => Region::Separable { kappa: a.kappa },
        RegionArg::ZeroStableAway => Region::ZeroStableAway { eta: a.eta, kappa: a.kappa },
        RegionArg::Stability => Region::Stability { s: a.s, kappa: a.kappa },
    };
    let opts = MaximizeOptions {
        restarts: a.restarts,
        max_iters: a.max_iters,
        ..MaximizeOptions::default()
    };
    let r = maximize_f(a.k, a.d, &region, &opts, seed)?;
    Ok(json_bytes(&json!({
        "k": a.k,
        "d": a.d,
        "region": region,
        "best_value": r.best_value,
        "f_flat": r.f_flat,
        "exceeded_flat": r.exceeded_flat,
        "argmax": r.best.rows(),
        "restarts": a.restarts,
        "starts": r.starts,
        "seed": seed,
    })))
}

fn core(a: &CoreArgs) -> CliResult<Vec<u8>> {
    let g = read_graph(&a.graph)?;
    let sigma = read_coloring(&a.coloring, &g, a.k)?;
    let core = sigma_ell_core(&g, &sigma, a.ell)?;
    let sets = build_wuy(&g, &sigma, a.ell)?;
    let free = freedom_report_with_core(&g, &sigma, &core, a.mode.into())?;
    let inclusion = check_core_inclusion(&g, &sigma, a.ell)?;
    Ok(json_bytes(&json!({
        "n": g.n(),
        "k": sigma.k(),
        "ell": a.ell,
        "mode": free.mode,
        "core_size": core.len(),
        "W": sets.w.len(),
        "U": sets.u.len(),
        "U_prime": sets.u_prime.len(),
        "Y": sets.y.len(),
        "F1": free.free_1.len(),
        "F2": free.free_2.len(),
        "complete": free.complete.len(),
        "cluster_log2_upper": free.cluster_log2_upper,
        "inclusion_ok": inclusion.holds,
    })))
}

fn predicate(a: &PredicateArgs) -> CliResult<Vec<u8>> {
    let g = read_graph(&a.graph)?;
    let name = a.name.to_possible_value().expect("no skipped variants").get_name().to_owned();
    if let PredicateName::Density = a.name {
        let cap = a.size_cap.unwrap_or_else(|| default_size_cap(g.n(), a.k.unwrap_or(3)));
        let r = density_predicate(&g, a.bound_c, cap);
        return Ok(json_bytes(&json!({
            "predicate": name,
            "value": r.witness.is_none(),
            "witnesses": r.witness,
            "bound_c": r.bound_c,
            "size_cap": r.size_cap,
            "exhaustive": r.exhaustive,
        })));
    }
    let path = a
        .coloring
        .as_deref()
        .ok_or_else(|| CliError::Usage(format!("predicate {name} needs --coloring")))?;
    let sigma = read_coloring(path, &g, a.k)?;
    let params = ColoringParams {
        kappa: a.kappa,
        ..ColoringParams::default()
    };
    let (value, witnesses): (Value, Option<Value>) = match a.name {
        PredicateName::Proper => {
            let bad: Vec<_> = g
                .edges()
                .iter()
                .filter(|&&(u, v)| sigma.color(u) == sigma.color(v))
                .collect();
            (json!(is_proper(&g, &sigma)), Some(json!(bad)))
        }
        PredicateName::Balanced => (json!(is_balanced(&sigma)), Some(json!(sigma.class_sizes()))),
        PredicateName::Skewed => (json!(is_skewed(&g, &sigma)), Some(json!(max_edge_deviation(&g, &sigma)))),
        PredicateName::Separable => (json!(is_separable(&g, &sigma, &params)?), None),
        PredicateName::Nice => {
            let r = is_nice(&g, &sigma, &params)?;
            (json!(r.is_nice()), Some(json!(r)))
        }
        PredicateName::Rainbow => {
            let r = rainbow_vertices(&g, &sigma);
            (json!(r.len()), Some(json!(r)))
        }
        PredicateName::ClusterSize => (json!(cluster_of(&g, &sigma, &params)?.len()), None),
        PredicateName::Density => unreachable!("handled above"),
    };
    let mut obj = json!({"predicate": name, "value": value});
    if let Some(w) = witnesses {
        obj["witnesses"] = w;
    }
    Ok(json_bytes(&obj))
}
