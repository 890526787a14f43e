//! Seeded experiment sweeps, slope fitting and table output.
//!
//! A sweep runs one job per (parameter, seed) pair, where the parameter is
//! the stride `p` for the decimation experiments and the bandwidth `M` for
//! the Fourier convergence experiment. Jobs run on a rayon pool of the
//! configured size; rows are sorted by `(param, seed, quantity, node)` before
//! they are returned, so the table does not depend on the worker count.
//! Wall-clock timings are returned separately and never enter the CSV.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decimation::{decimated_solve, node_error_bound, BaseSolver, DecimationOptions};
use crate::error::{PronyError, Result};
use crate::forward::{add_noise, evaluate_moments};
use crate::fourier::{reconstruct, signal_coeffs, sup_error_away, synthetic_signal, SignalOptions};
use crate::io::ModelRecord;
use crate::matching::{circle_distance, match_estimates};
use crate::model::{PiecewiseSignal, PronyModel, SampleSet, SamplingScheme};
use crate::scalar::arg;

/// Exclusion radius around the true jumps for the pointwise error.
pub const POINTWISE_RHO: f64 = 0.1;
/// Grid size for the pointwise error.
pub const POINTWISE_GRID: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    FixedCountDecimation,
    FixedTopIndexDecimation,
    FourierConvergence,
    BoundCheck,
}

/// Solver path of the decimation sweeps. `Lm` is the Hankel estimate
/// followed by Levenberg–Marquardt refinement; the others are unrefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverChoice {
    #[default]
    Hankel,
    Esprit,
    Annihilation,
    Lm,
}

impl SolverChoice {
    pub fn options(self) -> DecimationOptions {
        let (base, refine) = match self {
            SolverChoice::Hankel => (BaseSolver::Hankel, false),
            SolverChoice::Esprit => (BaseSolver::Esprit, false),
            SolverChoice::Annihilation => (BaseSolver::Annihilation, false),
            SolverChoice::Lm => (BaseSolver::Hankel, true),
        };
        DecimationOptions { base, refine }
    }
}

/// Ground-truth model of a decimation sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelSpec {
    /// The same model for every seed.
    Fixed(ModelRecord),
    /// A fresh [`random_simple_model`] per seed.
    Random { nodes: usize, min_separation: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(default)]
    pub options: SignalOptions,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputPaths {
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub svg: Option<PathBuf>,
}

/// JSON-serializable sweep description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub signal: Option<SignalSpec>,
    /// Noise radius `ε` (decimation sweeps).
    #[serde(default)]
    pub noise: f64,
    pub seeds: Vec<u64>,
    /// Strides `p` (decimation sweeps).
    #[serde(default)]
    pub strides: Vec<usize>,
    /// Bandwidths `M` (Fourier convergence).
    #[serde(default)]
    pub bandwidths: Vec<usize>,
    /// Number of samples (fixed-count and bound-check sweeps).
    #[serde(default)]
    pub count: Option<usize>,
    /// Highest available index (fixed-top-index sweep).
    #[serde(default)]
    pub top_index: Option<usize>,
    #[serde(default)]
    pub solver: SolverChoice,
    /// Branch hints are the true node arguments shifted by a seeded uniform
    /// draw from `[-hint_error, hint_error]`.
    #[serde(default)]
    pub hint_error: f64,
    /// Worker threads; `None` uses the rayon default.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub output: OutputPaths,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: SweepConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(PronyError::InvalidArgument(m.into()));
        if self.seeds.is_empty() {
            return bad("seed list is empty");
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad("noise must be finite and ≥ 0");
        }
        if !(self.hint_error >= 0.0 && self.hint_error.is_finite()) {
            return bad("hint_error must be finite and ≥ 0");
        }
        if self.workers == Some(0) {
            return bad("workers must be positive");
        }
        match self.kind {
            ExperimentKind::FourierConvergence => {
                let Some(s) = self.signal else { return bad("fourier-convergence needs a signal spec") };
                if s.k == 0 {
                    return bad("K must be positive");
                }
                let ms = &self.bandwidths;
                if ms.len() < 5 {
                    return bad("fourier-convergence needs at least 5 bandwidths");
                }
                if ms[0] == 0 || ms.windows(2).any(|w| w[1] <= w[0]) {
                    return bad("bandwidths must be positive and increasing");
                }
                let ratio = ms[1] as f64 / ms[0] as f64;
                if ms.windows(2).any(|w| ((w[1] as f64 / w[0] as f64) / ratio - 1.0).abs() > 1e-9) {
                    return bad("bandwidths must form a geometric sequence");
                }
            }
            kind => {
                match &self.model {
                    None => return bad("decimation sweeps need a model"),
                    Some(ModelSpec::Fixed(m)) => {
                        m.to_model()?;
                    }
                    Some(ModelSpec::Random { nodes, min_separation }) => {
                        if *nodes == 0
                            || !(*min_separation > 0.0)
                            || *min_separation * *nodes as f64 > std::f64::consts::PI
                        {
                            return bad("random model needs nodes ≥ 1 and 0 < nodes·separation ≤ π");
                        }
                    }
                }
                if self.strides.is_empty() || self.strides.contains(&0) {
                    return bad("stride list must be non-empty and positive");
                }
                if kind == ExperimentKind::FixedTopIndexDecimation {
                    let Some(top) = self.top_index else { return bad("fixed-top-index sweep needs top_index") };
                    if self.strides.iter().any(|&p| top / p == 0) {
                        return bad("every stride must leave at least one sample below top_index");
                    }
                } else if self.count.unwrap_or(0) == 0 {
                    return bad("fixed-count sweep needs a positive count");
                }
            }
        }
        Ok(())
    }

    fn truth(&self, seed: u64) -> Result<PronyModel<f64>> {
        match self.model.as_ref().expect("validated") {
            ModelSpec::Fixed(m) => m.to_model(),
            ModelSpec::Random { nodes, min_separation } => random_simple_model(*nodes, *min_separation, seed),
        }
    }

    /// Scheme used at stride `p`.
    pub fn scheme(&self, p: usize) -> Result<SamplingScheme> {
        match self.kind {
            ExperimentKind::FixedTopIndexDecimation => {
                SamplingScheme::new(0, p, self.top_index.expect("validated") / p)
            }
            _ => SamplingScheme::new(0, p, self.count.expect("validated")),
        }
    }

    /// Highest index over all strides; noise is drawn on `0..=union_top`.
    fn union_top(&self) -> Result<usize> {
        self.strides.iter().map(|&p| self.scheme(p).map(|s| s.max_index())).try_fold(0, |a, b| b.map(|b| a.max(b)))
    }
}

/// Random model with `k` simple nodes whose arguments are pairwise at least
/// `min_separation` apart on the circle and coefficients with modulus in
/// `[0.5, 2]` and uniform phase. Deterministic in `seed`.
pub fn random_simple_model(k: usize, min_separation: f64, seed: u64) -> Result<PronyModel<f64>> {
    if k == 0 || !(min_separation > 0.0) || min_separation * k as f64 > std::f64::consts::PI {
        return Err(PronyError::InvalidArgument("need k ≥ 1 and 0 < k·separation ≤ π".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d6f_6465_6c00);
    let mut args: Vec<f64> = Vec::with_capacity(k);
    while args.len() < k {
        let a = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        if args.iter().all(|&b| circle_distance(a, b) >= min_separation) {
            args.push(a);
        }
    }
    let coefficients = (0..k)
        .map(|_| vec![Complex::from_polar(rng.gen_range(0.5..=2.0), rng.gen_range(0.0..std::f64::consts::TAU))])
        .collect();
    Ok(PronyModel::from_args(&args, coefficients)?.canonicalized())
}

/// What a row measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantity {
    /// Circle distance of one recovered node argument.
    Node,
    /// Largest jump position error.
    Jump,
    /// Largest error of the order-`ℓ` jump magnitudes.
    Magnitude(usize),
    /// `sup_error_away` with [`POINTWISE_RHO`].
    Pointwise,
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Quantity::Node => f.write_str("node"),
            Quantity::Jump => f.write_str("jump"),
            Quantity::Magnitude(l) => write!(f, "magnitude-{l}"),
            Quantity::Pointwise => f.write_str("pointwise"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Stride `p` or bandwidth `M`.
    pub param: usize,
    pub seed: u64,
    /// True-node index for node rows.
    pub node: Option<usize>,
    pub quantity: Quantity,
    /// `None` when the solve failed.
    pub error: Option<f64>,
    /// First-order node bound at `ε`, when defined.
    pub bound: Option<f64>,
    pub method: String,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    pub flags: String,
    /// `ok` or the failure message.
    pub status: String,
    /// Estimated model as compact JSON (node rows).
    pub model: String,
}

impl SweepRow {
    fn failed(param: usize, seed: u64, node: Option<usize>, quantity: Quantity, e: &PronyError) -> Self {
        SweepRow {
            param,
            seed,
            node,
            quantity,
            error: None,
            bound: None,
            method: String::new(),
            iterations: None,
            residual: None,
            flags: String::new(),
            status: e.to_string(),
            model: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub kind: ExperimentKind,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub param: usize,
    pub seed: u64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub quantity: Quantity,
    /// `(M, geometric mean error over seeds)` for the fitted bandwidths.
    pub points: Vec<(f64, f64)>,
    pub slope: Result<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub table: SweepTable,
    pub timings: Vec<Timing>,
    /// Fourier convergence only.
    pub slopes: Vec<SlopeFit>,
}

impl SweepTable {
    /// Median error per parameter for `quantity`, failures counting as `+∞`.
    pub fn medians(&self, quantity: Quantity) -> Vec<(usize, f64)> {
        let mut params: Vec<usize> = self.rows.iter().filter(|r| r.quantity == quantity).map(|r| r.param).collect();
        params.dedup();
        params
            .into_iter()
            .map(|p| {
                let vals: Vec<f64> = self
                    .rows
                    .iter()
                    .filter(|r| r.quantity == quantity && r.param == p)
                    .map(|r| r.error.unwrap_or(f64::INFINITY))
                    .collect();
                (p, median(vals))
            })
            .collect()
    }

    /// Distinct quantities in row order.
    pub fn quantities(&self) -> Vec<Quantity> {
        let mut q: Vec<Quantity> = self.rows.iter().map(|r| r.quantity).collect();
        q.sort();
        q.dedup();
        q
    }

    fn sort(&mut self) {
        self.rows.sort_by_key(|r| (r.param, r.seed, r.quantity, r.node));
    }
}

pub fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| PronyError::InvalidArgument(format!("thread pool: {e}")))
}

/// Exact moments of the seed's model on the stride-`p` scheme plus noise
/// drawn once on `0..=union_top` for the seed and subsampled.
pub fn sweep_samples(config: &SweepConfig, p: usize, seed: u64) -> Result<(PronyModel<f64>, SampleSet<f64>)> {
    let truth = config.truth(seed)?;
    let union = SamplingScheme::contiguous(config.union_top()? + 1)?;
    let noisy = add_noise(&evaluate_moments(&truth, &union)?, config.noise, seed)?;
    Ok((truth, noisy.subsample(config.scheme(p)?)?))
}

fn hints(truth: &PronyModel<f64>, hint_error: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6869_6e74);
    truth
        .nodes()
        .iter()
        .map(|&z| {
            let shift = if hint_error > 0.0 { rng.gen_range(-hint_error..=hint_error) } else { 0.0 };
            arg(z) + shift
        })
        .collect()
}

fn decimation_job(config: &SweepConfig, p: usize, seed: u64) -> (Vec<SweepRow>, Timing) {
    let setup = sweep_samples(config, p, seed);
    let (truth, samples) = match setup {
        Ok(v) => v,
        Err(e) => {
            return (vec![SweepRow::failed(p, seed, None, Quantity::Node, &e)], Timing { param: p, seed, seconds: 0.0 })
        }
    };
    let k = truth.node_count();
    let bounds = node_error_bound(&truth, 0, p, config.noise).ok();
    let h = hints(&truth, config.hint_error, seed);
    let start = Instant::now();
    let solved = decimated_solve(&samples, &truth.structure(), Some(&h), config.solver.options());
    let seconds = start.elapsed().as_secs_f64();
    let timing = Timing { param: p, seed, seconds };
    let result = solved.and_then(|(est, rep)| match_estimates(&est, &truth).map(|m| (est, rep, m)));
    let rows = match result {
        Ok((est, rep, matched)) => {
            let model = serde_json::to_string(&ModelRecord::from_model(&est)).expect("model serializes");
            (0..k)
                .map(|j| SweepRow {
                    param: p,
                    seed,
                    node: Some(j),
                    quantity: Quantity::Node,
                    error: Some(matched.node_errors[j]),
                    bound: bounds.as_ref().map(|b| b[j]),
                    method: rep.method_tag(),
                    iterations: Some(rep.iterations),
                    residual: Some(rep.residual),
                    flags: rep.flags_tag(),
                    status: "ok".into(),
                    model: model.clone(),
                })
                .collect()
        }
        Err(e) => (0..k)
            .map(|j| SweepRow {
                bound: bounds.as_ref().map(|b| b[j]),
                ..SweepRow::failed(p, seed, Some(j), Quantity::Node, &e)
            })
            .collect(),
    };
    (rows, timing)
}

fn run_decimation(config: &SweepConfig) -> Result<SweepOutcome> {
    let jobs: Vec<(usize, u64)> =
        config.strides.iter().flat_map(|&p| config.seeds.iter().map(move |&s| (p, s))).collect();
    let results: Vec<(Vec<SweepRow>, Timing)> =
        pool(config.workers)?.install(|| jobs.par_iter().map(|&(p, s)| decimation_job(config, p, s)).collect());
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    for (r, t) in results {
        rows.extend(r);
        timings.push(t);
    }
    let mut table = SweepTable { kind: config.kind, rows };
    table.sort();
    Ok(SweepOutcome { table, timings, slopes: Vec::new() })
}

/// Moments on `I_{0,p}` with a fixed count, disk noise, decimated solve with
/// the true arguments as branch hints; one row per (p, seed, node).
pub fn run_fixed_count_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    if !matches!(config.kind, ExperimentKind::FixedCountDecimation | ExperimentKind::BoundCheck) {
        return Err(PronyError::InvalidArgument(format!("config kind {:?} is not a fixed-count sweep", config.kind)));
    }
    run_decimation(config)
}

/// As [`run_fixed_count_sweep`] with the top index fixed and
/// `count = ⌊top/p⌋`.
pub fn run_fixed_top_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    if config.kind != ExperimentKind::FixedTopIndexDecimation {
        return Err(PronyError::InvalidArgument(format!(
            "config kind {:?} is not a fixed-top-index sweep",
            config.kind
        )));
    }
    run_decimation(config)
}

/// Per-jump errors after matching each true jump to the nearest estimate.
fn fourier_errors(signal: &PiecewiseSignal<f64>, m: usize) -> Result<Vec<(Quantity, f64)>> {
    let window = signal_coeffs(signal, m);
    let result = reconstruct(&window, signal.smoothness(), signal.jump_count(), signal.min_separation())?;
    let mut jump = 0.0f64;
    let mut mags = vec![0.0f64; signal.smoothness() + 1];
    for (x, a) in signal.jumps().iter().zip(signal.magnitudes()) {
        let (i, dist) = result
            .jumps
            .iter()
            .map(|y| circle_distance(*x, *y))
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one jump");
        jump = jump.max(dist);
        for (l, e) in mags.iter_mut().enumerate() {
            *e = e.max((result.magnitudes[i][l] - a[l]).abs());
        }
    }
    let mut out = vec![(Quantity::Jump, jump)];
    out.extend(mags.into_iter().enumerate().map(|(l, e)| (Quantity::Magnitude(l), e)));
    out.push((Quantity::Pointwise, sup_error_away(signal, &result, POINTWISE_RHO, POINTWISE_GRID)?));
    Ok(out)
}

fn fourier_job(spec: SignalSpec, m: usize, seed: u64) -> (Vec<SweepRow>, Timing) {
    let quantities: Vec<Quantity> = std::iter::once(Quantity::Jump)
        .chain((0..=spec.d).map(Quantity::Magnitude))
        .chain(std::iter::once(Quantity::Pointwise))
        .collect();
    let start = Instant::now();
    let result = synthetic_signal(spec.d, spec.k, seed, spec.options).and_then(|s| fourier_errors(&s, m));
    let timing = Timing { param: m, seed, seconds: start.elapsed().as_secs_f64() };
    let rows = match result {
        Ok(errs) => errs
            .into_iter()
            .map(|(q, e)| SweepRow {
                param: m,
                seed,
                node: None,
                quantity: q,
                error: Some(e),
                bound: None,
                method: "annihilation+lm".into(),
                iterations: None,
                residual: None,
                flags: String::new(),
                status: "ok".into(),
                model: String::new(),
            })
            .collect(),
        Err(e) => quantities.into_iter().map(|q| SweepRow::failed(m, seed, None, q, &e)).collect(),
    };
    (rows, timing)
}

/// Least-squares log–log fit over every `(M, seed)` error with `M` in
/// `params`. With the same seeds at every `M` this equals the fit through the
/// per-`M` geometric means, which are reported as the points.
fn pooled_fit(table: &SweepTable, quantity: Quantity, params: &[usize]) -> SlopeFit {
    let mut points = Vec::new();
    let mut all = Vec::new();
    for &m in params {
        let errs: Vec<f64> = table
            .rows
            .iter()
            .filter(|r| r.quantity == quantity && r.param == m)
            .map(|r| r.error.unwrap_or(f64::NAN))
            .collect();
        all.extend(errs.iter().map(|&e| (m as f64, e)));
        let mean_log = errs.iter().map(|e| e.ln()).sum::<f64>() / errs.len() as f64;
        points.push((m as f64, mean_log.exp()));
    }
    SlopeFit { quantity, points, slope: fit_loglog_slope(&all) }
}

/// Reconstruction errors over a geometric list of bandwidths, with log–log
/// slopes fitted over the largest `⌈n/2⌉` bandwidths by [`pooled_fit`].
pub fn run_fourier_convergence(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    if config.kind != ExperimentKind::FourierConvergence {
        return Err(PronyError::InvalidArgument(format!(
            "config kind {:?} is not a fourier-convergence sweep",
            config.kind
        )));
    }
    let spec = config.signal.expect("validated");
    let jobs: Vec<(usize, u64)> =
        config.bandwidths.iter().flat_map(|&m| config.seeds.iter().map(move |&s| (m, s))).collect();
    let results: Vec<(Vec<SweepRow>, Timing)> =
        pool(config.workers)?.install(|| jobs.par_iter().map(|&(m, s)| fourier_job(spec, m, s)).collect());
    let mut rows = Vec::new();
    let mut timings = Vec::new();
    for (r, t) in results {
        rows.extend(r);
        timings.push(t);
    }
    let mut table = SweepTable { kind: config.kind, rows };
    table.sort();
    let n = config.bandwidths.len();
    let fitted = &config.bandwidths[n - n.div_ceil(2)..];
    let slopes = table.quantities().into_iter().map(|q| pooled_fit(&table, q, fitted)).collect();
    Ok(SweepOutcome { table, timings, slopes })
}

/// Dispatches on the config kind.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    match config.kind {
        ExperimentKind::FixedCountDecimation | ExperimentKind::BoundCheck => run_fixed_count_sweep(config),
        ExperimentKind::FixedTopIndexDecimation => run_fixed_top_sweep(config),
        ExperimentKind::FourierConvergence => run_fourier_convergence(config),
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(PronyError::InvalidArgument("slope fit needs at least 2 points".into()));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(PronyError::InvalidArgument("slope fit needs finite positive values".into()));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(PronyError::InvalidArgument("slope fit needs two distinct x values".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Column names of [`emit_csv`].
pub const CSV_HEADER: [&str; 12] = [
    "param",
    "seed",
    "node",
    "quantity",
    "error",
    "bound",
    "method",
    "iterations",
    "residual",
    "flags",
    "status",
    "model",
];

fn opt<T: std::fmt::Debug>(v: Option<T>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

/// Table as CSV text with header [`CSV_HEADER`]. Floats use shortest
/// round-trip formatting; missing values are empty fields.
pub fn csv_string(table: &SweepTable) -> Result<String> {
    if table.rows.is_empty() {
        return Err(PronyError::InvalidArgument("empty table".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| PronyError::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in &table.rows {
        w.write_record([
            r.param.to_string(),
            r.seed.to_string(),
            r.node.map(|n| n.to_string()).unwrap_or_default(),
            r.quantity.to_string(),
            opt(r.error),
            opt(r.bound),
            r.method.clone(),
            r.iterations.map(|n| n.to_string()).unwrap_or_default(),
            opt(r.residual),
            r.flags.clone(),
            r.status.clone(),
            r.model.clone(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| PronyError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf-8 fields"))
}

pub fn emit_csv(table: &SweepTable, path: &Path) -> Result<()> {
    crate::io::write_text(path, &csv_string(table)?)
}

/// Labels of the log–log plot.
#[derive(Debug, Clone, PartialEq)]
pub struct AxesSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
}

impl AxesSpec {
    pub fn for_kind(kind: ExperimentKind) -> Self {
        let (title, x) = match kind {
            ExperimentKind::FixedCountDecimation => ("fixed sample count", "stride p"),
            ExperimentKind::FixedTopIndexDecimation => ("fixed top index", "stride p"),
            ExperimentKind::FourierConvergence => ("Fourier reconstruction", "bandwidth M"),
            ExperimentKind::BoundCheck => ("first-order bound check", "stride p"),
        };
        AxesSpec { title: title.into(), x_label: x.into(), y_label: "error".into() }
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Log–log plot: every finite positive error as a dot and the per-parameter
/// medians joined by a line, one colour per quantity.
pub fn svg_string(table: &SweepTable, axes: &AxesSpec) -> Result<String> {
    if table.rows.is_empty() {
        return Err(PronyError::InvalidArgument("empty table".into()));
    }
    let pts: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter_map(|r| r.error.filter(|&e| e > 0.0 && e.is_finite()).map(|e| (r.param as f64, e)))
        .filter(|p| p.0 > 0.0)
        .collect();
    let range = |vals: Vec<f64>| {
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else {
            let (a, b) = (lo.log10().floor(), hi.log10().ceil());
            if a == b {
                (a - 1.0, b + 1.0)
            } else {
                (a, b)
            }
        }
    };
    let (x0, x1) = range(pts.iter().map(|p| p.0).collect());
    let (y0, y1) = range(pts.iter().map(|p| p.1).collect());
    let (w, h, left, right, top, bottom) = (640.0, 480.0, 80.0, 160.0, 40.0, 60.0);
    let px = |x: f64| left + (x.log10() - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - (y.log10() - y0) / (y1 - y0) * (h - top - bottom);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        (w - right + left) / 2.0,
        escape(&axes.title)
    );
    let (xa, xb, ya, yb) = (left, w - right, top, h - bottom);
    let _ = writeln!(
        s,
        r#"<rect x="{xa}" y="{ya}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        xb - xa,
        yb - ya
    );
    for e in (x0 as i32)..=(x1 as i32) {
        let x = px(10f64.powi(e));
        let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{yb}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#, yb + 5.0);
        let _ =
            writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle" font-size="12">1e{e}</text>"#, yb + 20.0);
    }
    for e in (y0 as i32)..=(y1 as i32) {
        let y = py(10f64.powi(e));
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{y:.1}" x2="{xa}" y2="{y:.1}" stroke="black"/>"#, xa - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="12">1e{e}</text>"#,
            xa - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="14">{}</text>"#,
        (xa + xb) / 2.0,
        h - 15.0,
        escape(&axes.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.1}" text-anchor="middle" font-size="14" transform="rotate(-90 20 {:.1})">{}</text>"#,
        (ya + yb) / 2.0,
        (ya + yb) / 2.0,
        escape(&axes.y_label)
    );
    for (i, q) in table.quantities().into_iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        for r in table.rows.iter().filter(|r| r.quantity == q) {
            if let Some(e) = r.error.filter(|&e| e > 0.0 && e.is_finite()) {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.1}" cy="{:.1}" r="2" fill="{colour}" fill-opacity="0.3"/>"#,
                    px(r.param as f64),
                    py(e)
                );
            }
        }
        let line: Vec<String> = table
            .medians(q)
            .into_iter()
            .filter(|&(p, e)| p > 0 && e > 0.0 && e.is_finite())
            .map(|(p, e)| format!("{:.1},{:.1}", px(p as f64), py(e)))
            .collect();
        if !line.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#,
                line.join(" ")
            );
        }
        let ly = top + 20.0 * i as f64 + 10.0;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{colour}" stroke-width="2"/>"#,
            xb + 10.0,
            xb + 30.0
        );
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="12">{q}</text>"#, xb + 35.0, ly + 4.0);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn emit_svg(table: &SweepTable, path: &Path, axes: &AxesSpec) -> Result<()> {
    crate::io::write_text(path, &svg_string(table, axes)?)
}
