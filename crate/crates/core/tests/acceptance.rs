//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use decimated_prony::fourier::{induced_model, SignalOptions};
use decimated_prony::harness::{
    csv_string, median, random_simple_model, run_sweep, ExperimentKind, ModelSpec, OutputPaths, Quantity, SignalSpec,
    SolverChoice, SweepConfig, SweepOutcome,
};
use decimated_prony::io::ModelRecord;
use decimated_prony::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Moments by repeated complex multiplication, independent of the library's
/// forward map.
fn oracle_moments(model: &PronyModel64, count: usize) -> Vec<Complex<f64>> {
    (0..count)
        .map(|k| {
            model
                .nodes()
                .iter()
                .zip(model.coefficients())
                .map(|(z, c)| {
                    let amp = c
                        .iter()
                        .enumerate()
                        .fold(Complex::new(0.0, 0.0), |a, (l, v)| a + v * (k as f64).powi(l as i32));
                    z.powu(k as u32) * amp
                })
                .sum()
        })
        .collect()
}

fn decimation_config(
    kind: ExperimentKind,
    model: &PronyModel64,
    noise: f64,
    seeds: u64,
    strides: Vec<usize>,
) -> SweepConfig {
    SweepConfig {
        kind,
        model: Some(ModelSpec::Fixed(ModelRecord::from_model(model))),
        signal: None,
        noise,
        seeds: (0..seeds).collect(),
        strides,
        bandwidths: vec![],
        count: None,
        top_index: None,
        solver: SolverChoice::Hankel,
        hint_error: 0.0,
        workers: None,
        output: OutputPaths::default(),
    }
}

fn medians(out: &SweepOutcome) -> BTreeMap<usize, f64> {
    out.table.medians(Quantity::Node).into_iter().collect()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut worst_node = 0.0f64;
    let mut worst_coeff = 0.0f64;
    let mut failures = Vec::new();
    for seed in 0..50u64 {
        let k = 1 + (seed % 3) as usize;
        let model = random_simple_model(k, 0.3, 1000 + seed).unwrap();
        let count = 2 * model.unknowns() + 4;
        let samples =
            SampleSet::exact(SamplingScheme::contiguous(count).unwrap(), oracle_moments(&model, count)).unwrap();
        let st = model.structure();
        let mut paths: Vec<(&str, Result<PronyModel64>)> = vec![
            ("hankel", prony_hankel_solve(&samples, &st).map(|r| r.0)),
            ("esprit", esprit_solve(&samples, k).map(|r| r.0)),
            ("lm", decimated_solve(&samples, &st, None, DecimationOptions::default()).map(|r| r.0)),
        ];
        if k == 1 {
            paths.push(("annihilation", annihilation_solve_single(&samples, 1, None).map(|r| r.0)));
        }
        for (name, est) in paths {
            match est.and_then(|e| match_estimates(&e, &model)) {
                Ok(r) => {
                    worst_node = worst_node.max(r.max_node_error());
                    worst_coeff = worst_coeff.max(r.max_coefficient_error());
                }
                Err(e) => failures.push(format!("seed {seed} {name}: {e}")),
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && worst_node < 1e-8 && worst_coeff < 1e-6 && secs < 5.0;
    verdict(
        pass,
        format!("max node error {worst_node:.2e} (< 1e-8), max coefficient error {worst_coeff:.2e} (< 1e-6), {} failures, {secs:.2}s (< 5s){}", failures.len(), failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()),
    )
}

fn criterion_2() -> Verdict {
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let d = (seed % 4) as usize;
        let k = 1 + (seed as usize / 4) % 3;
        let s =
            fourier::synthetic_signal(d, k, 500 + seed, SignalOptions { psi_degree: 0, ..Default::default() }).unwrap();
        let ks: Vec<i64> = (1..=500).collect();
        let phi = phi_coeffs(s.jumps(), s.magnitudes(), d, &ks).unwrap();
        let half: Vec<Complex<f64>> = std::iter::once(Complex::new(0.0, 0.0)).chain(phi).collect();
        let window = CoefficientWindow::from_nonnegative(&half).unwrap();
        let transformed = eckhoff_transform(&window, d).unwrap();
        let model = induced_model(s.jumps(), s.magnitudes(), d).unwrap();
        let direct = evaluate_moments(&model, &SamplingScheme::new(1, 1, 500).unwrap()).unwrap();
        for (a, b) in transformed.values().iter().zip(direct.values()) {
            worst = worst.max((a - b).norm() / (1.0 + b.norm()));
        }
    }
    verdict(worst <= 1e-10, format!("max |difference|/(1+|m_k|) over k = 1..500 and 20 signals: {worst:.2e} (≤ 1e-10)"))
}

fn close_pair() -> PronyModel64 {
    PronyModel::from_args(&[-0.005, 0.005], vec![vec![Complex::new(1.0, 0.0)], vec![Complex::new(1.0, 0.0)]]).unwrap()
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for solver in [SolverChoice::Hankel, SolverChoice::Lm] {
        let mut c = decimation_config(ExperimentKind::FixedCountDecimation, &close_pair(), 1e-4, 50, vec![1, 8, 32]);
        c.count = Some(66);
        c.solver = solver;
        let med = medians(&run_sweep(&c).unwrap());
        let ratio = med[&1] / med[&32];
        pass &= ratio >= 10.0;
        parts.push(format!(
            "{solver:?}: median p=1 {:.2e}, p=8 {:.2e}, p=32 {:.2e}, ratio {ratio:.1}",
            med[&1], med[&8], med[&32]
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    verdict(pass, format!("{} (ratio ≥ 10), {secs:.1}s (< 60s)", parts.join("; ")))
}

fn criterion_4() -> Verdict {
    let mut c = decimation_config(ExperimentKind::FixedTopIndexDecimation, &close_pair(), 1e-4, 50, vec![1, 10, 100]);
    c.top_index = Some(2200);
    c.solver = SolverChoice::Lm;
    let out = run_sweep(&c).unwrap();
    let med = medians(&out);
    let low: Vec<f64> = med.iter().filter(|(&p, _)| p <= 10).map(|(_, &e)| e).collect();
    let ratio = low.iter().cloned().fold(0.0, f64::max) / low.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut times: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for t in &out.timings {
        times.entry(t.param).or_default().push(t.seconds);
    }
    let (t1, t100) = (median(times[&1].clone()), median(times[&100].clone()));
    c.solver = SolverChoice::Hankel;
    let hankel = medians(&run_sweep(&c).unwrap());
    let pass = ratio <= 10.0 && t100 < t1;
    verdict(
        pass,
        format!(
            "LM path medians p=1 {:.2e}, p=10 {:.2e}, p=100 {:.2e}; max/min over p ≤ 10 {ratio:.2} (≤ 10); median solve time p=1 {:.2e}s > p=100 {:.2e}s; plain Hankel ratio {:.1} (informational)",
            med[&1],
            med[&10],
            med[&100],
            t1,
            t100,
            hankel[&1].max(hankel[&10]) / hankel[&1].min(hankel[&10])
        ),
    )
}

fn criterion_5() -> Verdict {
    let model = PronyModel::from_args(
        &[-2.0, 0.45, 1.7],
        vec![vec![Complex::new(1.0, 0.0)], vec![Complex::new(0.0, 1.5)], vec![Complex::new(-0.8, 0.3)]],
    )
    .unwrap();
    let mut worst = 0.0f64;
    let mut failed = 0;
    for solver in [SolverChoice::Hankel, SolverChoice::Lm] {
        let mut c = decimation_config(ExperimentKind::BoundCheck, &model, 1e-6, 100, vec![1, 4, 16]);
        c.count = Some(2 * model.unknowns());
        c.solver = solver;
        for r in run_sweep(&c).unwrap().table.rows {
            match (r.error, r.bound) {
                (Some(e), Some(b)) => worst = worst.max(e / b),
                _ => failed += 1,
            }
        }
    }
    verdict(
        failed == 0 && worst <= 10.0,
        format!(
            "max error/bound over 100 seeds, p ∈ {{1, 4, 16}}, Hankel and LM: {worst:.3} (≤ 10), {failed} failed rows"
        ),
    )
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (d, k) in [(0usize, 1usize), (1, 2), (2, 1)] {
        let c = SweepConfig {
            kind: ExperimentKind::FourierConvergence,
            model: None,
            signal: Some(SignalSpec { d, k, options: SignalOptions::default() }),
            noise: 0.0,
            seeds: (0..10).collect(),
            strides: vec![],
            bandwidths: vec![64, 128, 256, 512, 1024, 2048],
            count: None,
            top_index: None,
            solver: SolverChoice::Annihilation,
            hint_error: 0.0,
            workers: None,
            output: OutputPaths::default(),
        };
        let out = run_sweep(&c).unwrap();
        let df = d as f64;
        let mut fits = Vec::new();
        for fit in &out.slopes {
            let limit = match fit.quantity {
                Quantity::Jump => -(df + 2.0) + 0.4,
                Quantity::Pointwise => -(df + 1.0) + 0.4,
                Quantity::Magnitude(l) => (l as f64 - df - 1.0) + 0.4,
                Quantity::Node => unreachable!(),
            };
            let (ok, shown) = match &fit.slope {
                Ok(s) => (*s <= limit, format!("{s:.2}")),
                Err(e) => (false, e.to_string()),
            };
            pass &= ok;
            fits.push(format!("{} {shown} (≤ {limit:.1}){}", fit.quantity, if ok { "" } else { " FAIL" }));
        }
        parts.push(format!("d={d} K={k}: {}", fits.join(", ")));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 300.0;
    verdict(pass, format!("{}; {secs:.1}s (< 300s)", parts.join("; ")))
}

fn run_property<S: Strategy>(
    name: &str,
    cases: u32,
    strategy: S,
    check: impl Fn(S::Value) -> common::Check,
) -> Option<String> {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, check).err().map(|e| format!("{name}: {e}"))
}

fn criterion_7() -> Verdict {
    use common::*;
    let mut failures = Vec::new();
    failures.extend(run_property("decimation identity", 64, (simple_model(), any::<u64>()), |(m, s)| {
        decimation_identity(&m, s)
    }));
    // Every stride up to 64, random argument and hint offset.
    failures.extend(run_property(
        "branch exactness",
        16,
        (-std::f64::consts::PI..std::f64::consts::PI, -0.999f64..0.999),
        |(t, e)| (1..=64).try_for_each(|p| branch_exactness(t, p, e)),
    ));
    failures.extend(run_property("jacobian", 64, confluent_model(), |m| jacobian_matches_differences(&m)));
    failures.extend(run_property("modulation law", 32, (-3.0f64..3.0, 0.2f64..1.5, 0.1f64..0.9), |(t, h, r)| {
        modulation_law(t, h, r)
    }));
    failures.extend(run_property(
        "translation equivariance",
        8,
        (0usize..=1, 1usize..=2, any::<u64>(), -3.0f64..3.0),
        |(d, k, s, t)| translation_equivariance(d, k, s, t),
    ));
    failures.extend(run_property("scale equivariance", 32, simple_model(), |m| {
        scale_equivariance(&m, Complex::new(2.0, 0.0))?;
        scale_equivariance(&m, Complex::new(0.0, 1.0))
    }));
    failures.extend(run_property(
        "conjugate symmetry",
        64,
        (0usize..=3, 1usize..=3, any::<u64>(), 1usize..80),
        |(d, k, s, m)| window_conjugate_symmetry(d, k, s, m),
    ));
    verdict(
        failures.is_empty(),
        if failures.is_empty() { "7 property suites passed".into() } else { failures.join("; ") },
    )
}

fn criterion_8() -> Verdict {
    let mut c = decimation_config(ExperimentKind::FixedCountDecimation, &close_pair(), 1e-4, 12, vec![1, 4, 16]);
    c.count = Some(40);
    c.solver = SolverChoice::Lm;
    let mut f = SweepConfig {
        kind: ExperimentKind::FourierConvergence,
        model: None,
        signal: Some(SignalSpec { d: 1, k: 2, options: SignalOptions { psi_degree: 1024, ..Default::default() } }),
        noise: 0.0,
        seeds: (0..4).collect(),
        strides: vec![],
        bandwidths: vec![64, 128, 256, 512, 1024],
        count: None,
        top_index: None,
        solver: SolverChoice::Annihilation,
        hint_error: 0.0,
        workers: None,
        output: OutputPaths::default(),
    };
    let mut identical = true;
    let mut rows = 0;
    for config in [&mut c, &mut f] {
        let mut outputs = Vec::new();
        for workers in [1usize, 2, 4, 1] {
            config.workers = Some(workers);
            outputs.push(csv_string(&run_sweep(config).unwrap().table).unwrap());
        }
        rows += outputs[0].lines().count() - 1;
        identical &= outputs.iter().all(|o| o == &outputs[0]);
    }
    verdict(
        identical,
        format!("fixed-count and fourier-convergence CSVs byte-identical over workers 1, 2, 4, 1 ({rows} rows)"),
    )
}

fn main() {
    let criteria: [(u32, fn() -> Verdict); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut failed = 0;
    for (n, run) in criteria {
        let v = run();
        println!("criterion {n}: {} | {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
