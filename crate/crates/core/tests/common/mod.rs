//! Property checks shared by the property suite and the acceptance runner.
#![allow(dead_code)]

use decimated_prony::fourier::{synthetic_signal, SignalOptions};
use decimated_prony::harness::random_simple_model;
use decimated_prony::*;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Check = std::result::Result<(), TestCaseError>;

pub fn fail<E: std::fmt::Display>(e: E) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

/// Random simple model with `k ≤ 3` nodes at least 0.3 apart.
pub fn simple_model() -> impl Strategy<Value = PronyModel64> {
    (1usize..=3, any::<u64>()).prop_map(|(k, seed)| random_simple_model(k, 0.3, seed).unwrap())
}

/// Random model with one or two nodes of multiplicity up to 3.
pub fn confluent_model() -> impl Strategy<Value = PronyModel64> {
    let node = (-3.1f64..3.1, 1usize..=3, prop::collection::vec((0.5f64..2.0, 0.0f64..std::f64::consts::TAU), 3));
    prop::collection::vec(node, 1..=2)
        .prop_filter("separated", |v| v.len() == 1 || circle_distance(v[0].0, v[1].0) >= 0.5)
        .prop_map(|v| {
            let args: Vec<f64> = v.iter().map(|n| n.0).collect();
            let coeffs =
                v.iter().map(|n| n.2[..n.1].iter().map(|&(r, t)| Complex::from_polar(r, t)).collect()).collect();
            PronyModel::from_args(&args, coeffs).unwrap()
        })
}

pub fn exact(model: &PronyModel64, count: usize) -> SampleSet64 {
    evaluate_moments(model, &SamplingScheme::contiguous(count).unwrap()).unwrap()
}

pub fn circle_metric(a: f64, b: f64, c: f64) -> Check {
    let (ab, ba, bc, ac) = (circle_distance(a, b), circle_distance(b, a), circle_distance(b, c), circle_distance(a, c));
    prop_assert!((0.0..=std::f64::consts::PI + 1e-15).contains(&ab));
    prop_assert_eq!(ab, ba);
    prop_assert!(circle_distance(a, a) == 0.0);
    prop_assert!(ac <= ab + bc + 1e-12, "{} > {} + {}", ac, ab, bc);
    Ok(())
}

pub fn self_match_is_zero(m: &PronyModel64) -> Check {
    let r = match_estimates(m, m).map_err(fail)?;
    prop_assert!(r.max_node_error() == 0.0 && r.max_coefficient_error() == 0.0);
    prop_assert_eq!(m.unknowns(), m.degree() + m.node_count());
    Ok(())
}

pub fn moments_are_linear(m: &PronyModel64, other: Vec<Complex<f64>>, alpha: f64) -> Check {
    let mut it = other.into_iter().cycle();
    let c2: Vec<Vec<Complex<f64>>> =
        m.coefficients().iter().map(|c| c.iter().map(|_| it.next().unwrap()).collect()).collect();
    let sum: Vec<Vec<Complex<f64>>> =
        m.coefficients().iter().zip(&c2).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y * alpha).collect()).collect();
    let scheme = SamplingScheme::new(2, 3, 10).unwrap();
    let e1 = evaluate_moments(m, &scheme).unwrap();
    let e2 = evaluate_moments(&m.with_coefficients(c2).unwrap(), &scheme).unwrap();
    let es = evaluate_moments(&m.with_coefficients(sum).unwrap(), &scheme).unwrap();
    for ((a, b), s) in e1.values().iter().zip(e2.values()).zip(es.values()) {
        let expect = a + b * alpha;
        prop_assert!((s - expect).norm() <= 1e-11 * (1.0 + expect.norm()));
    }
    Ok(())
}

/// Complex Jacobian against central differences: each coefficient is moved
/// along 1 and i, each node along its argument (`dz = iz·dθ`).
pub fn jacobian_matches_differences(m: &PronyModel64) -> Check {
    let scheme = SamplingScheme::new(1, 2, 8).unwrap();
    let jac = jacobian(m, &scheme).unwrap();
    let h = 1e-6;
    let i = Complex::new(0.0, 1.0);
    let mut col = 0;
    for j in 0..m.node_count() {
        let mut cases: Vec<(PronyModel64, PronyModel64, usize, Complex<f64>)> = Vec::new();
        for l in 0..m.coefficients()[j].len() {
            for dir in [Complex::new(1.0, 0.0), i] {
                let mv = |sign: f64| {
                    let mut c = m.coefficients().to_vec();
                    c[j][l] += dir * (sign * h);
                    m.with_coefficients(c).unwrap()
                };
                cases.push((mv(1.0), mv(-1.0), col + l, dir));
            }
        }
        let zc = col + m.coefficients()[j].len();
        let mv = |sign: f64| {
            let mut a = m.node_args();
            a[j] += sign * h;
            PronyModel::from_args(&a, m.coefficients().to_vec()).unwrap()
        };
        cases.push((mv(1.0), mv(-1.0), zc, i * m.nodes()[j]));
        for (plus, minus, c, dir) in cases {
            let fp = evaluate_moments(&plus, &scheme).unwrap();
            let fm = evaluate_moments(&minus, &scheme).unwrap();
            let fd: Vec<Complex<f64>> = fp.values().iter().zip(fm.values()).map(|(a, b)| (a - b) / (2.0 * h)).collect();
            let scale = fd.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
            for (row, v) in fd.iter().enumerate() {
                let analytic = jac[(row, c)] * dir;
                prop_assert!((analytic - v).norm() <= 1e-5 * scale, "column {} row {}: {} vs {}", c, row, analytic, v);
            }
        }
        col = zc + 1;
    }
    Ok(())
}

pub fn distinct_nodes_are_regular(m: &PronyModel64) -> Check {
    prop_assert!(regularity_check(m, 1, RegularityTolerances::default()).regular);
    Ok(())
}

/// For the model induced by real jump magnitudes, `m_{-k} = conj(m_k)`;
/// `m_{-k}` is the moment at `k` of the model with conjugated nodes and
/// coefficients `(-1)^ℓ c_ℓ`.
pub fn real_signal_symmetry(d: usize, k: usize, seed: u64) -> Check {
    let s = synthetic_signal(d, k, seed, SignalOptions { psi_degree: 0, ..Default::default() }).map_err(fail)?;
    let m = decimated_prony::fourier::induced_model(s.jumps(), s.magnitudes(), d).map_err(fail)?;
    let mirrored = PronyModel::new(
        m.nodes().iter().map(|z| z.conj()).collect(),
        m.coefficients()
            .iter()
            .map(|c| c.iter().enumerate().map(|(l, v)| if l % 2 == 0 { *v } else { -v }).collect())
            .collect(),
    )
    .map_err(fail)?;
    let scheme = SamplingScheme::new(1, 1, 40).unwrap();
    let a = evaluate_moments(&m, &scheme).unwrap();
    let b = evaluate_moments(&mirrored, &scheme).unwrap();
    for (x, y) in a.values().iter().zip(b.values()) {
        prop_assert!((x.conj() - y).norm() <= 1e-12 * (1.0 + x.norm()));
    }
    Ok(())
}

pub fn round_trip_simple(m: &PronyModel64) -> Check {
    let s = exact(m, 2 * m.unknowns() + 6);
    let k = m.node_count();
    let mut outs = vec![
        prony_hankel_solve(&s, &m.structure()).map_err(fail)?.0,
        esprit_solve(&s, k).map_err(fail)?.0,
        decimated_solve(&s, &m.structure(), None, DecimationOptions::default()).map_err(fail)?.0,
    ];
    if k == 1 {
        outs.push(annihilation_solve_single(&s, 1, None).map_err(fail)?.0);
    }
    for est in &outs {
        let r = match_estimates(est, m).map_err(fail)?;
        prop_assert!(r.max_node_error() < 1e-8, "node error {}", r.max_node_error());
        prop_assert!(r.max_coefficient_error() < 1e-6, "coefficient error {}", r.max_coefficient_error());
    }
    for est in &outs[1..] {
        prop_assert!(match_estimates(est, &outs[0]).map_err(fail)?.max_node_error() < 1e-8);
    }
    Ok(())
}

pub fn round_trip_confluent(m: &PronyModel64) -> Check {
    let s = exact(m, 2 * m.unknowns() + 8);
    let (est, _) = decimated_solve(&s, &m.structure(), None, DecimationOptions::default()).map_err(fail)?;
    let r = match_estimates(&est, m).map_err(fail)?;
    prop_assert!(r.max_node_error() < 1e-5 && r.max_coefficient_error() < 1e-5, "{:?}", r);
    Ok(())
}

pub fn lm_does_not_increase_residual(m: &PronyModel64, seed: u64) -> Check {
    let s = add_noise(&exact(m, 2 * m.unknowns() + 6), 1e-3, seed).unwrap();
    let (init, init_report) = prony_hankel_solve(&s, &m.structure()).map_err(fail)?;
    let (_, rep) = lm_refine(&s, &init).map_err(fail)?;
    prop_assert!(rep.residual_l2 <= init_report.residual_l2 * (1.0 + 1e-12));
    Ok(())
}

pub fn scale_equivariance(m: &PronyModel64, lambda: Complex<f64>) -> Check {
    let s = exact(m, 2 * m.unknowns() + 6);
    let scaled = s.scaled(lambda);
    let structure = m.structure();
    let pairs = [
        (prony_hankel_solve(&s, &structure).map_err(fail)?.0, prony_hankel_solve(&scaled, &structure).map_err(fail)?.0),
        (esprit_solve(&s, m.node_count()).map_err(fail)?.0, esprit_solve(&scaled, m.node_count()).map_err(fail)?.0),
    ];
    for (a, b) in pairs {
        let expect = a.scaled(lambda);
        let r = match_estimates(&b, &expect).map_err(fail)?;
        prop_assert!(r.max_node_error() < 1e-9);
        prop_assert!(r.max_coefficient_error() < 1e-8 * lambda.norm());
    }
    Ok(())
}

/// `p = 1`, `t = 0` decimated solves equal the base solvers bit for bit.
pub fn decimation_identity(m: &PronyModel64, seed: u64) -> Check {
    let s = add_noise(&exact(m, 2 * m.unknowns() + 6), 1e-6, seed).unwrap();
    let st = m.structure();
    let plain = DecimationOptions { base: BaseSolver::Hankel, refine: false };
    prop_assert_eq!(decimated_solve(&s, &st, None, plain).map_err(fail)?, prony_hankel_solve(&s, &st).map_err(fail)?);
    let esprit = DecimationOptions { base: BaseSolver::Esprit, refine: false };
    prop_assert_eq!(
        decimated_solve(&s, &st, None, esprit).map_err(fail)?,
        esprit_solve(&s, m.node_count()).map_err(fail)?
    );
    let refined = decimated_solve(&s, &st, None, DecimationOptions::default()).map_err(fail)?.0;
    let composed = lm_refine(&s, &prony_hankel_solve(&s, &st).map_err(fail)?.0).map_err(fail)?.0;
    prop_assert_eq!(refined, composed);
    Ok(())
}

/// `undecimate_node(z^p, p, arg z + η) = z` for `|η| < π/p`.
pub fn branch_exactness(theta: f64, p: usize, eta_frac: f64) -> Check {
    let z = Complex::from_polar(1.0, theta);
    let w = Complex::from_polar(1.0, theta * p as f64);
    let eta = eta_frac * std::f64::consts::PI / p as f64;
    let got = undecimate_node(w, p, theta + eta).map_err(fail)?;
    prop_assert!((got - z).norm() < 1e-12, "p = {}, θ = {}, η = {}: {} vs {}", p, theta, eta, got, z);
    Ok(())
}

/// The node bound is non-increasing in `p` along strides where `δ_p` does
/// not decrease.
pub fn bound_monotone(m: &PronyModel64, p: usize, q: usize) -> Check {
    let (p, q) = (p.min(q), p.max(q));
    let (dp, dq) = (decimated_prony::forward::power_separation(m, p), decimated_prony::forward::power_separation(m, q));
    if dq < dp || dp < 1e-3 {
        return Ok(());
    }
    let bp = node_error_bound(m, 0, p, 1e-6).map_err(fail)?;
    let bq = node_error_bound(m, 0, q, 1e-6).map_err(fail)?;
    for (a, b) in bp.iter().zip(&bq) {
        prop_assert!(b <= a, "p = {}: {}, q = {}: {}", p, a, q, b);
    }
    Ok(())
}

pub fn modulation_law(tau: f64, h: f64, ratio: f64) -> Check {
    let h1 = h * ratio;
    let a = mollifier_coeffs(0.0, h, h1, 128).map_err(fail)?;
    let b = mollifier_coeffs(tau, h, h1, 128).map_err(fail)?;
    for n in -128..=128i64 {
        let expect = a.coefficient(n) * Complex::from_polar(1.0, -(n as f64) * tau);
        prop_assert!((b.coefficient(n) - expect).norm() <= 1e-12);
    }
    Ok(())
}

/// Rotating the window by `τ` shifts the recovered jumps by `τ` and leaves
/// the magnitudes unchanged.
pub fn translation_equivariance(d: usize, k: usize, seed: u64, tau: f64) -> Check {
    let s = synthetic_signal(d, k, seed, SignalOptions { psi_degree: 1024, ..Default::default() }).map_err(fail)?;
    let w = signal_coeffs(&s, 256);
    let a = reconstruct(&w, d, k, s.min_separation()).map_err(fail)?;
    let b = reconstruct(&w.rotated(tau), d, k, s.min_separation()).map_err(fail)?;
    for (j, x) in a.jumps.iter().enumerate() {
        let (i, dist) = b
            .jumps
            .iter()
            .map(|y| circle_distance(x + tau, *y))
            .enumerate()
            .min_by(|u, v| u.1.total_cmp(&v.1))
            .unwrap();
        prop_assert!(dist < 1e-8, "jump {} moved by {}", j, dist);
        for (u, v) in a.magnitudes[j].iter().zip(&b.magnitudes[i]) {
            prop_assert!((u - v).abs() < 1e-6, "magnitude {} vs {}", u, v);
        }
    }
    Ok(())
}

pub fn window_conjugate_symmetry(d: usize, k: usize, seed: u64, m: usize) -> Check {
    let s = synthetic_signal(d, k, seed, SignalOptions { psi_degree: 200, ..Default::default() }).map_err(fail)?;
    let w = signal_coeffs(&s, m);
    prop_assert!(w.is_real());
    for n in 0..=m as i64 {
        prop_assert!((w.coefficient(-n) - w.coefficient(n).conj()).norm() <= 1e-15 * (1.0 + w.coefficient(n).norm()));
    }
    Ok(())
}

pub fn phi_decay(d: usize, k: usize, seed: u64) -> Check {
    let s = synthetic_signal(d, k, seed, SignalOptions { psi_degree: 0, ..Default::default() }).map_err(fail)?;
    let ks: Vec<i64> = (1..=2000).collect();
    let c = phi_coeffs(s.jumps(), s.magnitudes(), d, &ks).map_err(fail)?;
    let bound: f64 = s.magnitudes().iter().map(|a| a.iter().map(|v| v.abs()).sum::<f64>()).sum::<f64>()
        / (2.0 * std::f64::consts::PI);
    for (kk, v) in ks.iter().zip(&c) {
        prop_assert!((*kk as f64) * v.norm() <= bound * (1.0 + 1e-12));
    }
    Ok(())
}
