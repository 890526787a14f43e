use rayon::prelude::*;

use super::{
    eckhoff_initial, eckhoff_transform, localize, magnitudes_from_coefficients, mollifier_coeffs, partial_sum_eval,
    phi_coeffs, phi_eval, signal_eval, CoefficientWindow,
};
use crate::decimation::{decimated_solve, BaseSolver, DecimationOptions};
use crate::error::{PronyError, Result};
use crate::matching::circle_distance;
use crate::model::{jump_from_node, PiecewiseSignal, SamplingScheme, Structure};
use crate::scalar::Real;
use crate::solvers::SolverReport;

/// Output of [`reconstruct`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult<T: Real = f64> {
    /// Estimated jump positions `x̃_j`.
    pub jumps: Vec<T>,
    /// Estimated magnitudes `ã_{ℓ,j}`, indexed `[j][ℓ]`.
    pub magnitudes: Vec<Vec<T>>,
    /// Initial order-zero estimates.
    pub coarse_jumps: Vec<T>,
    pub smoothness: usize,
    /// Bandwidth `M` of the input window.
    pub bandwidth: usize,
    /// Bandwidth `M'` of each single-jump window.
    pub localized_bandwidth: usize,
    /// Offset and stride `t = p` of the per-jump Prony systems.
    pub stride: usize,
    /// `ĉ_k(f) - ĉ_k(Φ̃)` for `|k| ≤ M`.
    pub correction: CoefficientWindow<T>,
    pub reports: Vec<SolverReport<T>>,
}

impl<T: Real> ReconstructionResult<T> {
    /// `f̃(x) = Φ̃(x) + Σ_{|k|≤M} (ĉ_k(f) - ĉ_k(Φ̃))·e^{ikx}`.
    pub fn eval(&self, x: T) -> T {
        phi_eval(&self.jumps, &self.magnitudes, self.smoothness, x) + partial_sum_eval(&self.correction, x)
    }
}

/// Recovers the jumps and magnitudes of a `PC(d, K)` function from its
/// coefficient window and assembles the corrected approximation.
///
/// 1. Coarse jumps by [`eckhoff_initial`].
/// 2. For `K > 1`, each jump is isolated by a mollifier centered at its
///    coarse estimate (`h = J/3`, `h₁ = J/9`) into a window of bandwidth
///    `M' = ⌊M/2⌋`. With a single jump the input window is used as is
///    (`M' = M`).
/// 3. The order-`d` Eckhoff transform of each single-jump window is sampled
///    at `k = N, 2N, …, (d+2)N` with `N = ⌊M'/(d+2)⌋` and solved as a
///    one-node system of multiplicity `d+1`, the coarse estimate selecting
///    the root branch.
/// 4. `f̃ = Φ̃ + F_M(f - Φ̃)`.
pub fn reconstruct<T: Real>(
    window: &CoefficientWindow<T>,
    d: usize,
    k: usize,
    min_separation: T,
) -> Result<ReconstructionResult<T>> {
    let m = window.bandwidth();
    if k == 0 {
        return Err(PronyError::InvalidArgument("K must be positive".into()));
    }
    if m < 8 * (d + 2) * k {
        return Err(PronyError::InvalidArgument(format!("bandwidth {m} below 8·(d+2)·K = {}", 8 * (d + 2) * k)));
    }
    if !(min_separation > T::zero()) {
        return Err(PronyError::InvalidArgument("J must be positive".into()));
    }
    let coarse = eckhoff_initial(window, k, m)?;

    let (localized_bandwidth, locals) = if k == 1 {
        (m, vec![window.clone()])
    } else {
        let mp = m / 2;
        let j = min_separation;
        let moll = mollifier_coeffs(T::zero(), j / T::lit(3.0), j / T::lit(9.0), m + mp)?;
        let locals =
            coarse.par_iter().map(|&x| localize(window, &moll.recentered(x), mp)).collect::<Result<Vec<_>>>()?;
        (mp, locals)
    };
    let stride = localized_bandwidth / (d + 2);
    let structure = Structure::new(vec![d + 1])?;
    let scheme = SamplingScheme::new(stride, stride, d + 2)?;
    let options = DecimationOptions { base: BaseSolver::Annihilation, refine: true };

    let solved = locals
        .par_iter()
        .zip(coarse.par_iter())
        .enumerate()
        .map(|(j, (local, &x))| {
            let attempt = || {
                let samples = eckhoff_transform(local, d)?.subsample(scheme)?;
                decimated_solve(&samples, &structure, Some(&[-x]), options)
            };
            attempt().map_err(|e| PronyError::Jump { jump: j, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut jumps = Vec::with_capacity(k);
    let mut magnitudes = Vec::with_capacity(k);
    let mut reports = Vec::with_capacity(k);
    for (model, report) in solved {
        jumps.push(jump_from_node(model.nodes()[0]));
        magnitudes.push(magnitudes_from_coefficients(&model.coefficients()[0]));
        reports.push(report);
    }

    let ks: Vec<i64> = (1..=m as i64).collect();
    let phi = phi_coeffs(&jumps, &magnitudes, d, &ks)?;
    let mut half = Vec::with_capacity(m + 1);
    half.push(window.coefficient(0));
    half.extend(ks.iter().zip(&phi).map(|(&kk, &c)| window.coefficient(kk) - c));
    let correction = if window.is_real() {
        CoefficientWindow::from_nonnegative(&half)?
    } else {
        let mut full: Vec<_> =
            ks.iter().rev().zip(phi.iter().rev()).map(|(&kk, c)| window.coefficient(-kk) - c.conj()).collect();
        full.extend(half);
        CoefficientWindow::new(full, false)?
    };

    Ok(ReconstructionResult {
        jumps,
        magnitudes,
        coarse_jumps: coarse,
        smoothness: d,
        bandwidth: m,
        localized_bandwidth,
        stride,
        correction,
        reports,
    })
}

/// `max |f(x) - f̃(x)|` over `grid_size` equispaced points of `[-π, π)`
/// farther than `ρ` (circle distance) from every true jump.
pub fn sup_error_away<T: Real>(
    signal: &PiecewiseSignal<T>,
    result: &ReconstructionResult<T>,
    rho: T,
    grid_size: usize,
) -> Result<T> {
    if !(rho > T::zero()) {
        return Err(PronyError::InvalidArgument("exclusion radius must be positive".into()));
    }
    let grid: Vec<T> = (0..grid_size)
        .map(|i| -T::pi() + T::two_pi() * T::from_count(i) / T::from_count(grid_size))
        .filter(|&x| signal.jumps().iter().all(|&xj| circle_distance(x, xj) > rho))
        .collect();
    if grid.is_empty() {
        return Err(PronyError::InvalidArgument("every grid point is excluded".into()));
    }
    Ok(grid
        .par_iter()
        .map(|&x| (signal_eval(signal, x) - result.eval(x)).abs())
        .collect::<Vec<_>>()
        .into_iter()
        .fold(T::zero(), |a, b| a.max(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{signal_coeffs, synthetic_signal, SignalOptions};
    use crate::model::TrigSeries;
    use std::f64::consts::PI;

    #[test]
    fn sawtooth_is_recovered_exactly() {
        let s = PiecewiseSignal::new(0, vec![-PI], vec![vec![-2.0 * PI]], TrigSeries::zero(), 0.0).unwrap();
        let w = signal_coeffs(&s, 128);
        let r = reconstruct(&w, 0, 1, 2.0 * PI).unwrap();
        assert!(circle_distance(r.jumps[0], PI) < 1e-10, "{}", r.jumps[0]);
        assert!((r.magnitudes[0][0] + 2.0 * PI).abs() < 1e-8);
        assert!((r.eval(1.0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn preconditions() {
        let s = PiecewiseSignal::new(0, vec![-PI], vec![vec![-2.0 * PI]], TrigSeries::zero(), 0.0).unwrap();
        let w = signal_coeffs(&s, 20);
        assert!(reconstruct(&w, 1, 1, 1.0).is_err());
        let w = signal_coeffs(&s, 64);
        let r = reconstruct(&w, 0, 1, 1.0).unwrap();
        assert!(sup_error_away(&s, &r, PI, 100).is_err());
        assert!(sup_error_away(&s, &r, 0.0, 100).is_err());
    }

    #[test]
    fn two_jumps_first_order() {
        let o = SignalOptions { psi_degree: 2048, ..Default::default() };
        let s = synthetic_signal(1, 2, 3, o).unwrap();
        let w = signal_coeffs(&s, 512);
        let r = reconstruct(&w, 1, 2, s.min_separation()).unwrap();
        for (x, y) in r.jumps.iter().zip(s.jumps()) {
            assert!(circle_distance(*x, *y) < 1e-5, "{x} vs {y}");
        }
        for (a, b) in r.magnitudes.iter().zip(s.magnitudes()) {
            assert!((a[0] - b[0]).abs() < 1e-3);
        }
    }

    #[test]
    fn truth_synthesis_matches_tail() {
        let o = SignalOptions { psi_degree: 600, ..Default::default() };
        let s = synthetic_signal(1, 2, 5, o).unwrap();
        let m = 128;
        let w = signal_coeffs(&s, m);
        let mut r = reconstruct(&w, 1, 2, s.min_separation()).unwrap();
        // Replace the estimates by the truth and rebuild the correction.
        r.jumps = s.jumps().to_vec();
        r.magnitudes = s.magnitudes().to_vec();
        let ks: Vec<i64> = (1..=m as i64).collect();
        let phi = phi_coeffs(&r.jumps, &r.magnitudes, 1, &ks).unwrap();
        let half: Vec<_> =
            std::iter::once(w.coefficient(0)).chain(ks.iter().zip(&phi).map(|(&k, &c)| w.coefficient(k) - c)).collect();
        r.correction = CoefficientWindow::from_nonnegative(&half).unwrap();
        let err = sup_error_away(&s, &r, 0.1, 512).unwrap();
        let tail: f64 = 2.0 * 0.5 * ((m + 1)..=600).map(|k| (k as f64).powi(-3)).sum::<f64>();
        assert!(err <= tail * (1.0 + 1e-6) + 1e-12, "{err} vs {tail}");
    }
}
