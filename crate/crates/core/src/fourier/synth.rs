use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{wrap_jump, PiecewiseSignal, TrigSeries};

/// Parameters of [`synthetic_signal`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SignalOptions {
    /// Degree of the smooth part `Ψ` (0 for `Ψ = 0`).
    pub psi_degree: usize,
    /// `R_Ψ`: `|ĉ_k(Ψ)| ≤ R_Ψ·k^{-d-2}`.
    pub psi_decay_bound: f64,
    /// Jump positions deviate from an equispaced grid by at most this
    /// fraction of the grid step.
    pub jitter: f64,
    /// Draw `r_k` uniformly from `[0, R_Ψ]`; when false every `r_k = R_Ψ`.
    pub random_amplitudes: bool,
    /// Draw the phases `φ_k` uniformly; when false every `φ_k = 0`, which
    /// makes the tail of `Ψ` add up coherently at `x = 0`.
    pub random_phases: bool,
}

impl Default for SignalOptions {
    fn default() -> Self {
        SignalOptions {
            psi_degree: 8192,
            psi_decay_bound: 0.5,
            jitter: 0.15,
            random_amplitudes: false,
            random_phases: true,
        }
    }
}

/// Seeded random member of `PC(d, K)`.
///
/// Jumps sit near a randomly rotated equispaced grid, `a_{0,j} = ±[1, 2]`,
/// `a_{ℓ,j} ∈ [-1, 1]` for `ℓ ≥ 1`, and `Ψ` has coefficients
/// `r_k·k^{-d-2}·e^{iφ_k}` with uniform phases and `r_k = R_Ψ` (or uniform
/// in `[0, R_Ψ]` with `random_amplitudes`).
pub fn synthetic_signal(d: usize, k: usize, seed: u64, options: SignalOptions) -> Result<PiecewiseSignal<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = std::f64::consts::TAU / k.max(1) as f64;
    let offset = rng.gen_range(0.0..step);
    let mut jumps: Vec<f64> = (0..k)
        .map(|j| {
            let jitter = options.jitter * step * rng.gen_range(-1.0..=1.0);
            wrap_jump(-std::f64::consts::PI + offset + step * j as f64 + jitter)
        })
        .collect();
    jumps.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let magnitudes = (0..k)
        .map(|_| {
            (0..=d)
                .map(|ell| {
                    if ell == 0 {
                        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                        sign * rng.gen_range(1.0..=2.0)
                    } else {
                        rng.gen_range(-1.0..=1.0)
                    }
                })
                .collect()
        })
        .collect();
    let psi = if options.psi_degree == 0 {
        TrigSeries::zero()
    } else {
        let r = options.psi_decay_bound;
        let mut coeffs = vec![Complex::new(rng.gen_range(-r..=r), 0.0)];
        for n in 1..=options.psi_degree {
            let r_n = if options.random_amplitudes { rng.gen_range(0.0..=r) } else { r };
            let amp = r_n * (n as f64).powi(-(d as i32) - 2);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let phase = if options.random_phases { phase } else { 0.0 };
            coeffs.push(Complex::from_polar(amp, phase));
        }
        TrigSeries::new(coeffs)
    };
    PiecewiseSignal::new(d, jumps, magnitudes, psi, options.psi_decay_bound)
}
