//! Fourier-side machinery for piecewise-smooth signals: the singular part
//! `Φ` and its coefficients, coefficient windows and partial sums, the
//! Eckhoff transform into a polynomial Prony system, mollifier localization
//! and the full jump reconstruction.

mod mollifier;
mod reconstruct;
mod synth;

pub use mollifier::{localize, mollifier_coeffs, Mollifier, MOLLIFIER_ACCURACY};
pub use reconstruct::{reconstruct, sup_error_away, ReconstructionResult};
pub use synth::{synthetic_signal, SignalOptions};

use nalgebra::Complex;

use crate::error::{PronyError, Result};
use crate::linalg::{cr, czero};
use crate::model::{node_from_jump, wrap_jump, PiecewiseSignal, PronyModel, SampleSet, SamplingScheme};
use crate::scalar::{cis, factorial, int_pow, Real};
use crate::solvers::esprit_solve;

/// Fourier coefficients `ĉ_k`, `|k| ≤ M`, of a function on `[-π, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientWindow<T: Real = f64> {
    bandwidth: usize,
    /// `coefficients[k + M] = ĉ_k`.
    coefficients: Vec<Complex<T>>,
    real: bool,
}

impl<T: Real> CoefficientWindow<T> {
    /// `coefficients` holds `ĉ_{-M}, …, ĉ_M`. A window tagged `real` must be
    /// conjugate-symmetric to within `1e-12` (relative to its largest entry).
    pub fn new(coefficients: Vec<Complex<T>>, real: bool) -> Result<Self> {
        if coefficients.len() % 2 == 0 {
            return Err(PronyError::InvalidArgument("a window holds 2M + 1 coefficients".into()));
        }
        let window = CoefficientWindow { bandwidth: coefficients.len() / 2, coefficients, real };
        if real && window.symmetry_defect() > T::tol(1e-12) * (T::one() + window.max_abs()) {
            return Err(PronyError::InvalidArgument("window tagged real is not conjugate-symmetric".into()));
        }
        Ok(window)
    }

    /// Real-signal window from `ĉ_0, …, ĉ_M`; negative frequencies by symmetry.
    pub fn from_nonnegative(half: &[Complex<T>]) -> Result<Self> {
        if half.is_empty() {
            return Err(PronyError::InvalidArgument("empty window".into()));
        }
        let m = half.len() - 1;
        let mut coefficients = Vec::with_capacity(2 * m + 1);
        coefficients.extend(half[1..].iter().rev().map(|c| c.conj()));
        coefficients.push(Complex::new(half[0].re, T::zero()));
        coefficients.extend_from_slice(&half[1..]);
        Self::new(coefficients, true)
    }

    /// `M`.
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// `ĉ_{-M}, …, ĉ_M`.
    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    /// `ĉ_k`, zero outside the window.
    pub fn coefficient(&self, k: i64) -> Complex<T> {
        let m = self.bandwidth as i64;
        if k.abs() > m {
            czero()
        } else {
            self.coefficients[(k + m) as usize]
        }
    }

    /// `max_k |ĉ_{-k} - conj(ĉ_k)|`.
    pub fn symmetry_defect(&self) -> T {
        let m = self.bandwidth as i64;
        (0..=m).fold(T::zero(), |acc, k| {
            let d = self.coefficient(-k) - self.coefficient(k).conj();
            acc.max(crate::scalar::modulus(d))
        })
    }

    fn max_abs(&self) -> T {
        self.coefficients.iter().fold(T::zero(), |a, c| a.max(crate::scalar::modulus(*c)))
    }

    /// The first `m ≤ M` frequencies.
    pub fn truncated(&self, m: usize) -> Result<Self> {
        if m > self.bandwidth {
            return Err(PronyError::InvalidArgument(format!("cannot widen a window from {} to {m}", self.bandwidth)));
        }
        let start = self.bandwidth - m;
        Ok(CoefficientWindow {
            bandwidth: m,
            coefficients: self.coefficients[start..start + 2 * m + 1].to_vec(),
            real: self.real,
        })
    }

    /// Window of `f(x - τ)`: `ĉ_k ↦ e^{-ikτ}·ĉ_k`.
    pub fn rotated(&self, tau: T) -> Self {
        let m = self.bandwidth as i64;
        let coefficients = (-m..=m).zip(&self.coefficients).map(|(k, &c)| c * cis(-tau * T::lit(k as f64))).collect();
        CoefficientWindow { bandwidth: self.bandwidth, coefficients, real: self.real }
    }

    /// Pointwise difference of two windows of equal bandwidth.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.bandwidth != other.bandwidth {
            return Err(PronyError::InvalidArgument("window bandwidths differ".into()));
        }
        let coefficients = self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a - b).collect();
        Ok(CoefficientWindow { bandwidth: self.bandwidth, coefficients, real: self.real && other.real })
    }
}

/// Bernoulli numbers `B_0, …, B_n` (`B_1 = -1/2`).
fn bernoulli_numbers<T: Real>(n: usize) -> Vec<T> {
    let mut b = vec![T::zero(); n + 1];
    b[0] = T::one();
    for m in 1..=n {
        // Σ_{k=0}^{m} C(m+1, k) B_k = 0
        let mut binom = T::one();
        let mut acc = T::zero();
        for (k, bk) in b.iter().enumerate().take(m) {
            acc += binom * *bk;
            binom = binom * T::from_count(m + 1 - k) / T::from_count(k + 1);
        }
        b[m] = -acc / T::from_count(m + 1);
    }
    b
}

/// Bernoulli polynomial `B_n(t)`.
fn bernoulli_poly<T: Real>(numbers: &[T], n: usize, t: T) -> T {
    let mut binom = T::one();
    let mut acc = T::zero();
    for (k, bk) in numbers.iter().enumerate().take(n + 1) {
        acc += binom * *bk * int_pow(t, n - k);
        binom = binom * T::from_count(n - k) / T::from_count(k + 1);
    }
    acc
}

/// `V_ℓ(x) = -(2π)^ℓ/(ℓ+1)!·B_{ℓ+1}(x/2π)` on `[0, 2π)`, extended
/// periodically: the mean-zero function whose `ℓ`-th derivative jumps by 1
/// at the origin and which is a polynomial elsewhere.
fn absorbing_basis<T: Real>(numbers: &[T], ell: usize, x: T) -> T {
    let two_pi = T::two_pi();
    let mut u = x % two_pi;
    if u < T::zero() {
        u += two_pi;
    }
    -int_pow(two_pi, ell) / factorial::<T>(ell + 1) * bernoulli_poly(numbers, ell + 1, u / two_pi)
}

/// `Φ(x) = Σ_j Σ_ℓ a_{ℓ,j}·V_ℓ(x - x_j)`. At a jump the right-hand limit is
/// returned.
pub fn phi_eval<T: Real>(jumps: &[T], magnitudes: &[Vec<T>], d: usize, x: T) -> T {
    let numbers = bernoulli_numbers::<T>(d + 1);
    jumps.iter().zip(magnitudes).fold(T::zero(), |acc, (&xj, row)| {
        acc + row.iter().enumerate().fold(T::zero(), |s, (ell, &a)| s + a * absorbing_basis(&numbers, ell, x - xj))
    })
}

/// `f(x) = Φ(x) + Ψ(x)`.
pub fn signal_eval<T: Real>(signal: &PiecewiseSignal<T>, x: T) -> T {
    phi_eval(signal.jumps(), signal.magnitudes(), signal.smoothness(), x) + signal.psi().eval(x)
}

fn check_magnitudes<T: Real>(jumps: &[T], magnitudes: &[Vec<T>], d: usize) -> Result<()> {
    if jumps.len() != magnitudes.len() || magnitudes.iter().any(|row| row.len() != d + 1) {
        return Err(PronyError::InvalidArgument(format!(
            "expected {} rows of d+1 = {} magnitudes",
            jumps.len(),
            d + 1
        )));
    }
    Ok(())
}

/// `ĉ_k(Φ) = (1/2π)·Σ_j e^{-ikx_j}·Σ_{ℓ=0}^{d} (ik)^{-ℓ-1}·a_{ℓ,j}` for
/// every `k ≠ 0` in `ks` (`Φ` has mean zero, so `ĉ_0(Φ) = 0`).
pub fn phi_coeffs<T: Real>(jumps: &[T], magnitudes: &[Vec<T>], d: usize, ks: &[i64]) -> Result<Vec<Complex<T>>> {
    check_magnitudes(jumps, magnitudes, d)?;
    if ks.contains(&0) {
        return Err(PronyError::InvalidArgument(
            "k = 0 is not covered by the closed form; ĉ_0(Φ) = 0 because Φ has mean zero".into(),
        ));
    }
    let inv_two_pi = T::one() / T::two_pi();
    Ok(ks
        .iter()
        .map(|&k| {
            let kf = T::lit(k as f64);
            let inv_ik = Complex::new(T::zero(), -T::one() / kf);
            jumps.iter().zip(magnitudes).fold(czero::<T>(), |acc, (&xj, row)| {
                let mut power = inv_ik;
                let mut sum = czero::<T>();
                for &a in row {
                    sum += power * cr(a);
                    power *= inv_ik;
                }
                acc + cis(-kf * xj) * sum
            }) * cr(inv_two_pi)
        })
        .collect())
}

/// Exact window `ĉ_k(f) = ĉ_k(Φ) + ĉ_k(Ψ)`, `|k| ≤ M`.
pub fn signal_coeffs<T: Real>(signal: &PiecewiseSignal<T>, m: usize) -> CoefficientWindow<T> {
    let ks: Vec<i64> = (1..=m as i64).collect();
    let phi = phi_coeffs(signal.jumps(), signal.magnitudes(), signal.smoothness(), &ks).expect("validated signal");
    let mut half = Vec::with_capacity(m + 1);
    half.push(signal.psi().coefficient(0));
    half.extend(phi.iter().zip(&ks).map(|(&c, &k)| c + signal.psi().coefficient(k)));
    CoefficientWindow::from_nonnegative(&half).expect("conjugate-symmetric by construction")
}

/// `F_M(f)(x) = Σ_{|k|≤M} ĉ_k e^{ikx}`: the real part of the symmetric sum.
pub fn partial_sum_eval<T: Real>(window: &CoefficientWindow<T>, x: T) -> T {
    partial_sum_complex(window, x).re
}

/// The symmetric partial sum with its imaginary part.
pub fn partial_sum_complex<T: Real>(window: &CoefficientWindow<T>, x: T) -> Complex<T> {
    let m = window.bandwidth() as i64;
    let mut acc = window.coefficient(0);
    let step = cis(x);
    let mut rot = step;
    for k in 1..=m {
        if k % 64 == 0 {
            rot = cis(x * T::lit(k as f64));
        }
        acc += window.coefficient(k) * rot + window.coefficient(-k) * rot.conj();
        rot *= step;
    }
    acc
}

/// `m_k = 2π·(ik)^{d+1}·ĉ_k` for `k = 1, …, M`, on the scheme `I_{1,1}`.
///
/// For a signal in `PC(d, K)` these are the moments of the polynomial Prony
/// model of [`induced_model`], up to a smooth-part error `2π·R_Ψ/k`.
pub fn eckhoff_transform<T: Real>(window: &CoefficientWindow<T>, d: usize) -> Result<SampleSet<T>> {
    let m = window.bandwidth();
    if m == 0 {
        return Err(PronyError::InvalidArgument("window has no positive frequencies".into()));
    }
    let values = (1..=m)
        .map(|k| {
            let ik = Complex::new(T::zero(), T::from_count(k));
            let mut factor = cr(T::two_pi());
            for _ in 0..=d {
                factor *= ik;
            }
            factor * window.coefficient(k as i64)
        })
        .collect();
    SampleSet::exact(SamplingScheme::new(1, 1, m)?, values)
}

/// Polynomial Prony model with nodes `z_j = e^{-ix_j}` and coefficients
/// `c_{ℓ,j} = i^ℓ·a_{d-ℓ,j}` whose moments equal the Eckhoff transform of `Φ`.
pub fn induced_model<T: Real>(jumps: &[T], magnitudes: &[Vec<T>], d: usize) -> Result<PronyModel<T>> {
    check_magnitudes(jumps, magnitudes, d)?;
    let nodes = jumps.iter().map(|&x| node_from_jump(x)).collect();
    let coefficients = magnitudes
        .iter()
        .map(|row| {
            let mut power = cr(T::one());
            (0..=d)
                .map(|ell| {
                    let c = power * cr(row[d - ell]);
                    power *= Complex::new(T::zero(), T::one());
                    c
                })
                .collect()
        })
        .collect();
    PronyModel::new(nodes, coefficients)
}

/// Inverse of [`induced_model`]'s coefficient map for one node:
/// `a_{d-ℓ} = Re((-i)^ℓ·c_ℓ)`.
pub(crate) fn magnitudes_from_coefficients<T: Real>(coeffs: &[Complex<T>]) -> Vec<T> {
    let d = coeffs.len() - 1;
    let mut out = vec![T::zero(); d + 1];
    let mut power = cr(T::one());
    for (ell, &c) in coeffs.iter().enumerate() {
        out[d - ell] = (power * c).re;
        power *= Complex::new(T::zero(), -T::one());
    }
    out
}

/// Coarse jump positions from the order-zero Eckhoff system: the `d = 0`
/// transform restricted to the top indices `M-4K+1, …, M` is solved for `K`
/// simple nodes by ESPRIT and `x = -arg z`. Returned in ascending order.
pub fn eckhoff_initial<T: Real>(window: &CoefficientWindow<T>, k: usize, m: usize) -> Result<Vec<T>> {
    if k == 0 {
        return Err(PronyError::InvalidArgument("K must be positive".into()));
    }
    if m < 4 * k || m > window.bandwidth() {
        return Err(PronyError::InvalidArgument(format!(
            "need 4K ≤ M ≤ bandwidth, got K = {k}, M = {m}, bandwidth {}",
            window.bandwidth()
        )));
    }
    let transformed = eckhoff_transform(&window.truncated(m)?, 0)?;
    let top = transformed.subsample(SamplingScheme::new(m - 4 * k + 1, 1, 4 * k)?)?;
    let (model, _) = esprit_solve(&top, k)?;
    let mut jumps: Vec<T> = model.nodes().iter().map(|&z| crate::model::jump_from_node(z)).collect();
    jumps.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(jumps.into_iter().map(wrap_jump).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::evaluate_moments;
    use crate::model::TrigSeries;
    use std::f64::consts::PI;

    pub(crate) fn sawtooth() -> PiecewiseSignal {
        PiecewiseSignal::new(0, vec![-PI], vec![vec![-2.0 * PI]], TrigSeries::zero(), 0.0).unwrap()
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers::<f64>(6);
        let expected = [1.0, -0.5, 1.0 / 6.0, 0.0, -1.0 / 30.0, 0.0, 1.0 / 42.0];
        for (x, y) in b.iter().zip(expected) {
            assert!((x - y).abs() < 1e-15);
        }
        // B_2(t) = t² - t + 1/6
        assert!((bernoulli_poly(&b, 2, 0.3) - (0.09 - 0.3 + 1.0 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn sawtooth_coefficients() {
        let ks: Vec<i64> = (-20..=20).filter(|&k| k != 0).collect();
        let c = phi_coeffs(&[PI], &[vec![-2.0 * PI]], 0, &ks).unwrap();
        for (&k, v) in ks.iter().zip(&c) {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let expected = Complex::new(0.0, sign / k as f64);
            assert!((v - expected).norm() < 1e-15, "k = {k}");
        }
        assert!(phi_coeffs(&[PI], &[vec![1.0]], 0, &[0]).is_err());
        let zero = phi_coeffs(&[0.5, 1.5], &[vec![0.0, 0.0], vec![0.0, 0.0]], 1, &[1, 2, 3]).unwrap();
        assert!(zero.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn sawtooth_values() {
        let s = sawtooth();
        for &x in &[-3.0, -1.0, 0.0, 0.5, 2.9] {
            assert!((signal_eval(&s, x) - x).abs() < 1e-13);
        }
    }

    #[test]
    fn window_symmetry_and_truncation() {
        let w = signal_coeffs(&sawtooth(), 8);
        assert!(w.is_real());
        assert!(w.symmetry_defect() < 1e-15);
        let t = w.truncated(3).unwrap();
        assert_eq!(t.coefficient(3), w.coefficient(3));
        assert_eq!(t.coefficient(4), Complex::new(0.0, 0.0));
        assert!(w.truncated(9).is_err());
        assert!(CoefficientWindow::new(
            vec![Complex::new(0.0, 1.0), Complex::new(0.0, 0.0), Complex::new(0.0, 1.0)],
            true
        )
        .is_err());
    }

    #[test]
    fn constant_partial_sum() {
        let w = CoefficientWindow::from_nonnegative(&[Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]).unwrap();
        for &x in &[-2.0, 0.0, 1.0] {
            assert_eq!(partial_sum_eval(&w, x), 1.0);
        }
    }

    #[test]
    fn sawtooth_partial_sums() {
        let w = signal_coeffs(&sawtooth(), 512);
        // Direct summation: F_M(π/2) = 2·Σ_k (-1)^{k+1} sin(kπ/2)/k.
        let direct: f64 = (1..=512).map(|k| 2.0 * (-1f64).powi(k + 1) * (k as f64 * PI / 2.0).sin() / k as f64).sum();
        let v = partial_sum_eval(&w, PI / 2.0);
        assert!((v - direct).abs() < 1e-12);
        assert!((v - PI / 2.0).abs() < 2e-3);
        assert!(partial_sum_complex(&w, 0.7).im.abs() < 1e-10);
        // At the jump the sum is the mean of the one-sided limits.
        assert!(partial_sum_eval(&w, PI).abs() < 1e-10);
    }

    #[test]
    fn sawtooth_transform_is_exact_prony() {
        let m = eckhoff_transform(&signal_coeffs(&sawtooth(), 16), 0).unwrap();
        for (k, v) in m.scheme().indices().zip(m.values()) {
            let expected = -2.0 * PI * if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((v - Complex::new(expected, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn bridge_identity_small() {
        let jumps = [-1.0, 0.4, 2.2];
        let mags = vec![vec![1.5, -0.3, 0.2], vec![-1.2, 0.7, 0.1], vec![1.0, 0.0, -0.5]];
        let d = 2;
        let ks: Vec<i64> = (1..=40).collect();
        let c = phi_coeffs(&jumps, &mags, d, &ks).unwrap();
        let half: Vec<_> = std::iter::once(Complex::new(0.0, 0.0)).chain(c).collect();
        let window = CoefficientWindow::from_nonnegative(&half).unwrap();
        let transformed = eckhoff_transform(&window, d).unwrap();
        let model = induced_model(&jumps, &mags, d).unwrap();
        let exact = evaluate_moments(&model, transformed.scheme()).unwrap();
        for (a, b) in transformed.values().iter().zip(exact.values()) {
            let b: Complex<f64> = *b;
            assert!((a - b).norm() <= 1e-10 * b.norm().max(1.0));
        }
        let back = magnitudes_from_coefficients(&model.coefficients()[1]);
        assert_eq!(back, mags[1]);
    }

    #[test]
    fn smooth_part_transform_decays() {
        let psi = TrigSeries::new(
            (0..40).map(|n| Complex::new(0.3 / (1.0 + n as f64).powi(2), 0.1 / (1.0 + n as f64).powi(2))).collect(),
        );
        let bound = psi
            .coefficients()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| c.norm() * (n as f64).powi(2))
            .fold(0.0, f64::max);
        let s = PiecewiseSignal::new(0, vec![0.0], vec![vec![0.0]], psi, bound).unwrap();
        let m = eckhoff_transform(&signal_coeffs(&s, 30), 0).unwrap();
        for (k, v) in m.scheme().indices().zip(m.values()) {
            assert!(v.norm() <= 2.0 * PI * bound / k as f64 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn phi_quadrature_oracle() {
        // Two jumps, d = 1, k = 3 against composite Gauss–Legendre quadrature
        // on each polynomial piece.
        let jumps = [-1.1, 1.7];
        let mags = vec![vec![1.3, -0.4], vec![-0.8, 0.9]];
        let f = |x: f64| phi_eval(&jumps, &mags, 1, x);
        let nodes = [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
        let weights = [
            0.236_926_885_056_189,
            0.478_628_670_499_366,
            0.568_888_888_888_889,
            0.478_628_670_499_366,
            0.236_926_885_056_189,
        ];
        let k = 3.0;
        let mut acc = Complex::new(0.0, 0.0);
        let breaks = [-PI, -1.1, 1.7, PI];
        for w in breaks.windows(2) {
            let n = 400;
            let hstep = (w[1] - w[0]) / n as f64;
            for i in 0..n {
                let a = w[0] + i as f64 * hstep;
                for (t, wt) in nodes.iter().zip(weights) {
                    let x = a + hstep * (t + 1.0) / 2.0;
                    acc += cis(-k * x) * (f(x) * wt * hstep / 2.0);
                }
            }
        }
        acc /= 2.0 * PI;
        let closed = phi_coeffs(&jumps, &mags, 1, &[3]).unwrap()[0];
        assert!((acc - closed).norm() < 1e-10, "{acc} vs {closed}");
    }

    #[test]
    fn initial_estimate_on_sawtooth() {
        let w = signal_coeffs(&sawtooth(), 256);
        let x = eckhoff_initial(&w, 1, 256).unwrap();
        assert!(crate::matching::circle_distance(x[0], PI) < 1e-9);
    }

    #[test]
    fn initial_estimate_two_jumps() {
        let s =
            PiecewiseSignal::new(1, vec![-1.0, 1.0], vec![vec![1.0, 0.5], vec![-1.5, 0.3]], TrigSeries::zero(), 0.0)
                .unwrap();
        let w = signal_coeffs(&s, 512);
        let x: Vec<f64> = eckhoff_initial(&w, 2, 512).unwrap();
        assert!((x[0] + 1.0).abs() < 0.02 && (x[1] - 1.0).abs() < 0.02, "{x:?}");
    }
}
