use nalgebra::Complex;
use rustfft::FftPlanner;

use super::CoefficientWindow;
use crate::error::{PronyError, Result};
use crate::linalg::czero;
use crate::scalar::{cis, Real};

/// Target absolute accuracy of each mollifier coefficient.
pub const MOLLIFIER_ACCURACY: f64 = 1e-13;
const MAX_GRID: usize = 1 << 22;

/// Smooth bump equal to 1 on `[center-h₁, center+h₁]` and 0 outside
/// `[center-h, center+h]`, with precomputed Fourier coefficients.
///
/// Between the two plateaus it follows `S((h - |x - center|)/(h - h₁))` with
/// the transition `S(s) = e^{-1/s}/(e^{-1/s} + e^{-1/(1-s)})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mollifier<T: Real = f64> {
    center: T,
    half_width: T,
    flat_half_width: T,
    /// Coefficients of the bump centered at 0 (real and even), `n = 0..=degree`.
    centered: Vec<T>,
    accuracy: T,
}

fn transition(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / s).exp();
    let b = (-1.0 / (1.0 - s)).exp();
    a / (a + b)
}

fn bump(x: f64, h: f64, h1: f64) -> f64 {
    let r = x.abs();
    if r <= h1 {
        1.0
    } else if r >= h {
        0.0
    } else {
        transition((h - r) / (h - h1))
    }
}

/// Periodic trapezoid rule on `n` points, evaluated for all frequencies by FFT.
fn trapezoid_coefficients(h: f64, h1: f64, n: usize, degree: usize) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|j| {
            // Grid over [-π, π) rotated so index 0 sits at x = 0.
            let x = std::f64::consts::TAU * j as f64 / n as f64;
            let x = if x >= std::f64::consts::PI { x - std::f64::consts::TAU } else { x };
            Complex::new(bump(x, h, h1), 0.0)
        })
        .collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    buf.iter().take(degree + 1).map(|c| c.re / n as f64).collect()
}

/// Mollifier centered at `center` with coefficients for `|n| ≤ degree`.
///
/// Coefficients come from the periodic trapezoid rule, which converges
/// spectrally for the smooth periodic bump; the grid is doubled until two
/// successive grids agree to [`MOLLIFIER_ACCURACY`].
pub fn mollifier_coeffs<T: Real>(center: T, h: T, h1: T, degree: usize) -> Result<Mollifier<T>> {
    let (hf, h1f) = (h.as_f64(), h1.as_f64());
    if !(h1f > 0.0 && h1f < hf && hf < std::f64::consts::PI) {
        return Err(PronyError::InvalidArgument(format!("need 0 < h₁ < h < π, got h = {hf}, h₁ = {h1f}")));
    }
    let mut n = (4 * (degree + 1)).next_power_of_two().max(1024);
    let mut prev = trapezoid_coefficients(hf, h1f, n, degree);
    loop {
        n *= 2;
        if n > MAX_GRID {
            return Err(PronyError::Quadrature(format!(
                "mollifier coefficients did not reach {MOLLIFIER_ACCURACY:e} on {MAX_GRID} points"
            )));
        }
        let next = trapezoid_coefficients(hf, h1f, n, degree);
        let diff = prev.iter().zip(&next).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        prev = next;
        if diff < MOLLIFIER_ACCURACY {
            break;
        }
    }
    Ok(Mollifier {
        center,
        half_width: h,
        flat_half_width: h1,
        centered: prev.into_iter().map(T::lit).collect(),
        accuracy: T::lit(MOLLIFIER_ACCURACY),
    })
}

impl<T: Real> Mollifier<T> {
    /// The constant function 1 (`coef(n) = δ_{n,0}`), for testing.
    pub fn constant_one() -> Self {
        Mollifier {
            center: T::zero(),
            half_width: T::pi(),
            flat_half_width: T::pi(),
            centered: vec![T::one()],
            accuracy: T::zero(),
        }
    }

    pub fn center(&self) -> T {
        self.center
    }

    /// `h`.
    pub fn half_width(&self) -> T {
        self.half_width
    }

    /// `h₁`.
    pub fn flat_half_width(&self) -> T {
        self.flat_half_width
    }

    pub fn degree(&self) -> usize {
        self.centered.len() - 1
    }

    /// Stated absolute accuracy of each coefficient.
    pub fn accuracy(&self) -> T {
        self.accuracy
    }

    /// `coef(n) = e^{-in·center}·coef₀(n)`, zero beyond the degree.
    pub fn coefficient(&self, n: i64) -> Complex<T> {
        match self.centered.get(n.unsigned_abs() as usize) {
            Some(&c) => cis(-self.center * T::lit(n as f64)) * c,
            None => czero(),
        }
    }

    /// Same bump moved to `center`.
    pub fn recentered(&self, center: T) -> Self {
        Mollifier { center, ..self.clone() }
    }

    /// Value of the bump at `x`.
    pub fn eval(&self, x: T) -> T {
        if self.centered.len() == 1 {
            return T::one();
        }
        let r = crate::matching::circle_distance(x, self.center);
        T::lit(bump(r.as_f64(), self.half_width.as_f64(), self.flat_half_width.as_f64()))
    }
}

/// Coefficients of `f·moll` for `|k| ≤ out_bandwidth`, by the discrete
/// convolution `Σ_{|n|≤M} ĉ_n(f)·coef_{k-n}`.
pub fn localize<T: Real>(
    window: &CoefficientWindow<T>,
    moll: &Mollifier<T>,
    out_bandwidth: usize,
) -> Result<CoefficientWindow<T>> {
    let m = window.bandwidth() as i64;
    if 2 * out_bandwidth > window.bandwidth() {
        return Err(PronyError::InvalidArgument(format!(
            "output bandwidth {out_bandwidth} exceeds half the input bandwidth {m}"
        )));
    }
    let deg = moll.degree() as i64;
    let kernel: Vec<Complex<T>> = (-2 * m..=2 * m).map(|n| moll.coefficient(n)).collect();
    let ob = out_bandwidth as i64;
    let coefficients = (-ob..=ob)
        .map(|k| {
            let lo = (k - deg).max(-m);
            let hi = (k + deg).min(m);
            (lo..=hi).fold(czero(), |acc, n| acc + window.coefficient(n) * kernel[(k - n + 2 * m) as usize])
        })
        .collect();
    CoefficientWindow::new(coefficients, false).map(|w| CoefficientWindow { real: window.is_real(), ..w })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{eckhoff_initial, signal_coeffs};
    use crate::model::{PiecewiseSignal, TrigSeries};
    use std::f64::consts::PI;

    #[test]
    fn transition_plateaus() {
        assert_eq!(bump(0.0, 0.5, 0.2), 1.0);
        assert_eq!(bump(0.2, 0.5, 0.2), 1.0);
        assert_eq!(bump(0.5, 0.5, 0.2), 0.0);
        assert_eq!(bump(-0.7, 0.5, 0.2), 0.0);
        let mid = bump(0.35, 0.5, 0.2);
        assert!((mid - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mean_between_support_bounds() {
        let (h, h1) = (0.6, 0.2);
        let m = mollifier_coeffs(0.3, h, h1, 64).unwrap();
        let c0 = m.coefficient(0).re;
        assert!(c0 > h1 / PI && c0 < h / PI);
        assert!(mollifier_coeffs(0.0, 0.2, 0.3, 8).is_err());
    }

    #[test]
    fn modulation_law() {
        let a = mollifier_coeffs(0.0, 0.5, 0.15, 200).unwrap();
        let tau = 1.234;
        let b = mollifier_coeffs(tau, 0.5, 0.15, 200).unwrap();
        for n in -200..=200i64 {
            let expected = a.coefficient(n) * cis(-(n as f64) * tau);
            assert!((b.coefficient(n) - expected).norm() < 1e-12);
            // Centered coefficients are real.
            assert!(a.coefficient(n).im.abs() < 1e-12);
        }
    }

    #[test]
    fn coefficients_match_pointwise_values() {
        let m = mollifier_coeffs(-0.4, 0.7, 0.25, 2000).unwrap();
        for &x in &[-0.4, -0.1, 0.2, 1.0, 3.0] {
            let series =
                (-2000..=2000i64).fold(Complex::new(0.0, 0.0), |acc, n| acc + m.coefficient(n) * cis(n as f64 * x));
            assert!((series.re - m.eval(x)).abs() < 1e-9, "x = {x}");
        }
        // Super-polynomial decay.
        assert!((1000..=2000).all(|n| m.coefficient(n).norm() <= 1e-10));
    }

    #[test]
    fn constant_one_is_identity() {
        let s = PiecewiseSignal::new(0, vec![0.5], vec![vec![1.0]], TrigSeries::zero(), 0.0).unwrap();
        let w = signal_coeffs(&s, 32);
        let out = localize(&w, &Mollifier::constant_one(), 16).unwrap();
        assert_eq!(out, w.truncated(16).unwrap());
        assert!(localize(&w, &Mollifier::constant_one(), 17).is_err());
    }

    #[test]
    fn localization_isolates_one_jump() {
        let s = PiecewiseSignal::new(0, vec![-1.0, 1.0], vec![vec![1.0], vec![-2.0]], TrigSeries::zero(), 0.0).unwrap();
        let w = signal_coeffs(&s, 512);
        let j = 2.0;
        let moll = mollifier_coeffs(-1.0, j / 3.0, j / 9.0, 512 + 256).unwrap();
        let local = localize(&w, &moll, 256).unwrap();
        let x: Vec<f64> = eckhoff_initial(&local, 1, 256).unwrap();
        assert!((x[0] + 1.0).abs() < 0.02, "{x:?}");
    }
}
