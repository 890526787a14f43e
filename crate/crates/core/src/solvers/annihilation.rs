use nalgebra::Complex;

use super::{confluent_vandermonde_coeffs, Method, SolverReport};
use crate::error::{PronyError, Result};
use crate::linalg::{cr, czero, poly_eval, poly_roots};
use crate::matching::circle_distance;
use crate::model::{PronyModel, SampleSet};
use crate::scalar::{arg, cis, modulus, Real};

const GN_ITERATIONS: usize = 30;

/// Coefficients (ascending powers of `x`) of
/// `P_s(x) = Σ_{i=0}^{ℓ} C(ℓ,i)·(-x)^{ℓ-i}·q_{s+i}`, which vanishes at
/// `x = w` whenever `q_s = w^s Q(s)` with `deg Q < ℓ`.
fn shift_polynomial<T: Real>(q: &[Complex<T>], s: usize, ell: usize) -> Vec<Complex<T>> {
    let mut binom = T::one();
    let mut coeffs = vec![czero(); ell + 1];
    for i in 0..=ell {
        let power = ell - i;
        let sign = if power % 2 == 0 { T::one() } else { -T::one() };
        coeffs[power] = q[s + i] * cr(binom * sign);
        binom = binom * T::from_count(ell - i) / T::from_count(i + 1);
    }
    coeffs
}

/// Single-node solve through the annihilation identity `(E - w)^ℓ q = 0`
/// (`E` the index shift).
///
/// The first `ℓ + 1` samples give a degree-`ℓ` equation for `w`; among its
/// roots with modulus in `[0.5, 2]` the one closest to the unit circle (and
/// to `hint`, when given) is taken. Additional samples contribute further
/// shifted equations, combined by a Gauss–Newton least-squares polish of `w`.
/// The `ℓ` amplitude coefficients are then fitted on every sample.
pub fn annihilation_solve_single<T: Real>(
    samples: &SampleSet<T>,
    ell: usize,
    hint: Option<Complex<T>>,
) -> Result<(PronyModel<T>, SolverReport<T>)> {
    if ell == 0 {
        return Err(PronyError::InvalidArgument("multiplicity must be positive".into()));
    }
    let q = samples.reindexed();
    let values = q.values();
    if values.len() < ell + 1 {
        return Err(PronyError::InvalidArgument(format!(
            "annihilation solve needs ℓ + 1 = {} samples, got {}",
            ell + 1,
            values.len()
        )));
    }
    let shifts = values.len() - ell;
    let polys: Vec<Vec<Complex<T>>> = (0..shifts).map(|s| shift_polynomial(values, s, ell)).collect();

    let roots = poly_roots(&polys[0])?;
    let (lo, hi) = (T::lit(0.5), T::lit(2.0));
    let mut scored: Vec<(T, Complex<T>)> = roots
        .into_iter()
        .filter(|&r| {
            let m = modulus(r);
            m >= lo && m <= hi
        })
        .map(|r| {
            let mut score = modulus(r).ln().abs();
            if let Some(h) = hint {
                score += circle_distance(arg(r), arg(h));
            }
            (score, r)
        })
        .collect();
    if scored.is_empty() {
        return Err(PronyError::NoUnimodularRoot);
    }
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut w = scored[0].1;
    if scored.len() > 1 && (scored[1].0 - scored[0].0).abs() <= T::lit(1e-9) {
        // A tie can still be broken by the remaining shifted equations.
        let (a, b) = (objective(&polys[1..], scored[0].1), objective(&polys[1..], scored[1].1));
        if shifts == 1 || (a - b).abs() <= T::lit(1e-9) * (a + b) {
            return Err(PronyError::AmbiguousHint);
        }
        if b < a {
            w = scored[1].1;
        }
    }
    if shifts > 1 {
        w = polish(&polys, w);
    }

    let node = cis(arg(w));
    let coefficients = confluent_vandermonde_coeffs(&[node], &[ell], &q)?;
    let model = PronyModel::new(vec![node], coefficients)?;
    let report = SolverReport::new(Method::Annihilation, &model, &q)?;
    Ok((model, report))
}

fn objective<T: Real>(polys: &[Vec<Complex<T>>], x: Complex<T>) -> T {
    polys.iter().fold(T::zero(), |acc, p| acc + poly_eval(p, x).0.norm_sqr())
}

/// Gauss–Newton on `Σ_s |P_s(w)|²` over the complex scalar `w`.
fn polish<T: Real>(polys: &[Vec<Complex<T>>], mut w: Complex<T>) -> Complex<T> {
    let mut f = objective(polys, w);
    for _ in 0..GN_ITERATIONS {
        let (num, den) = polys.iter().fold((czero::<T>(), T::zero()), |(num, den), p| {
            let (v, dv) = poly_eval(p, w);
            (num + dv.conj() * v, den + dv.norm_sqr())
        });
        if den == T::zero() {
            break;
        }
        let candidate = w - num / cr(den);
        let fc = objective(polys, candidate);
        if !(fc < f) {
            break;
        }
        w = candidate;
        f = fc;
    }
    w
}
