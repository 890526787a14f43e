use nalgebra::Complex;

use super::{Method, SolverFlag, SolverReport};
use crate::error::{PronyError, Result};
use crate::forward::{amplitude, node_power, regularity_check, RegularityTolerances};
use crate::linalg::{cr, czero, least_squares, CMatrix, CVector};
use crate::model::{PronyModel, SampleSet};
use crate::scalar::{cis, Real};

pub const LM_MAX_ITERATIONS: usize = 200;
const STEP_TOLERANCE: f64 = 1e-12;
const MAX_DAMPING: f64 = 1e20;

/// Real parameter vector `(θ_1, Re c_{0,1}, Im c_{0,1}, …, θ_2, …)`.
fn pack<T: Real>(model: &PronyModel<T>) -> Vec<T> {
    let mut x = Vec::with_capacity(2 * model.unknowns());
    for (theta, coeffs) in model.node_args().into_iter().zip(model.coefficients()) {
        x.push(theta);
        for c in coeffs {
            x.push(c.re);
            x.push(c.im);
        }
    }
    x
}

fn unpack<T: Real>(x: &[T], multiplicities: &[usize]) -> (Vec<T>, Vec<Vec<Complex<T>>>) {
    let mut args = Vec::with_capacity(multiplicities.len());
    let mut coefficients = Vec::with_capacity(multiplicities.len());
    let mut i = 0;
    for &l in multiplicities {
        args.push(x[i]);
        i += 1;
        coefficients.push((0..l).map(|m| Complex::new(x[i + 2 * m], x[i + 2 * m + 1])).collect());
        i += 2 * l;
    }
    (args, coefficients)
}

/// Residuals `m_k(x) - y_k` and, optionally, the real Jacobian with rows
/// `(Re, Im)` interleaved per sample.
fn evaluate<T: Real>(
    x: &[T],
    multiplicities: &[usize],
    samples: &SampleSet<T>,
    with_jacobian: bool,
) -> (Vec<Complex<T>>, Option<CMatrix<T>>) {
    let (args, coefficients) = unpack(x, multiplicities);
    let n = samples.len();
    let mut residual = Vec::with_capacity(n);
    let mut jac = with_jacobian.then(|| CMatrix::zeros(2 * n, x.len()));
    for (row, k) in samples.scheme().indices().enumerate() {
        let kf = T::from_count(k);
        let mut m = czero::<T>();
        let mut col = 0;
        for (j, coeffs) in coefficients.iter().enumerate() {
            let zk = node_power(args[j], k);
            let term = zk * amplitude(coeffs, kf);
            m += term;
            if let Some(jac) = jac.as_mut() {
                // ∂/∂θ = i·k·z^k·A(k)
                let d = Complex::new(T::zero(), kf) * term;
                jac[(2 * row, col)] = cr(d.re);
                jac[(2 * row + 1, col)] = cr(d.im);
                col += 1;
                let mut kl = T::one();
                for _ in coeffs {
                    let b = zk * cr(kl);
                    // ∂/∂Re c = z^k k^ℓ, ∂/∂Im c = i·z^k k^ℓ
                    jac[(2 * row, col)] = cr(b.re);
                    jac[(2 * row + 1, col)] = cr(b.im);
                    jac[(2 * row, col + 1)] = cr(-b.im);
                    jac[(2 * row + 1, col + 1)] = cr(b.re);
                    col += 2;
                    kl *= kf;
                }
            }
        }
        residual.push(m - samples.values()[row]);
    }
    (residual, jac)
}

fn cost<T: Real>(r: &[Complex<T>]) -> T {
    r.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr())
}

fn norm<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &a| acc + a * a).sqrt()
}

/// Levenberg–Marquardt refinement of `init` against `samples`.
///
/// Node arguments are optimized as real angles, so every iterate keeps
/// `|z_j| = 1`. Columns of the Jacobian are equilibrated and each damped step
/// solves the augmented system `[J; √λ·I] δ ≈ [-r; 0]` by SVD; `λ` is
/// divided by 10 on an accepted step and multiplied by 10 on a rejected one.
/// Stops when the step norm drops below `1e-12·(1 + ‖x‖)`, when `λ` exceeds
/// `1e20`, or after [`LM_MAX_ITERATIONS`] accepted steps, in which case the
/// best iterate is returned with [`SolverFlag::IterationCap`].
pub fn lm_refine<T: Real>(samples: &SampleSet<T>, init: &PronyModel<T>) -> Result<(PronyModel<T>, SolverReport<T>)> {
    let regularity = regularity_check(init, samples.scheme().stride(), RegularityTolerances::default());
    if !regularity.regular {
        return Err(PronyError::NotRegular(regularity.describe()));
    }
    let multiplicities = init.multiplicities();
    if samples.len() < init.unknowns() {
        return Err(PronyError::InvalidArgument(format!(
            "{} samples cannot determine {} unknowns",
            samples.len(),
            init.unknowns()
        )));
    }

    let mut x = pack(init);
    let p = x.len();
    let (mut r, _) = evaluate(&x, &multiplicities, samples, false);
    let mut f = cost(&r);
    let mut lambda = T::lit(1e-3);
    let mut iterations = 0;
    let mut capped = false;

    'outer: while f > T::zero() {
        if iterations == LM_MAX_ITERATIONS {
            capped = true;
            break;
        }
        let (_, jac) = evaluate(&x, &multiplicities, samples, true);
        let jac = jac.expect("requested Jacobian");
        let rows = jac.nrows();
        let scales: Vec<T> = (0..p)
            .map(|c| {
                let s = jac.column(c).iter().fold(T::zero(), |acc, v| acc + v.re * v.re).sqrt();
                if s > T::zero() {
                    s
                } else {
                    T::one()
                }
            })
            .collect();
        loop {
            let damp = lambda.sqrt();
            let a = CMatrix::from_fn(rows + p, p, |i, c| {
                if i < rows {
                    jac[(i, c)] / cr(scales[c])
                } else if i - rows == c {
                    cr(damp)
                } else {
                    czero()
                }
            });
            let b = CVector::from_fn(rows + p, |i, _| {
                if i < rows {
                    let v = r[i / 2];
                    cr(-if i % 2 == 0 { v.re } else { v.im })
                } else {
                    czero()
                }
            });
            let step: Vec<T> = match least_squares(&a, &b, T::zero()) {
                Ok(ls) => ls.solution.iter().zip(&scales).map(|(y, &s)| y.re / s).collect(),
                Err(_) => break 'outer,
            };
            if norm(&step) < T::lit(STEP_TOLERANCE) * (T::one() + norm(&x)) {
                break 'outer;
            }
            let candidate: Vec<T> = x.iter().zip(&step).map(|(&a, &d)| a + d).collect();
            let (rc, _) = evaluate(&candidate, &multiplicities, samples, false);
            let fc = cost(&rc);
            if fc < f {
                x = candidate;
                r = rc;
                f = fc;
                lambda = (lambda / T::lit(10.0)).max(T::lit(1e-15));
                iterations += 1;
                break;
            }
            lambda *= T::lit(10.0);
            if lambda > T::lit(MAX_DAMPING) {
                break 'outer;
            }
        }
    }

    let (args, coefficients) = unpack(&x, &multiplicities);
    let nodes = args.into_iter().map(cis).collect();
    let model = PronyModel::new(nodes, coefficients)?;
    let mut report = SolverReport::new(Method::LevenbergMarquardt, &model, samples)?;
    report.refined = true;
    report.iterations = iterations;
    if capped {
        report.flag(SolverFlag::IterationCap);
    }
    Ok((model, report))
}
