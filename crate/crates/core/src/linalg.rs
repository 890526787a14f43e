//! Dense complex linear algebra used by the solvers: column-equilibrated
//! least squares, spectral decompositions and polynomial roots.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{PronyError, Result};
use crate::scalar::{modulus, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

#[inline]
pub(crate) fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    let mut s: Vec<T> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Thin SVD `A = U Σ Vᴴ` with singular values sorted in descending order.
pub struct SortedSvd<T: Real> {
    pub u: CMatrix<T>,
    pub singular_values: Vec<T>,
    pub v_t: CMatrix<T>,
}

pub fn svd<T: Real>(a: &CMatrix<T>) -> SortedSvd<T> {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᴴ");
    let sv: Vec<T> = svd.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap_or(std::cmp::Ordering::Equal));
    let u = CMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let v_t = CMatrix::from_fn(order.len(), v_t.ncols(), |r, c| v_t[(order[r], c)]);
    SortedSvd { u, singular_values: order.iter().map(|&i| sv[i]).collect(), v_t }
}

/// Least-squares solution of `A x ≈ b`.
pub struct LeastSquares<T: Real> {
    pub solution: CVector<T>,
    /// Condition number of the column-equilibrated matrix.
    pub condition: T,
}

/// Solves `min ‖A x - b‖₂` through an SVD of the column-equilibrated
/// matrix. Fails with [`PronyError::RankDeficient`] when the equilibrated
/// matrix has `σ_min < rcond·σ_max`.
pub fn least_squares<T: Real>(a: &CMatrix<T>, b: &CVector<T>, rcond: T) -> Result<LeastSquares<T>> {
    let (m, n) = a.shape();
    if m < n {
        return Err(PronyError::InvalidArgument(format!("underdetermined system ({m}×{n})")));
    }
    let scales: Vec<T> = (0..n)
        .map(|c| {
            let norm = a.column(c).iter().fold(T::zero(), |acc, v| acc + v.norm_sqr()).sqrt();
            if norm > T::zero() {
                norm
            } else {
                T::one()
            }
        })
        .collect();
    let scaled = CMatrix::from_fn(m, n, |r, c| a[(r, c)] / cr(scales[c]));
    let dec = svd(&scaled);
    let smax = dec.singular_values[0];
    let smin = *dec.singular_values.last().expect("n ≥ 1");
    let condition = if smin > T::zero() { smax / smin } else { T::max_value().unwrap_or(smax) };
    if !(smin > rcond * smax) {
        return Err(PronyError::RankDeficient { condition: condition.as_f64() });
    }
    // x = V Σ⁻¹ Uᴴ b, then undo the column scaling.
    let utb = dec.u.adjoint() * b;
    let mut y = CVector::from_fn(n, |i, _| utb[i] / cr(dec.singular_values[i]));
    y = dec.v_t.adjoint() * y;
    for (i, s) in scales.iter().enumerate() {
        y[i] /= cr(*s);
    }
    Ok(LeastSquares { solution: y, condition })
}

/// Eigenvalues of a square complex matrix via the Schur form.
pub fn eigenvalues<T: Real>(a: &CMatrix<T>) -> Result<Vec<Complex<T>>> {
    let n = a.nrows();
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let schur = a
        .clone()
        .try_schur(T::default_epsilon(), 10_000)
        .ok_or_else(|| PronyError::InvalidArgument("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Evaluates `Σ coeffs[i] x^i` and its derivative.
pub fn poly_eval<T: Real>(coeffs: &[Complex<T>], x: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = czero();
    let mut dp = czero();
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// Roots of `Σ coeffs[i] x^i` (ascending powers) from the companion matrix,
/// each polished by guarded Newton steps.
pub fn poly_roots<T: Real>(coeffs: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let mut deg = coeffs.len().saturating_sub(1);
    while deg > 0 && modulus(coeffs[deg]) == T::zero() {
        deg -= 1;
    }
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex<T>> = coeffs[..deg].iter().map(|&c| c / lead).collect();
    let roots = if deg == 1 {
        vec![-monic[0]]
    } else {
        let mut comp = CMatrix::<T>::zeros(deg, deg);
        for i in 1..deg {
            comp[(i, i - 1)] = cr(T::one());
        }
        for i in 0..deg {
            comp[(i, deg - 1)] = -monic[i];
        }
        eigenvalues(&comp)?
    };
    let mut full = monic;
    full.push(cr(T::one()));
    Ok(roots.into_iter().map(|r| polish(&full, r)).collect())
}

fn polish<T: Real>(coeffs: &[Complex<T>], mut x: Complex<T>) -> Complex<T> {
    let (mut p, mut dp) = poly_eval(coeffs, x);
    for _ in 0..3 {
        if modulus(dp) == T::zero() {
            break;
        }
        let candidate = x - p / dp;
        let (pc, dpc) = poly_eval(coeffs, candidate);
        if modulus(pc) < modulus(p) {
            x = candidate;
            p = pc;
            dp = dpc;
        } else {
            break;
        }
    }
    x
}
