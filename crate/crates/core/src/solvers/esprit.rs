use nalgebra::Complex;

use super::{confluent_vandermonde_coeffs, Method, SolverFlag, SolverReport, RANK_TOLERANCE};
use crate::error::{PronyError, Result};
use crate::linalg::{eigenvalues, least_squares, svd, CMatrix, CVector};
use crate::model::{PronyModel, SampleSet};
use crate::scalar::{arg, cis, Real};

/// `σ_K/σ_{K+1}` below this is rejected outright.
pub const ESPRIT_MIN_GAP: f64 = 1.5;
/// `σ_K/σ_{K+1}` below this raises [`SolverFlag::WeakRankStructure`].
pub const ESPRIT_WEAK_GAP: f64 = 10.0;

/// Subspace (rotational-invariance) estimate of `K` simple nodes.
///
/// The progression-indexed samples are arranged in a Hankel matrix with
/// about `count/2` rows; the rank-`K` principal left singular subspace `U`
/// satisfies `U↑ Φ ≈ U↓` between its row blocks with the last and the first
/// row removed, and the eigenvalues of the least-squares `Φ` are the nodes.
pub fn esprit_solve<T: Real>(samples: &SampleSet<T>, k: usize) -> Result<(PronyModel<T>, SolverReport<T>)> {
    if k == 0 {
        return Err(PronyError::InvalidArgument("K must be positive".into()));
    }
    let q = samples.reindexed();
    let n = q.len();
    if n < 2 * k + 1 {
        return Err(PronyError::InvalidArgument(format!(
            "ESPRIT needs at least 2K + 1 = {} samples, got {n}",
            2 * k + 1
        )));
    }
    let values = q.values();
    let rows = (n / 2).max(k + 1);
    let cols = n - rows + 1;
    let hankel = CMatrix::from_fn(rows, cols, |r, c| values[r + c]);
    let dec = svd(&hankel);
    let sv = &dec.singular_values;
    if !(sv[0] > T::zero()) {
        return Err(PronyError::DegenerateSamples { ratio: 0.0 });
    }
    // Fewer than K numerically nonzero singular values.
    if !(sv[k - 1] > T::tol(RANK_TOLERANCE) * sv[0]) {
        return Err(PronyError::NoRankStructure { rank: k, gap: 0.0 });
    }
    let gap = match sv.get(k) {
        Some(&next) if next > T::zero() => sv[k - 1] / next,
        _ => T::max_value().unwrap_or(T::one()),
    };
    if !(gap >= T::lit(ESPRIT_MIN_GAP)) {
        return Err(PronyError::NoRankStructure { rank: k, gap: gap.as_f64() });
    }

    let upper = dec.u.view((0, 0), (rows - 1, k)).into_owned();
    let lower = dec.u.view((1, 0), (rows - 1, k)).into_owned();
    let mut phi = CMatrix::zeros(k, k);
    for c in 0..k {
        let rhs: CVector<T> = lower.column(c).into_owned();
        let col = least_squares(&upper, &rhs, T::tol(RANK_TOLERANCE))?.solution;
        phi.set_column(c, &col);
    }
    let nodes: Vec<Complex<T>> = eigenvalues(&phi)?.into_iter().map(|w| cis(arg(w))).collect();
    let coefficients = confluent_vandermonde_coeffs(&nodes, &vec![1; k], &q)?;
    let model = PronyModel::new(nodes, coefficients)?;
    let mut report = SolverReport::new(Method::Esprit, &model, &q)?;
    if gap < T::lit(ESPRIT_WEAK_GAP) {
        report.flag(SolverFlag::WeakRankStructure);
    }
    Ok((model, report))
}
