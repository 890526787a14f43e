use nalgebra::Complex;

use super::RANK_TOLERANCE;
use crate::error::{PronyError, Result};
use crate::forward::node_power;
use crate::linalg::{cr, least_squares, CMatrix, CVector};
use crate::model::SampleSet;
use crate::scalar::{arg, Real};

/// Coefficients `c_{ℓ,j}` for fixed nodes: the least-squares solution of the
/// confluent Vandermonde system with columns `z_j^k·k^ℓ`, rows indexed by the
/// sample indices `k`.
pub fn confluent_vandermonde_coeffs<T: Real>(
    nodes: &[Complex<T>],
    multiplicities: &[usize],
    samples: &SampleSet<T>,
) -> Result<Vec<Vec<Complex<T>>>> {
    if nodes.len() != multiplicities.len() {
        return Err(PronyError::StructureMismatch("one multiplicity per node expected".into()));
    }
    let unknowns: usize = multiplicities.iter().sum();
    if samples.len() < unknowns {
        return Err(PronyError::InvalidArgument(format!(
            "{} samples cannot determine {unknowns} coefficients",
            samples.len()
        )));
    }
    let args: Vec<T> = nodes.iter().map(|&z| arg(z)).collect();
    let mut basis = CMatrix::zeros(samples.len(), unknowns);
    for (row, k) in samples.scheme().indices().enumerate() {
        let kf = T::from_count(k);
        let mut col = 0;
        for (j, &l) in multiplicities.iter().enumerate() {
            let zk = node_power(args[j], k);
            let mut kl = T::one();
            for _ in 0..l {
                basis[(row, col)] = zk * cr(kl);
                kl *= kf;
                col += 1;
            }
        }
    }
    let rhs = CVector::from_column_slice(samples.values());
    let ls = least_squares(&basis, &rhs, T::tol(RANK_TOLERANCE))?;
    let mut out = Vec::with_capacity(nodes.len());
    let mut col = 0;
    for &l in multiplicities {
        out.push(ls.solution.rows(col, l).iter().copied().collect());
        col += l;
    }
    Ok(out)
}
