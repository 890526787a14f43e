use nalgebra::Complex;

use super::{confluent_vandermonde_coeffs, Method, SolverFlag, SolverReport, RANK_TOLERANCE};
use crate::error::{PronyError, Result};
use crate::linalg::{cr, least_squares, poly_roots, CMatrix, CVector};
use crate::model::{PronyModel, SampleSet, Structure};
use crate::scalar::{arg, cis, modulus, Real};

/// Classical Prony's method generalized to multiple roots.
///
/// Fits the monic annihilating polynomial of degree `L = Σ ℓ_j` to the
/// progression-indexed samples by least squares over every available Hankel
/// row, takes its `L` roots, groups them into clusters of the prescribed
/// sizes and finally recovers the polynomial amplitudes. The returned model
/// is in the `w = z^p` domain, indexed by `s = 0, 1, …`.
pub fn prony_hankel_solve<T: Real>(
    samples: &SampleSet<T>,
    structure: &Structure,
) -> Result<(PronyModel<T>, SolverReport<T>)> {
    let q = samples.reindexed();
    let l = structure.degree();
    let n = q.len();
    if n < 2 * l {
        return Err(PronyError::InvalidArgument(format!(
            "Hankel solve needs at least 2L = {} samples, got {n}",
            2 * l
        )));
    }
    let values = q.values();
    let rows = n - l;
    let hankel = CMatrix::from_fn(rows, l, |r, c| values[r + c]);
    let rhs = CVector::from_fn(rows, |r, _| -values[r + l]);
    let ls = least_squares(&hankel, &rhs, T::tol(RANK_TOLERANCE)).map_err(|e| match e {
        PronyError::RankDeficient { condition } => PronyError::DegenerateSamples { ratio: 1.0 / condition },
        other => other,
    })?;
    let mut poly: Vec<Complex<T>> = ls.solution.iter().copied().collect();
    poly.push(cr(T::one()));
    let roots = poly_roots(&poly)?;

    let clustering = cluster_roots(&roots, structure.multiplicities());
    let nodes: Vec<Complex<T>> = clustering.groups.iter().map(|g| centroid(&roots, g)).collect();
    let multiplicities: Vec<usize> = clustering.groups.iter().map(Vec::len).collect();
    let coefficients = confluent_vandermonde_coeffs(&nodes, &multiplicities, &q)?;
    let model = PronyModel::new(nodes, coefficients)?;
    let mut report = SolverReport::new(Method::Hankel, &model, &q)?;
    if clustering.ambiguous {
        report.flag(SolverFlag::AmbiguousClustering);
    }
    Ok((model, report))
}

/// Cluster mean projected onto the unit circle.
fn centroid<T: Real>(roots: &[Complex<T>], group: &[usize]) -> Complex<T> {
    let sum = group.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &i| acc + roots[i]);
    cis(arg(sum / cr(T::from_count(group.len()))))
}

pub(crate) struct Clustering {
    pub groups: Vec<Vec<usize>>,
    pub ambiguous: bool,
}

/// Greedy proximity grouping of roots into clusters of the requested sizes.
///
/// Sizes are served largest first. For each size `ℓ`, every remaining root
/// seeds a candidate made of itself and its `ℓ-1` nearest remaining roots;
/// the candidate with the smallest spread around its mean wins. A runner-up
/// with a different member set within 10% of the winning cost marks the
/// grouping as ambiguous.
pub(crate) fn cluster_roots<T: Real>(roots: &[Complex<T>], sizes: &[usize]) -> Clustering {
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let mut remaining: Vec<usize> = (0..roots.len()).collect();
    let mut groups = Vec::with_capacity(sizes.len());
    let mut ambiguous = false;

    for &slot in &order {
        let size = sizes[slot];
        if size == 1 && order.iter().all(|&s| sizes[s] == 1) {
            // Only singletons remain to be formed.
            let i = remaining.remove(0);
            groups.push(vec![i]);
            continue;
        }
        let mut candidates: Vec<(T, Vec<usize>)> = remaining
            .iter()
            .map(|&seed| {
                let mut by_dist: Vec<usize> = remaining.clone();
                by_dist.sort_by(|&a, &b| {
                    modulus(roots[a] - roots[seed])
                        .partial_cmp(&modulus(roots[b] - roots[seed]))
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(a.cmp(&b))
                });
                let mut members: Vec<usize> = by_dist.into_iter().take(size).collect();
                members.sort_unstable();
                (spread(roots, &members), members)
            })
            .collect();
        candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
        let (best_cost, best) = candidates[0].clone();
        if let Some((cost, _)) = candidates.iter().find(|(_, m)| *m != best) {
            if *cost <= best_cost * T::lit(1.1) {
                ambiguous = true;
            }
        }
        remaining.retain(|i| !best.contains(i));
        groups.push(best);
    }
    // Restore the caller's slot order.
    let mut ordered = vec![Vec::new(); sizes.len()];
    for (g, &slot) in groups.into_iter().zip(&order) {
        ordered[slot] = g;
    }
    Clustering { groups: ordered, ambiguous }
}

fn spread<T: Real>(roots: &[Complex<T>], members: &[usize]) -> T {
    let n = cr(T::from_count(members.len()));
    let mean = members.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &i| acc + roots[i]) / n;
    members.iter().fold(T::zero(), |acc, &i| acc + modulus(roots[i] - mean))
}
