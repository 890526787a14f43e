//! The forward measurement map `m_k = Σ_j z_j^k Σ_ℓ c_{ℓ,j} k^ℓ`, its
//! Jacobian, the regularity test for decimated index sets, local
//! conditioning, and bounded noise injection.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{PronyError, Result};
use crate::linalg::{cr, czero, singular_values, CMatrix};
use crate::model::{PronyModel, SampleSet, SamplingScheme, MAX_MULTIPLICITY, MAX_SAMPLE_INDEX};
use crate::scalar::{cis, modulus, Real};

fn check_limits<T: Real>(model: &PronyModel<T>, scheme: &SamplingScheme) -> Result<()> {
    if scheme.max_index() > MAX_SAMPLE_INDEX {
        return Err(PronyError::InvalidScheme(format!(
            "largest index {} exceeds {MAX_SAMPLE_INDEX}",
            scheme.max_index()
        )));
    }
    if model.multiplicities().into_iter().any(|l| l > MAX_MULTIPLICITY) {
        return Err(PronyError::InvalidModel(format!("multiplicity exceeds {MAX_MULTIPLICITY}")));
    }
    Ok(())
}

/// `Σ_ℓ c_ℓ k^ℓ` by Horner's rule.
#[inline]
pub(crate) fn amplitude<T: Real>(coeffs: &[Complex<T>], k: T) -> Complex<T> {
    coeffs.iter().rev().fold(czero(), |acc, &c| acc * cr(k) + c)
}

/// `z^k` computed as `e^{i·k·arg z}` so large powers stay on the circle.
#[inline]
pub(crate) fn node_power<T: Real>(arg: T, k: usize) -> Complex<T> {
    cis(arg * T::from_count(k))
}

/// Exact moments of `model` at every index of `scheme`.
pub fn evaluate_moments<T: Real>(model: &PronyModel<T>, scheme: &SamplingScheme) -> Result<SampleSet<T>> {
    check_limits(model, scheme)?;
    let args = model.node_args();
    let values = scheme
        .indices()
        .map(|k| {
            let kf = T::from_count(k);
            args.iter()
                .zip(model.coefficients())
                .fold(czero(), |acc, (&a, c)| acc + node_power(a, k) * amplitude(c, kf))
        })
        .collect();
    SampleSet::exact(*scheme, values)
}

/// Jacobian of the moments with respect to the complex unknowns.
///
/// Columns are grouped per node `j` as
/// `(∂/∂c_{0,j}, …, ∂/∂c_{ℓ_j-1,j}, ∂/∂z_j)`.
pub fn jacobian<T: Real>(model: &PronyModel<T>, scheme: &SamplingScheme) -> Result<CMatrix<T>> {
    check_limits(model, scheme)?;
    let args = model.node_args();
    let mut jac = CMatrix::zeros(scheme.count(), model.unknowns());
    for (row, k) in scheme.indices().enumerate() {
        let kf = T::from_count(k);
        let mut col = 0;
        for (j, coeffs) in model.coefficients().iter().enumerate() {
            let zk = node_power(args[j], k);
            let mut kl = T::one();
            for _ in coeffs {
                jac[(row, col)] = zk * cr(kl);
                kl *= kf;
                col += 1;
            }
            // k·z^{k-1}·A(k) = k·z^k·A(k)/z
            jac[(row, col)] = if k == 0 { czero() } else { cr(kf) * zk * amplitude(coeffs, kf) / model.nodes()[j] };
            col += 1;
        }
    }
    Ok(jac)
}

/// Thresholds for [`regularity_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityTolerances {
    pub separation: f64,
    pub coefficient: f64,
}

impl Default for RegularityTolerances {
    fn default() -> Self {
        RegularityTolerances { separation: 1e-10, coefficient: 1e-10 }
    }
}

/// Outcome of [`regularity_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport<T: Real = f64> {
    pub regular: bool,
    pub stride: usize,
    /// `δ_p` (2 for a single node).
    pub separation: T,
    /// Node pairs with `|z_i^p - z_j^p| ≤ tol`.
    pub aliased_pairs: Vec<(usize, usize)>,
    /// Nodes whose leading coefficient `c_{ℓ_j-1,j}` vanishes.
    pub vanishing_leading: Vec<usize>,
}

impl<T: Real> RegularityReport<T> {
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        for (i, j) in &self.aliased_pairs {
            parts.push(format!("z_{i}^{p} ≈ z_{j}^{p}", p = self.stride));
        }
        for j in &self.vanishing_leading {
            parts.push(format!("leading coefficient of node {j} vanishes"));
        }
        if parts.is_empty() {
            "regular".into()
        } else {
            parts.join("; ")
        }
    }
}

/// `|z_i^p - z_j^p| = 2|sin(p(θ_i - θ_j)/2)|`.
pub(crate) fn power_gap<T: Real>(a: T, b: T, p: usize) -> T {
    (T::lit(2.0) * (T::from_count(p) * (a - b) * T::lit(0.5)).sin()).abs()
}

/// `δ_p = min_{i≠j} |z_j^p - z_i^p|`; a lone node has `δ_p = 2`.
pub fn power_separation<T: Real>(model: &PronyModel<T>, p: usize) -> T {
    let args = model.node_args();
    let mut best = T::lit(2.0);
    for i in 0..args.len() {
        for j in (i + 1)..args.len() {
            best = best.min(power_gap(args[i], args[j], p));
        }
    }
    best
}

/// Tests whether `model` is a regular point of the measurement map on an
/// index set of stride `p`: distinct `p`-th powers of the nodes and nonzero
/// leading coefficients.
pub fn regularity_check<T: Real>(model: &PronyModel<T>, p: usize, tol: RegularityTolerances) -> RegularityReport<T> {
    let args = model.node_args();
    let sep_tol = T::lit(tol.separation);
    let coeff_tol = T::lit(tol.coefficient);
    let mut aliased_pairs = Vec::new();
    for i in 0..args.len() {
        for j in (i + 1)..args.len() {
            if !(power_gap(args[i], args[j], p.max(1)) > sep_tol) {
                aliased_pairs.push((i, j));
            }
        }
    }
    let vanishing_leading: Vec<usize> =
        (0..model.node_count()).filter(|&j| !(modulus(model.leading_coefficient(j)) > coeff_tol)).collect();
    RegularityReport {
        regular: p >= 1 && aliased_pairs.is_empty() && vanishing_leading.is_empty(),
        stride: p,
        separation: power_separation(model, p.max(1)),
        aliased_pairs,
        vanishing_leading,
    }
}

/// Local Lipschitz constant of the inverse measurement map: `‖J⁻¹‖_∞` for
/// the square system (`count = R`).
pub fn condition_estimate<T: Real>(model: &PronyModel<T>, scheme: &SamplingScheme) -> Result<T> {
    if scheme.count() != model.unknowns() {
        return Err(PronyError::InvalidScheme(format!(
            "square system needs count = R = {}, got {}",
            model.unknowns(),
            scheme.count()
        )));
    }
    let report = regularity_check(model, scheme.stride(), RegularityTolerances::default());
    if !report.regular {
        return Err(PronyError::NotRegular(report.describe()));
    }
    let jac = jacobian(model, scheme)?;
    let sv = singular_values(&jac);
    let smax = sv[0];
    let smin = *sv.last().expect("non-empty");
    if !(smin > smax * T::default_epsilon() * T::from_count(sv.len())) {
        return Err(PronyError::SingularJacobian { smallest: smin.as_f64() });
    }
    let inv = jac.try_inverse().ok_or(PronyError::SingularJacobian { smallest: smin.as_f64() })?;
    let norm = inv
        .row_iter()
        .map(|row| row.iter().fold(T::zero(), |acc, &v| acc + modulus(v)))
        .fold(T::zero(), |a, b| a.max(b));
    Ok(norm)
}

/// Perturbation model for [`add_noise`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseModel {
    /// Uniform on the closed disk of radius ε: every perturbation is bounded
    /// by ε, the worst-case model the stability bounds are stated for.
    #[default]
    Disk,
    /// Circular complex Gaussian with `E|n|² = ε²`. Not bounded; offered for
    /// comparison only.
    Gaussian,
}

/// `len` perturbations drawn from `model` with scale `eps`, deterministic in
/// `seed`.
pub fn noise_sequence<T: Real>(len: usize, eps: f64, seed: u64, model: NoiseModel) -> Vec<Complex<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| {
            let (re, im) = match model {
                NoiseModel::Disk => {
                    let r = eps * rng.gen::<f64>().sqrt();
                    let phi = std::f64::consts::TAU * rng.gen::<f64>();
                    (r * phi.cos(), r * phi.sin())
                }
                NoiseModel::Gaussian => {
                    let s = eps * std::f64::consts::FRAC_1_SQRT_2;
                    let a: f64 = rng.sample(StandardNormal);
                    let b: f64 = rng.sample(StandardNormal);
                    (s * a, s * b)
                }
            };
            Complex::new(T::lit(re), T::lit(im))
        })
        .collect()
}

/// Perturbs every sample by an independent draw of radius at most `eps`
/// (uniform on the disk).
pub fn add_noise<T: Real>(samples: &SampleSet<T>, eps: f64, seed: u64) -> Result<SampleSet<T>> {
    add_noise_with(samples, eps, seed, NoiseModel::Disk)
}

pub fn add_noise_with<T: Real>(samples: &SampleSet<T>, eps: f64, seed: u64, model: NoiseModel) -> Result<SampleSet<T>> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(PronyError::InvalidArgument("noise level must be finite and ≥ 0".into()));
    }
    if eps == 0.0 {
        return Ok(samples.clone());
    }
    let noise = noise_sequence::<T>(samples.len(), eps, seed, model);
    let values = samples.values().iter().zip(noise).map(|(&v, n)| v + n).collect();
    Ok(samples.with_values(values, T::lit(eps)))
}
