//! Solving on arithmetic progressions `I_{t,p}`: the base solvers run in the
//! `w = z^p` domain, nodes are brought back by a hint-guided choice of the
//! `p`-th root, and coefficients are refitted on the original indices.
//! Also hosts the first-order error bounds for decimated solves.

use nalgebra::Complex;

use crate::error::{PronyError, Result};
use crate::forward::{power_separation, regularity_check, RegularityTolerances};
use crate::matching::{circle_distance, min_cost_assignment};
use crate::model::{ErrorBounds, PronyModel, SampleSet, Structure};
use crate::scalar::{arg, cis, factorial, int_pow, modulus, Real};
use crate::solvers::{
    annihilation_solve_single, confluent_vandermonde_coeffs, esprit_solve, lm_refine, prony_hankel_solve, SolverFlag,
    SolverReport,
};

/// Algebraic solver used for the initial `w`-domain estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BaseSolver {
    #[default]
    Hankel,
    Esprit,
    /// Single node only.
    Annihilation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecimationOptions {
    pub base: BaseSolver,
    /// Finish with a Levenberg–Marquardt pass on the original indices.
    pub refine: bool,
}

impl Default for DecimationOptions {
    fn default() -> Self {
        DecimationOptions { base: BaseSolver::Hankel, refine: true }
    }
}

/// Tie threshold for [`undecimate_node`].
pub const BRANCH_TIE: f64 = 1e-9;

/// The `p`-th root of `w` on the unit circle closest to the angle `hint`.
///
/// Candidates are `θ_n = (arg w + 2πn)/p`, `n = 0, …, p-1`; the modulus of
/// `w` is discarded. Correct whenever the hint is within `π/p` of the true
/// argument.
pub fn undecimate_node<T: Real>(w: Complex<T>, p: usize, hint: T) -> Result<Complex<T>> {
    if p == 0 {
        return Err(PronyError::InvalidArgument("stride must be positive".into()));
    }
    let m = modulus(w);
    if !(m >= T::lit(0.5) && m <= T::lit(2.0)) {
        return Err(PronyError::InvalidArgument(format!("|w| = {m} outside [0.5, 2]")));
    }
    let base = arg(w);
    if p == 1 {
        return Ok(cis(base));
    }
    let pf = T::from_count(p);
    let mut best: Option<(T, T)> = None;
    let mut second = T::max_value().unwrap_or(T::one());
    for n in 0..p {
        let theta = (base + T::two_pi() * T::from_count(n)) / pf;
        let d = circle_distance(theta, hint);
        match best {
            Some((bd, _)) if d >= bd => second = second.min(d),
            Some((bd, _)) => {
                second = second.min(bd);
                best = Some((d, theta));
            }
            None => best = Some((d, theta)),
        }
    }
    let (d, theta) = best.expect("p ≥ 1");
    if second - d <= T::lit(BRANCH_TIE) {
        return Err(PronyError::AmbiguousBranch);
    }
    Ok(cis(theta))
}

/// Estimates the model from samples on `I_{t,p}`.
///
/// The base solver runs on the re-indexed samples `q_s = m_{t+sp}`. For
/// `p > 1` every `w_j` is paired with a hint (node arguments, one per slot of
/// `structure`, in that order) by minimal total distance between `arg w_j`
/// and `p·hint`, and mapped back by [`undecimate_node`]. Coefficients are
/// then refitted on the original indices and, if requested, everything is
/// refined by [`lm_refine`].
///
/// With `p = 1`, `t = 0` and no refinement the base solver's output is
/// returned untouched.
pub fn decimated_solve<T: Real>(
    samples: &SampleSet<T>,
    structure: &Structure,
    hints: Option<&[T]>,
    options: DecimationOptions,
) -> Result<(PronyModel<T>, SolverReport<T>)> {
    let scheme = *samples.scheme();
    let p = scheme.stride();
    if let Some(h) = hints {
        if h.len() != structure.node_count() {
            return Err(PronyError::StructureMismatch(format!(
                "{} hints for {} nodes",
                h.len(),
                structure.node_count()
            )));
        }
    } else if p > 1 {
        return Err(PronyError::InvalidArgument("coarse node hints are required when p > 1".into()));
    }

    let q = samples.reindexed();
    let (w_model, mut report) = match options.base {
        BaseSolver::Hankel => prony_hankel_solve(&q, structure)?,
        BaseSolver::Esprit => {
            if !structure.is_simple() {
                return Err(PronyError::StructureMismatch("ESPRIT handles simple nodes only".into()));
            }
            esprit_solve(&q, structure.node_count())?
        }
        BaseSolver::Annihilation => {
            if structure.node_count() != 1 {
                return Err(PronyError::StructureMismatch("annihilation solver handles one node".into()));
            }
            let hint = hints.map(|h| cis(h[0] * T::from_count(p)));
            annihilation_solve_single(&q, structure.multiplicities()[0], hint)?
        }
    };

    let mut model = if p == 1 && scheme.offset() == 0 {
        w_model
    } else {
        let (nodes, multiplicities) = if p == 1 {
            (w_model.nodes().to_vec(), w_model.multiplicities())
        } else {
            let hints = hints.expect("checked above");
            let w_args = w_model.node_args();
            let w_mult = w_model.multiplicities();
            let slots = structure.multiplicities();
            let pf = T::from_count(p);
            let assignment = min_cost_assignment(
                slots.len(),
                &|i: usize, j: usize| circle_distance(w_args[j], hints[i] * pf),
                &|i: usize, j: usize| slots[i] == w_mult[j],
            );
            let nodes = assignment
                .iter()
                .enumerate()
                .map(|(i, &j)| undecimate_node(w_model.nodes()[j], p, hints[i]))
                .collect::<Result<Vec<_>>>()?;
            (nodes, slots.to_vec())
        };
        let coefficients = confluent_vandermonde_coeffs(&nodes, &multiplicities, samples)?;
        PronyModel::new(nodes, coefficients)?
    };

    let flags = report.flags.clone();
    if options.refine {
        let (refined, lm_report) = lm_refine(samples, &model)?;
        model = refined;
        report = SolverReport { method: report.method, ..lm_report };
        for f in flags {
            report.flag(f);
        }
    } else if !(p == 1 && scheme.offset() == 0) {
        let fresh = SolverReport::new(report.method, &model, samples)?;
        report = SolverReport { flags, ..fresh };
    }

    let scale = samples.values().iter().fold(T::zero(), |a, v| a.max(modulus(*v)));
    let floor = samples.noise_level().max(T::tol(1e-10) * (T::one() + scale));
    if report.residual > T::lit(10.0) * floor * T::from_count(samples.len()).sqrt() {
        report.flag(SolverFlag::LargeResidual);
    }
    Ok((model, report))
}

fn require_regular<T: Real>(model: &PronyModel<T>, p: usize) -> Result<T> {
    if p == 0 {
        return Err(PronyError::InvalidArgument("stride must be positive".into()));
    }
    let report = regularity_check(model, p, RegularityTolerances::default());
    if !report.regular {
        return Err(PronyError::NotRegular(report.describe()));
    }
    Ok(power_separation(model, p))
}

/// First-order bound on `|Δz_j|` for samples on `I_{t,p}` with noise `ε`:
/// `(2/ℓ_j!)·(2/δ_p)^R·|c_{ℓ_j-1,j}|^{-1}·p^{-ℓ_j}·ε`.
///
/// The offset `t` does not enter the node bound.
pub fn node_error_bound<T: Real>(model: &PronyModel<T>, _t: usize, p: usize, eps: T) -> Result<Vec<T>> {
    let delta = require_regular(model, p)?;
    let r = model.unknowns();
    let common = int_pow(T::lit(2.0) / delta, r) * eps;
    Ok(model
        .coefficients()
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let l = c.len();
            T::lit(2.0) / factorial::<T>(l) * common
                / modulus(model.leading_coefficient(j))
                / int_pow(T::from_count(p), l)
        })
        .collect())
}

/// First-order bound on `|Δc_{i,j}|`, indexed `[j][i]`:
/// `C·(2/δ_p)^R·(1/2 + R/δ_p)^{ℓ_j}·(max(t,1)^{ℓ_j-i}/p^i)·(1 + |c_{i-1,j}|/|c_{ℓ_j-1,j}|)·ε`
/// with `c_{-1,j} = 0`. The constant `C` is caller-supplied.
pub fn coefficient_error_bound<T: Real>(
    model: &PronyModel<T>,
    t: usize,
    p: usize,
    eps: T,
    constant: T,
) -> Result<Vec<Vec<T>>> {
    if !(constant > T::zero()) {
        return Err(PronyError::InvalidArgument("the bound constant must be positive".into()));
    }
    let delta = require_regular(model, p)?;
    let r = model.unknowns();
    let rf = T::from_count(r);
    let common = constant * int_pow(T::lit(2.0) / delta, r) * eps;
    let growth = T::lit(0.5) + rf / delta;
    let tf = T::from_count(t.max(1));
    let pf = T::from_count(p);
    Ok(model
        .coefficients()
        .iter()
        .map(|c| {
            let l = c.len();
            let lead = modulus(c[l - 1]);
            (0..l)
                .map(|i| {
                    let prev = if i == 0 { T::zero() } else { modulus(c[i - 1]) };
                    common * int_pow(growth, l) * int_pow(tf, l - i) / int_pow(pf, i) * (T::one() + prev / lead)
                })
                .collect()
        })
        .collect())
}

/// Both bounds together with `δ_p`.
pub fn error_bounds<T: Real>(model: &PronyModel<T>, t: usize, p: usize, eps: T, constant: T) -> Result<ErrorBounds<T>> {
    Ok(ErrorBounds {
        node_bounds: node_error_bound(model, t, p, eps)?,
        coefficient_bounds: coefficient_error_bound(model, t, p, eps, constant)?,
        separation: power_separation(model, p),
    })
}

/// `p^{-(R+ℓ)}`: the improvement factor of the node bound in the regime
/// where `δ_p ≈ p·δ`.
pub fn separated_regime_factor(ell: usize, unknowns: usize, p: usize) -> f64 {
    (p as f64).powi(-((unknowns + ell) as i32))
}
