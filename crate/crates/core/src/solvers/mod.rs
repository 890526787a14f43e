//! Inversion of the measurement map.
//!
//! Every solver here works on the progression-indexed samples
//! `q_s = m_{t+sp}`, for which `q_s = Σ_j w_j^s Q_j(s)` with `w_j = z_j^p`.
//! Returned models therefore live in the `w` domain; [`crate::decimation`]
//! maps them back to the original nodes.

mod annihilation;
mod esprit;
mod hankel;
mod lm;
mod vandermonde;

pub use annihilation::annihilation_solve_single;
pub use esprit::esprit_solve;
pub use hankel::prony_hankel_solve;
pub use lm::{lm_refine, LM_MAX_ITERATIONS};
pub use vandermonde::confluent_vandermonde_coeffs;

use std::fmt;

use crate::error::Result;
use crate::forward::evaluate_moments;
use crate::model::{PronyModel, SampleSet};
use crate::scalar::{modulus, Real};

/// Ratio `σ_min/σ_max` below which Hankel and Vandermonde systems count as
/// numerically rank-deficient.
pub const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Hankel,
    Annihilation,
    Esprit,
    LevenbergMarquardt,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Hankel => "hankel",
            Method::Annihilation => "annihilation",
            Method::Esprit => "esprit",
            Method::LevenbergMarquardt => "lm",
        })
    }
}

/// Non-fatal conditions noticed during a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverFlag {
    /// Two root groupings had costs within 10%.
    AmbiguousClustering,
    /// Singular value gap `σ_K/σ_{K+1}` below 10.
    WeakRankStructure,
    /// The refinement hit its iteration cap; the best iterate is returned.
    IterationCap,
    /// Final residual exceeds `10·ε·√count`; usually a wrong branch.
    LargeResidual,
}

impl fmt::Display for SolverFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverFlag::AmbiguousClustering => "ambiguous-clustering",
            SolverFlag::WeakRankStructure => "weak-rank",
            SolverFlag::IterationCap => "iteration-cap",
            SolverFlag::LargeResidual => "large-residual",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport<T: Real = f64> {
    /// Solver that produced the initial estimate.
    pub method: Method,
    /// Whether a Levenberg–Marquardt refinement followed.
    pub refined: bool,
    pub iterations: usize,
    /// `max_k |m_k(estimate) - m_k(input)|` over the indices used.
    pub residual: T,
    /// `(Σ_k |m_k(estimate) - m_k(input)|²)^{1/2}`, the refined objective.
    pub residual_l2: T,
    pub flags: Vec<SolverFlag>,
}

impl<T: Real> SolverReport<T> {
    pub(crate) fn new(method: Method, model: &PronyModel<T>, samples: &SampleSet<T>) -> Result<Self> {
        let (residual, residual_l2) = residuals(model, samples)?;
        Ok(SolverReport { method, refined: false, iterations: 0, residual, residual_l2, flags: Vec::new() })
    }

    pub(crate) fn flag(&mut self, flag: SolverFlag) {
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
            self.flags.sort();
        }
    }

    /// Method tag as used in sweep tables, e.g. `hankel+lm`.
    pub fn method_tag(&self) -> String {
        if self.refined && self.method != Method::LevenbergMarquardt {
            format!("{}+lm", self.method)
        } else {
            self.method.to_string()
        }
    }

    pub fn flags_tag(&self) -> String {
        self.flags.iter().map(ToString::to_string).collect::<Vec<_>>().join("|")
    }
}

/// Max-abs and Euclidean residual of `model` against `samples`.
pub fn residuals<T: Real>(model: &PronyModel<T>, samples: &SampleSet<T>) -> Result<(T, T)> {
    let fitted = evaluate_moments(model, samples.scheme())?;
    let mut max = T::zero();
    let mut sq = T::zero();
    for (a, b) in fitted.values().iter().zip(samples.values()) {
        let d = modulus(a - b);
        max = max.max(d);
        sq += d * d;
    }
    Ok((max, sq.sqrt()))
}
