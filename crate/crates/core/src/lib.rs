//! Polynomial Prony systems on decimated index sets and their use for
//! reconstructing piecewise-smooth functions from Fourier coefficients.
//!
//! The numerical core is generic over [`Real`] (`f32`, `f64`). Aliases with
//! a `64`/`32` suffix fix the scalar type; the experiment harness and the
//! file formats use `f64`.

pub mod decimation;
pub mod error;
pub mod forward;
pub mod fourier;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod matching;
pub mod model;
pub mod scalar;
pub mod solvers;

pub use decimation::{
    coefficient_error_bound, decimated_solve, error_bounds, node_error_bound, separated_regime_factor, undecimate_node,
    BaseSolver, DecimationOptions,
};
pub use error::{PronyError, Result};
pub use forward::{
    add_noise, add_noise_with, condition_estimate, evaluate_moments, jacobian, regularity_check, NoiseModel,
    RegularityReport, RegularityTolerances,
};
pub use fourier::{
    eckhoff_initial, eckhoff_transform, localize, mollifier_coeffs, partial_sum_eval, phi_coeffs, reconstruct,
    signal_coeffs, sup_error_away, CoefficientWindow, Mollifier, ReconstructionResult,
};
pub use matching::{circle_distance, match_estimates, MatchReport};
pub use model::{ErrorBounds, PiecewiseSignal, PronyModel, SampleSet, SamplingScheme, Structure, TrigSeries};
pub use nalgebra::Complex;
pub use scalar::Real;
pub use solvers::{
    annihilation_solve_single, confluent_vandermonde_coeffs, esprit_solve, lm_refine, prony_hankel_solve, Method,
    SolverFlag, SolverReport,
};

pub type PronyModel64 = PronyModel<f64>;
pub type PronyModel32 = PronyModel<f32>;
pub type SampleSet64 = SampleSet<f64>;
pub type SampleSet32 = SampleSet<f32>;
pub type SolverReport64 = SolverReport<f64>;
pub type SolverReport32 = SolverReport<f32>;
pub type PiecewiseSignal64 = PiecewiseSignal<f64>;
pub type PiecewiseSignal32 = PiecewiseSignal<f32>;
pub type CoefficientWindow64 = CoefficientWindow<f64>;
pub type CoefficientWindow32 = CoefficientWindow<f32>;
pub type ErrorBounds64 = ErrorBounds<f64>;
pub type ErrorBounds32 = ErrorBounds<f32>;
