//! Semi-discrete entropic optimal transport between a continuous source
//! density and a finitely supported target.
//!
//! The crate provides:
//!
//! * benchmark source densities with exact bounds, CDFs, and quantiles
//!   ([`measures`]);
//! * composite Gauss-Legendre quadrature with layer-adaptive refinement
//!   ([`quadrature`]);
//! * stabilized entropic kernels: the smoothed max transform, soft
//!   assignments, and the regularized functional with its derivatives
//!   ([`entropic`]);
//! * a damped-Newton dual solver on the zero-sum gauge subspace and the
//!   exact unregularized solver in one dimension ([`solver`]);
//! * the sensitivity of potentials in the regularization via the governing
//!   linear system, rate fitting, and inequality checks ([`sensitivity`]);
//! * warm-started regularization scaling ([`annealing`]);
//! * entropic vs. unregularized cost analysis with the closed-form gap and
//!   its quadratic asymptote ([`cost`]);
//! * finite-difference and Sinkhorn verification oracles ([`oracle`]).
//!
//! All numerics are generic over the floating-point scalar through
//! [`Scalar`]; the aliases below fix the common `f64` instantiations.
//!
//! ```
//! use sdot_core::*;
//!
//! // equally weighted targets at -1 and 1 with a uniform source: the
//! // potential is identically zero by symmetry
//! let rho = SourceDensity::<f64, 1>::builtin(BuiltinDensity::Lebesgue, None)?;
//! let target = DiscreteTarget::new(vec![[-1.0], [1.0]], vec![0.5, 0.5])?;
//! let sol = solve_dual(
//!     &rho, &target, 0.5, None,
//!     &NewtonSettings::default(), &QuadratureSettings::default(),
//! )?;
//! assert!(sol.report.converged);
//! assert!(sol.potential.sup_norm() <= 1e-10);
//! # Ok::<(), sdot_core::Error>(())
//! ```

// Guard clauses are written `!(x > 0)` rather than `x <= 0` so that NaN
// inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod annealing;
pub mod cost;
pub mod entropic;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod oracle;
pub mod quadrature;
pub mod scalar;
pub mod sensitivity;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use annealing::{anneal, AnnealOptions, AnnealOutcome, EpsSchedule};
pub use cost::{
    asymptote_coefficient_1d, cost_gap_closed_form_1d, cost_gap_record, plan_convergence_check,
    w2_squared_1d, w2eps_squared, CostGapRecord,
};
pub use entropic::{
    c_eps_transform, kantorovich_eval, laguerre_index, legendre_transform, soft_assignment,
    EvalRequest, KantorovichDerivatives, Potential, SoftAssignment,
};
pub use measures::{
    discretize_source, random_points_1d, BuiltinDensity, DiscreteTarget, SourceDensity,
};
pub use oracle::{
    finite_diff_eps_grad, finite_diff_gradient, finite_diff_hessian_quadratic, sinkhorn_discrete,
    SinkhornResult,
};
pub use quadrature::{
    build_rule, refine_near_boundaries, refine_toward_points, BoxDomain, QuadratureRule,
    QuadratureSettings,
};
pub use sensitivity::{
    c_x_margin, check_strong_convexity, fit_linear, fit_rate, psi_dot, rough_constant_bound,
    ConvexityCheck, RateFit, RoughConstantBound,
};
pub use solver::{
    potential_sup_norm_bound, primal_plan_density, solve_dual, solve_unregularized_1d,
    DualSolution, NewtonSettings, SolveReport,
};

/// `f64` instantiations of the core types, one and two dimensional.
pub type Potential64 = Potential<f64>;
pub type SourceDensity1 = SourceDensity<f64, 1>;
pub type SourceDensity2 = SourceDensity<f64, 2>;
pub type DiscreteTarget1 = DiscreteTarget<f64, 1>;
pub type DiscreteTarget2 = DiscreteTarget<f64, 2>;
pub type QuadratureRule1 = QuadratureRule<f64, 1>;
pub type QuadratureRule2 = QuadratureRule<f64, 2>;
pub type DualSolution1 = DualSolution<f64, 1>;

/// `f32` instantiations (single-precision smoke coverage; the tight
/// tolerances in the test suite assume `f64`).
pub type Potential32 = Potential<f32>;
pub type SourceDensity1f32 = SourceDensity<f32, 1>;
pub type DiscreteTarget1f32 = DiscreteTarget<f32, 1>;
