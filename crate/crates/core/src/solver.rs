//! Dual solvers: damped Newton for the regularized problem on the zero-sum
//! subspace, and the exact quantile construction for the unregularized
//! one-dimensional problem.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::entropic::{
    kantorovich_eval, laguerre_index, soft_assignment, EvalRequest, Potential, SoftAssignment,
};
use crate::error::{Error, Result};
use crate::linalg::{expand_zero_sum, reduce_zero_sum};
use crate::measures::{DiscreteTarget, SourceDensity};
use crate::quadrature::{
    build_rule, refine_near_boundaries, refine_toward_points, QuadratureRule, QuadratureSettings,
};
use crate::scalar::Scalar;

/// Damped-Newton settings. The tolerance is an absolute sup-norm bound on
/// the first-order residual |grad K + mu|.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NewtonSettings {
    pub tol: f64,
    pub max_iterations: usize,
    pub armijo_constant: f64,
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
    /// Rounds of quadrature-rule rebuilding around the current iterate.
    pub max_rule_rounds: usize,
    /// Relative Tikhonov shift used once if the reduced Hessian fails to
    /// factor.
    pub tikhonov_scale: f64,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iterations: 100,
            armijo_constant: 1e-4,
            backtrack_factor: 0.5,
            max_backtracks: 60,
            max_rule_rounds: 3,
            tikhonov_scale: 1e-12,
        }
    }
}

/// Solver diagnostics. Wall time is kept out of serialized reports so that
/// identical runs produce identical bytes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_residual: f64,
    pub objective: f64,
    pub line_search_backtracks: usize,
    #[serde(skip)]
    pub wall_time_seconds: f64,
    /// Dual objective after each accepted iterate (monotone within float
    /// resolution). Excluded from serialized reports.
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
    pub warm_started: bool,
    pub converged: bool,
    pub quadrature_nodes: usize,
    pub depth_warning: bool,
    /// Sup norm of the returned potential and the a-priori bound
    /// R_X diam(Y) + eps log(1/min mu) it must satisfy.
    pub potential_sup_norm: f64,
    pub sup_norm_bound: f64,
}

impl SolveReport {
    pub fn sup_norm_bound_ok(&self) -> bool {
        self.potential_sup_norm <= self.sup_norm_bound * (1.0 + 1e-12) + 1e-12
    }
}

/// A solved dual problem: the potential, diagnostics, and the quadrature
/// rule the solve converged on (reusable for derived quantities).
#[derive(Clone, Debug)]
pub struct DualSolution<S: Scalar, const D: usize> {
    pub potential: Potential<S>,
    pub report: SolveReport,
    pub rule: QuadratureRule<S, D>,
}

/// A-priori sup-norm bound on solved potentials.
pub fn potential_sup_norm_bound<S: Scalar, const D: usize>(
    rho: &SourceDensity<S, D>,
    target: &DiscreteTarget<S, D>,
    eps: S,
) -> S {
    let r_x = rho.domain().radius();
    let diam_y = target.diameter();
    let log_inv_mu = (target.min_weight().recip()).ln();
    r_x * diam_y + eps * log_inv_mu
}

/// Builds the solve rule for the current iterate: uniform panels, graded
/// toward density kinks, then split around soft-assignment layers.
pub fn assemble_rule<S: Scalar, const D: usize>(
    rho: &SourceDensity<S, D>,
    target: &DiscreteTarget<S, D>,
    psi: &Potential<S>,
    eps: S,
    settings: &QuadratureSettings,
) -> Result<QuadratureRule<S, D>> {
    let base = build_rule(*rho.domain(), settings.order, settings.panels_per_axis)?;
    let graded = refine_toward_points(
        &base,
        rho.singular_points(),
        S::c(settings.grading_min_width),
    );
    refine_near_boundaries(&graded, psi, eps, target, settings)
}

fn dual_objective<S: Scalar>(value: S, psi: &Potential<S>, target_weights: &[S]) -> S {
    let inner: S = psi
        .values()
        .iter()
        .zip(target_weights)
        .map(|(p, w)| *p * *w)
        .sum();
    value + inner
}

/// Solves the regularized dual problem by damped Newton restricted to the
/// zero-sum subspace. Non-convergence is reported in the `SolveReport`
/// (best iterate returned, `converged = false`), not as an error.
pub fn solve_dual<S: Scalar, const D: usize>(
    rho: &SourceDensity<S, D>,
    target: &DiscreteTarget<S, D>,
    eps: S,
    init: Option<&Potential<S>>,
    newton: &NewtonSettings,
    quad: &QuadratureSettings,
) -> Result<DualSolution<S, D>> {
    if !(eps > S::zero()) || !eps.is_finite() {
        return Err(Error::NonPositiveEpsilon(eps.as_f64()));
    }
    let n = target.len();
    let start = Instant::now();
    let warm_started = init.is_some();
    let mut psi = match init {
        Some(p) => {
            if p.len() != n {
                return Err(Error::DimensionMismatch(
                    "warm start has wrong length".into(),
                ));
            }
            p.retagged(eps)?
        }
        None => Potential::zeros(n, eps)?,
    };
    let mu = target.weights();
    let tol = S::c(newton.tol);

    let mut iterations = 0usize;
    let mut backtracks_total = 0usize;
    let mut final_residual = S::infinity();
    let mut objective = S::nan();
    let mut objective_trace: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut rule = assemble_rule(rho, target, &psi, eps, quad)?;

    'rounds: for _round in 0..newton.max_rule_rounds.max(1) {
        loop {
            let d = kantorovich_eval(rho, target, &psi, eps, &rule, EvalRequest::with_hessian())?;
            let residual: Vec<S> = d
                .gradient
                .iter()
                .zip(mu)
                .map(|(g, m)| *g + *m)
                .collect();
            let res_sup = residual.iter().fold(S::zero(), |m, v| m.max(v.abs()));
            final_residual = res_sup;
            objective = dual_objective(d.value, &psi, mu);
            if res_sup <= tol {
                converged = true;
                break;
            }
            if iterations == newton.max_iterations {
                break 'rounds;
            }
            if n == 1 {
                // single target point: the zero potential is optimal
                converged = res_sup <= tol;
                break 'rounds;
            }
            let hess = d.hessian.as_ref().expect("hessian requested");
            let reduced = hess.reduce_to_zero_sum();
            let rhs: Vec<S> = reduce_zero_sum(&residual).iter().map(|v| -*v).collect();
            let step_reduced =
                reduced.solve_spd_regularized(&rhs, S::c(newton.tikhonov_scale))?;
            let step = expand_zero_sum(&step_reduced);
            let slope: S = residual.iter().zip(&step).map(|(r, p)| *r * *p).sum();
            if !(slope < S::zero()) {
                return Err(Error::SolverFailure(format!(
                    "Newton direction is not a descent direction (slope {slope})"
                )));
            }
            let mut alpha = S::one();
            let mut accepted = false;
            for _bt in 0..newton.max_backtracks {
                let cand_values: Vec<S> = psi
                    .values()
                    .iter()
                    .zip(&step)
                    .map(|(p, s)| *p + alpha * *s)
                    .collect();
                let cand = Potential::new(cand_values, eps)?;
                let dv =
                    kantorovich_eval(rho, target, &cand, eps, &rule, EvalRequest::value_only())?;
                let f_cand = dual_objective(dv.value, &cand, mu);
                // the slack admits true Newton steps whose descent is below
                // float resolution of the objective near the optimum
                let slack = S::c(4.0) * S::epsilon() * (S::one() + objective.abs());
                if f_cand <= objective + S::c(newton.armijo_constant) * alpha * slope + slack {
                    psi = cand;
                    accepted = true;
                    iterations += 1;
                    objective_trace.push(f_cand.as_f64());
                    break;
                }
                alpha = alpha * S::c(newton.backtrack_factor);
                backtracks_total += 1;
            }
            if !accepted {
                // stalled line search: stop with the best iterate
                break 'rounds;
            }
        }
        let rebuilt = assemble_rule(rho, target, &psi, eps, quad)?;
        if rebuilt.panels() == rule.panels() {
            break;
        }
        rule = rebuilt;
        converged = false;
    }

    if !converged {
        // exits through stalls, iteration caps, or an exhausted rule budget
        // leave stale diagnostics; refresh them on the rule being returned
        let d = kantorovich_eval(rho, target, &psi, eps, &rule, EvalRequest::value_only())?;
        let res_sup = d
            .gradient
            .iter()
            .zip(mu)
            .fold(S::zero(), |m, (g, w)| m.max((*g + *w).abs()));
        final_residual = res_sup;
        objective = dual_objective(d.value, &psi, mu);
        converged = res_sup <= tol;
    }

    let bound = potential_sup_norm_bound(rho, target, eps);
    let report = SolveReport {
        iterations,
        final_residual: final_residual.as_f64(),
        objective: objective.as_f64(),
        line_search_backtracks: backtracks_total,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        objective_trace,
        warm_started,
        converged,
        quadrature_nodes: rule.node_count(),
        depth_warning: rule.depth_warning,
        potential_sup_norm: psi.sup_norm().as_f64(),
        sup_norm_bound: bound.as_f64(),
    };
    Ok(DualSolution {
        potential: psi,
        report,
        rule,
    })
}

/// Exact unregularized 1D solve: breakpoints at the weight quantiles,
/// potential reconstructed by telescoping and recentered.
///
/// The i-th Laguerre interval [b_{i-1}, b_i] then carries source mass
/// exactly mu_i.
pub fn solve_unregularized_1d<S: Scalar>(
    rho: &SourceDensity<S, 1>,
    target: &DiscreteTarget<S, 1>,
) -> Result<Potential<S>> {
    if !target.is_sorted_strict() {
        return Err(Error::InvalidParameter(
            "target points must be strictly increasing".into(),
        ));
    }
    let n = target.len();
    let mut values = vec![S::zero(); n];
    let mut cum = S::zero();
    for i in 0..n.saturating_sub(1) {
        cum = cum + target.weights()[i];
        let b = rho.quantile(cum)?;
        let dy = target.points()[i + 1][0] - target.points()[i][0];
        values[i + 1] = values[i] + b * dy;
    }
    Potential::new(values, S::zero())
}

/// 1D Laguerre cell boundaries of a potential with sorted targets:
/// [b_0 = lo, b_1, ..., b_{N-1}, b_N = hi].
pub fn laguerre_breakpoints_1d<S: Scalar>(
    rho: &SourceDensity<S, 1>,
    target: &DiscreteTarget<S, 1>,
    psi: &Potential<S>,
) -> Result<Vec<S>> {
    if !target.is_sorted_strict() {
        return Err(Error::InvalidParameter(
            "target points must be strictly increasing".into(),
        ));
    }
    let lo = rho.domain().lo[0];
    let hi = rho.domain().hi[0];
    let n = target.len();
    let mut b = Vec::with_capacity(n + 1);
    b.push(lo);
    for i in 0..n - 1 {
        let dy = target.points()[i + 1][0] - target.points()[i][0];
        let bi = (psi.values()[i + 1] - psi.values()[i]) / dy;
        b.push(bi.max(lo).min(hi));
    }
    b.push(hi);
    // enforce monotonicity (empty cells clamp to their neighbor)
    for i in 1..b.len() {
        if b[i] < b[i - 1] {
            b[i] = b[i - 1];
        }
    }
    Ok(b)
}

/// Conditional plan at a point: softmax for positive regularization, the
/// cell indicator at zero (ties split uniformly).
pub fn primal_plan_density<S: Scalar, const D: usize>(
    target: &DiscreteTarget<S, D>,
    psi: &Potential<S>,
    eps: S,
    x: &[S; D],
) -> Result<SoftAssignment<S, D>> {
    if eps > S::zero() {
        return soft_assignment(target, psi, x, eps);
    }
    let idx = laguerre_index(target, psi, x)?;
    let mut probs = vec![S::zero(); target.len()];
    let share = S::from_usize(idx.len()).unwrap().recip();
    for i in idx {
        probs[i] = share;
    }
    Ok(SoftAssignment {
        probs,
        at_point: *x,
    })
}
