//! Regularization scaling: solve a geometrically decreasing schedule of
//! regularizations, warm-starting each level from the previous potential.

use serde::{Deserialize, Serialize};

use crate::entropic::Potential;
use crate::error::{Error, Result};
use crate::measures::{DiscreteTarget, SourceDensity};
use crate::quadrature::QuadratureSettings;
use crate::scalar::Scalar;
use crate::solver::{solve_dual, NewtonSettings, SolveReport};

/// Geometric schedule eps_k = start * factor^k, truncated to the levels
/// above `eps_final` and then clamped so the last level is exactly
/// `eps_final`. If `start <= final` the schedule is the single level
/// `eps_final`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpsSchedule {
    pub eps_start: f64,
    pub factor: f64,
    pub eps_final: f64,
    levels: Vec<f64>,
}

impl EpsSchedule {
    pub fn new(eps_start: f64, factor: f64, eps_final: f64) -> Result<Self> {
        if !(eps_start > 0.0) || !(eps_final > 0.0) {
            return Err(Error::InvalidParameter(
                "schedule endpoints must be positive".into(),
            ));
        }
        if !(factor > 0.0 && factor < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "schedule factor must lie in (0, 1), got {factor}"
            )));
        }
        let mut levels = Vec::new();
        if eps_start <= eps_final {
            levels.push(eps_final);
        } else {
            let mut e = eps_start;
            while e > eps_final {
                levels.push(e);
                e *= factor;
            }
            levels.push(eps_final);
        }
        Ok(Self {
            eps_start,
            factor,
            eps_final,
            levels,
        })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }
}

/// Options for the annealing driver.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct AnnealOptions {
    /// When set, intermediate levels solve to the loosened tolerance
    /// `max(tol, factor * eps_k)`; the final level always uses the full
    /// tolerance. Off by default.
    pub level_tol_factor: Option<f64>,
}

/// One solved schedule level.
#[derive(Clone, Debug)]
pub struct AnnealLevel<S: Scalar> {
    pub eps: S,
    pub potential: Potential<S>,
    pub report: SolveReport,
    /// Sup-norm distance to the previous level's potential (zero at the
    /// first level).
    pub warm_start_gap: f64,
}

/// Results of an annealing chain; on failure the solved prefix is returned
/// together with the failing level index.
#[derive(Clone, Debug)]
pub struct AnnealOutcome<S: Scalar> {
    pub levels: Vec<AnnealLevel<S>>,
    pub failed_at: Option<usize>,
}

impl<S: Scalar> AnnealOutcome<S> {
    pub fn final_potential(&self) -> Option<&Potential<S>> {
        if self.failed_at.is_some() {
            return None;
        }
        self.levels.last().map(|l| &l.potential)
    }

    pub fn total_iterations(&self) -> usize {
        self.levels.iter().map(|l| l.report.iterations).sum()
    }
}

/// Runs the warm-started chain. Level zero starts from the zero potential;
/// every later level starts from the previous solution.
pub fn anneal<S: Scalar, const D: usize>(
    rho: &SourceDensity<S, D>,
    target: &DiscreteTarget<S, D>,
    schedule: &EpsSchedule,
    newton: &NewtonSettings,
    quad: &QuadratureSettings,
    options: &AnnealOptions,
) -> Result<AnnealOutcome<S>> {
    let mut levels = Vec::with_capacity(schedule.levels().len());
    let mut prev: Option<Potential<S>> = None;
    let mut failed_at = None;
    let last = schedule.levels().len() - 1;
    for (k, &eps_f64) in schedule.levels().iter().enumerate() {
        let eps = S::c(eps_f64);
        let mut settings = *newton;
        if let Some(factor) = options.level_tol_factor {
            if k != last {
                settings.tol = newton.tol.max(factor * eps_f64);
            }
        }
        let sol = solve_dual(rho, target, eps, prev.as_ref(), &settings, quad)?;
        let gap = match &prev {
            Some(p) => sol.potential.sup_distance(p)?.as_f64(),
            None => 0.0,
        };
        let converged = sol.report.converged;
        levels.push(AnnealLevel {
            eps,
            potential: sol.potential.clone(),
            report: sol.report,
            warm_start_gap: gap,
        });
        if !converged {
            failed_at = Some(k);
            break;
        }
        prev = Some(sol.potential);
    }
    Ok(AnnealOutcome { levels, failed_at })
}

/// Sup-norm distance between consecutive schedule potentials.
pub fn warm_start_gap<S: Scalar>(prev: &Potential<S>, next: &Potential<S>) -> Result<S> {
    prev.sup_distance(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{BuiltinDensity, DiscreteTarget, SourceDensity};
    use approx::assert_abs_diff_eq;

    #[test]
    fn schedule_levels_count_and_clamp() {
        let s = EpsSchedule::new(1.0, 0.5, 1e-3).unwrap();
        assert_eq!(s.levels().len(), 11);
        assert_eq!(s.levels()[0], 1.0);
        assert_eq!(*s.levels().last().unwrap(), 1e-3);
        for w in s.levels().windows(2) {
            assert!(w[1] < w[0]);
        }
        let single = EpsSchedule::new(1e-4, 0.5, 1e-3).unwrap();
        assert_eq!(single.levels(), &[1e-3]);
        assert!(EpsSchedule::new(1.0, 1.5, 0.1).is_err());
    }

    #[test]
    fn symmetric_chain_stays_at_zero() {
        let rho = SourceDensity::<f64, 1>::builtin(BuiltinDensity::Lebesgue, None).unwrap();
        let t = DiscreteTarget::new(vec![[-1.0f64], [1.0]], vec![0.5, 0.5]).unwrap();
        let schedule = EpsSchedule::new(1.0, 0.5, 0.01).unwrap();
        let out = anneal(
            &rho,
            &t,
            &schedule,
            &NewtonSettings::default(),
            &QuadratureSettings::default(),
            &AnnealOptions::default(),
        )
        .unwrap();
        assert!(out.failed_at.is_none());
        for (k, level) in out.levels.iter().enumerate() {
            assert!(level.potential.sup_norm() <= 1e-10);
            assert!(level.report.sup_norm_bound_ok());
            if k > 0 {
                // warm start is already optimal, so no Newton steps run
                assert!(level.report.iterations <= 1);
                assert_abs_diff_eq!(level.warm_start_gap, 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn failed_level_returns_prefix_and_index() {
        let rho = SourceDensity::<f64, 1>::builtin(BuiltinDensity::Laplace, None).unwrap();
        let t = DiscreteTarget::new(
            vec![[-0.7f64], [-0.1], [0.6]],
            vec![0.25, 0.45, 0.3],
        )
        .unwrap();
        // an iteration budget too small for the cold level forces a failure
        let starved = NewtonSettings {
            max_iterations: 1,
            ..NewtonSettings::default()
        };
        let schedule = EpsSchedule::new(0.5, 0.5, 0.05).unwrap();
        let out = anneal(
            &rho,
            &t,
            &schedule,
            &starved,
            &QuadratureSettings::default(),
            &AnnealOptions::default(),
        )
        .unwrap();
        assert_eq!(out.failed_at, Some(0));
        assert_eq!(out.levels.len(), 1);
        assert!(!out.levels[0].report.converged);
        assert!(out.final_potential().is_none());
    }

    #[test]
    fn annealed_final_matches_cold_start() {
        let rho = SourceDensity::<f64, 1>::builtin(BuiltinDensity::Laplace, None).unwrap();
        let t = DiscreteTarget::new(
            vec![[-0.7f64], [-0.1], [0.6]],
            vec![0.25, 0.45, 0.3],
        )
        .unwrap();
        let schedule = EpsSchedule::new(0.5, 0.5, 0.02).unwrap();
        let newton = NewtonSettings::default();
        let quad = QuadratureSettings::default();
        let out = anneal(&rho, &t, &schedule, &newton, &quad, &AnnealOptions::default()).unwrap();
        assert!(out.failed_at.is_none());
        let warm = out.final_potential().unwrap();
        let cold = crate::solver::solve_dual(&rho, &t, 0.02, None, &newton, &quad).unwrap();
        assert!(warm.sup_distance(&cold.potential).unwrap() <= 10.0 * newton.tol);
        // gap sequence has bounded partial sums along the geometric schedule
        let total: f64 = out.levels.iter().map(|l| l.warm_start_gap).sum();
        assert!(total.is_finite());
    }
}
