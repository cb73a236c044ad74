//! Cross-module invariants: curvature positivity, the large-regularization
//! bound on the mixed derivative, quadrature convergence checks, solver
//! monotonicity, and smoke coverage for the `f32` and two-dimensional
//! instantiations.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sdot_core::entropic::{kantorovich_eval, EvalRequest, Potential};
use sdot_core::measures::{BuiltinDensity, DiscreteTarget, SourceDensity};
use sdot_core::quadrature::{build_rule, expectation, BoxDomain, QuadratureSettings};
use sdot_core::sensitivity::check_strong_convexity;
use sdot_core::solver::{assemble_rule, solve_dual, NewtonSettings};

fn lebesgue() -> SourceDensity<f64, 1> {
    SourceDensity::builtin(BuiltinDensity::Lebesgue, None).unwrap()
}

fn target5() -> DiscreteTarget<f64, 1> {
    DiscreteTarget::new(
        vec![[-0.8f64], [-0.3], [0.1], [0.5], [0.9]],
        vec![0.15, 0.35, 0.2, 0.1, 0.2],
    )
    .unwrap()
}

#[test]
fn hessian_positive_semidefinite_random_directions() {
    let rho = lebesgue();
    let t = target5();
    let psi = Potential::new(vec![0.2, -0.1, 0.05, -0.2, 0.05], 0.1).unwrap();
    let rule = build_rule(*rho.domain(), 8, 16).unwrap();
    let d = kantorovich_eval(&rho, &t, &psi, 0.1, &rule, EvalRequest::with_hessian()).unwrap();
    let h = d.hessian.unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let v: Vec<f64> = (0..5).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        assert!(h.quadratic_form(&v) >= -1e-12);
    }
    assert!(h.row_sum_sup() <= 1e-10);
}

/// At solved potentials the scaled mixed derivative stays bounded as the
/// regularization grows: eps |d grad K / d eps| is at most
/// (2 R_X diam Y + eps log(1/mu_min)) / (4 eps), which tends to a constant.
#[test]
fn eps_gradient_bounded_for_large_regularization() {
    let rho = lebesgue();
    let t = target5();
    let r_x = rho.domain().radius();
    let diam_y = t.diameter();
    let log_inv_mu = (1.0 / t.min_weight()).ln();
    let mut warm: Option<Potential<f64>> = None;
    for eps in [1.0, 2.0, 4.0, 8.0, 16.0] {
        let sol = solve_dual(
            &rho,
            &t,
            eps,
            warm.as_ref(),
            &NewtonSettings::default(),
            &QuadratureSettings::default(),
        )
        .unwrap();
        assert!(sol.report.converged);
        let d = kantorovich_eval(
            &rho,
            &t,
            &sol.potential,
            eps,
            &sol.rule,
            EvalRequest::full(),
        )
        .unwrap();
        let sup = d
            .eps_grad
            .unwrap()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let bound = (2.0 * r_x * diam_y + eps * log_inv_mu) / (4.0 * eps * eps);
        assert!(
            sup <= bound * (1.0 + 1e-9),
            "eps {eps}: sup {sup} vs bound {bound}"
        );
        warm = Some(sol.potential);
    }
}

#[test]
fn richardson_panel_doubling_converged() {
    let rho = SourceDensity::builtin(BuiltinDensity::Gaussian { sigma: 1.0 }, None).unwrap();
    let t = target5();
    let psi = Potential::new(vec![0.1, -0.2, 0.3, -0.1, -0.1], 0.05).unwrap();
    for eps in [1e-2, 0.1, 1.0] {
        let mut vals = Vec::new();
        for panels in [16usize, 32] {
            let quad = QuadratureSettings {
                panels_per_axis: panels,
                ..QuadratureSettings::default()
            };
            let rule = assemble_rule(&rho, &t, &psi, eps, &quad).unwrap();
            let d =
                kantorovich_eval(&rho, &t, &psi, eps, &rule, EvalRequest::value_only()).unwrap();
            vals.push(d.value);
        }
        assert!(
            (vals[0] - vals[1]).abs() <= 1e-8,
            "eps {eps}: {} vs {}",
            vals[0],
            vals[1]
        );
    }
}

/// For regularizations at or above one half the panel-width cap exceeds
/// every base panel, so adaptive refinement leaves the rule untouched.
#[test]
fn refinement_is_noop_for_wide_layers() {
    let rho = lebesgue();
    let t = DiscreteTarget::new(vec![[-1.0f64], [1.0]], vec![0.5, 0.5]).unwrap();
    let psi = Potential::zeros(2, 0.5).unwrap();
    let quad = QuadratureSettings::default();
    let base = build_rule(*rho.domain(), quad.order, quad.panels_per_axis).unwrap();
    for eps in [0.5, 1.0, 4.0] {
        let refined =
            sdot_core::quadrature::refine_near_boundaries(&base, &psi, eps, &t, &quad).unwrap();
        assert_eq!(refined.panels(), base.panels(), "eps = {eps}");
    }
    // at small regularization the panels concentrate around the breakpoint
    let refined =
        sdot_core::quadrature::refine_near_boundaries(&base, &psi, 1e-3, &t, &quad).unwrap();
    assert!(refined.panel_count() > base.panel_count());
    let near_zero = refined
        .panels()
        .iter()
        .filter(|p| p.lo[0].abs() < 0.05 || p.hi[0].abs() < 0.05)
        .count();
    assert!(near_zero as f64 >= 0.5 * (refined.panel_count() - base.panel_count()) as f64 * 0.2);
}

#[test]
fn newton_objective_trace_monotone() {
    let rho = SourceDensity::builtin(BuiltinDensity::Laplace, None).unwrap();
    let t = target5();
    let sol = solve_dual(
        &rho,
        &t,
        5e-3,
        None,
        &NewtonSettings::default(),
        &QuadratureSettings::default(),
    )
    .unwrap();
    assert!(sol.report.converged);
    assert!(sol.report.iterations >= 3);
    let trace = &sol.report.objective_trace;
    let slack = 1e-13 * (1.0 + trace[0].abs());
    for w in trace.windows(2) {
        assert!(w[1] <= w[0] + slack, "objective increased: {w:?}");
    }
}

#[test]
fn single_precision_smoke() {
    let rho = SourceDensity::<f32, 1>::builtin(BuiltinDensity::Lebesgue, None).unwrap();
    let t = DiscreteTarget::<f32, 1>::new(vec![[-1.0f32], [1.0]], vec![0.5, 0.5]).unwrap();
    let newton = NewtonSettings {
        tol: 1e-4,
        ..NewtonSettings::default()
    };
    let quad = QuadratureSettings {
        grading_min_width: 1e-5,
        entropy_threshold: 1e-6,
        ..QuadratureSettings::default()
    };
    let sol = solve_dual(&rho, &t, 0.5f32, None, &newton, &quad).unwrap();
    assert!(sol.report.converged);
    assert!(sol.potential.sup_norm() <= 1e-4);

    let skew = DiscreteTarget::<f32, 1>::new(vec![[-1.0f32], [1.0]], vec![0.25, 0.75]).unwrap();
    let sol = solve_dual(&rho, &skew, 0.25f32, None, &newton, &quad).unwrap();
    assert!(sol.report.converged);
    // compare against the f64 solve of the same instance
    let rho64 = lebesgue();
    let skew64 = DiscreteTarget::new(vec![[-1.0f64], [1.0]], vec![0.25, 0.75]).unwrap();
    let sol64 = solve_dual(
        &rho64,
        &skew64,
        0.25,
        None,
        &NewtonSettings::default(),
        &QuadratureSettings::default(),
    )
    .unwrap();
    let diff = (sol.potential.values()[0] as f64 - sol64.potential.values()[0]).abs();
    assert!(diff <= 1e-3, "f32 vs f64 potentials differ by {diff}");
}

#[test]
fn two_dimensional_solve_and_derivative_check() {
    let domain = BoxDomain::new([-1.0, -1.0], [1.0, 1.0]).unwrap();
    let rho = SourceDensity::from_fn(
        domain,
        Arc::new(|_: &[f64; 2]| 0.25),
        0.25,
        0.25,
        1.0,
        0.0,
        vec![],
    )
    .unwrap();
    let t = DiscreteTarget::new(
        vec![[-0.5f64, -0.4], [0.6, 0.1], [0.0, 0.7]],
        vec![0.3, 0.4, 0.3],
    )
    .unwrap();
    let quad = QuadratureSettings {
        order: 6,
        panels_per_axis: 8,
        ..QuadratureSettings::default()
    };
    let sol = solve_dual(&rho, &t, 0.3, None, &NewtonSettings::default(), &quad).unwrap();
    assert!(sol.report.converged);
    assert!(sol.report.final_residual <= 1e-10);
    assert!(sol.report.sup_norm_bound_ok());

    // gradient against the finite-difference oracle
    let fd = sdot_core::oracle::finite_diff_gradient(
        &rho,
        &t,
        &sol.potential,
        0.3,
        &sol.rule,
        1e-5,
    )
    .unwrap();
    let d = kantorovich_eval(
        &rho,
        &t,
        &sol.potential,
        0.3,
        &sol.rule,
        EvalRequest::value_only(),
    )
    .unwrap();
    for (a, b) in d.gradient.iter().zip(&fd) {
        assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
    }

    // strong convexity inequality in two dimensions
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..20 {
        let v: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let chk = check_strong_convexity(&rho, &t, &sol.potential, 0.3, &v, &sol.rule).unwrap();
        assert!(chk.holds, "{chk:?}");
    }

    // the normalized expectation of 1 over the box is 1
    let one = expectation(&sol.rule, &rho, |_| 1.0).unwrap();
    assert!((one - 1.0).abs() <= 1e-12);
}
