//! Subcommand implementations. Every command reads one config, runs the
//! experiment, and writes its artifacts into the output directory; reruns
//! with the same config and seed produce byte-identical files.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use sdot_core::annealing::{anneal, AnnealOptions};
use sdot_core::cost::cost_gap_record;
use sdot_core::entropic::{kantorovich_eval, EvalRequest, Potential};
use sdot_core::measures::discretize_source;
use sdot_core::oracle::{
    finite_diff_eps_grad, finite_diff_gradient, finite_diff_hessian_quadratic, sinkhorn_discrete,
};
use sdot_core::quadrature::build_rule;
use sdot_core::sensitivity::{check_strong_convexity, fit_rate, psi_dot, RateFit};
use sdot_core::solver::{solve_dual, solve_unregularized_1d, DualSolution};

use crate::config::{Density, ExperimentConfig, Quantity, Target};
use crate::output::{content_hash, sweep_csv, write_atomic, write_json};
use crate::CliError;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct RunContext {
    pub config: ExperimentConfig,
    pub config_bytes: Vec<u8>,
    pub seed_override: Option<u64>,
    pub out_dir: PathBuf,
}

impl RunContext {
    pub fn load(config_path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<Self, CliError> {
        let config_bytes = std::fs::read(config_path)
            .map_err(|e| CliError::Config(format!("cannot read {config_path:?}: {e}")))?;
        let text = String::from_utf8(config_bytes.clone())
            .map_err(|e| CliError::Config(format!("config is not UTF-8: {e}")))?;
        let config = ExperimentConfig::parse(&text)?;
        Ok(Self {
            config,
            config_bytes,
            seed_override: seed,
            out_dir: out_dir.to_path_buf(),
        })
    }

    fn instance(&self) -> Result<(Density, Target), CliError> {
        let rho = self.config.build_density()?;
        let target = self.config.build_target(&rho, self.seed_override)?;
        Ok((rho, target))
    }

    fn hash(&self) -> String {
        content_hash(&self.config_bytes, self.seed_override)
    }

    fn report<T: Serialize>(&self, command: &str, results: &T) -> serde_json::Value {
        json!({
            "command": command,
            "content_hash": self.hash(),
            "config": self.config,
            "results": results,
        })
    }

    fn solve_once(
        &self,
        rho: &Density,
        target: &Target,
        eps: f64,
        init: Option<&Potential<f64>>,
    ) -> Result<DualSolution<f64, 1>, CliError> {
        let sol = solve_dual(
            rho,
            target,
            eps,
            init,
            &self.config.newton_settings(),
            &self.config.quadrature_settings(),
        )?;
        if !sol.report.converged {
            return Err(CliError::Numerical(format!(
                "solve at eps {eps} did not converge (residual {})",
                sol.report.final_residual
            )));
        }
        Ok(sol)
    }
}

fn potential_json(psi: &Potential<f64>) -> serde_json::Value {
    json!({ "epsilon": psi.epsilon(), "values": psi.values() })
}

pub fn cmd_solve(ctx: &RunContext) -> Result<(), CliError> {
    let (rho, target) = ctx.instance()?;
    let (psi, results) = match (&ctx.config.solve, &ctx.config.schedule) {
        (Some(s), _) => {
            let sol = ctx.solve_once(&rho, &target, s.eps, None)?;
            let results = json!({ "epsilon": s.eps, "report": sol.report });
            (sol.potential, results)
        }
        (None, Some(_)) => {
            let (schedule, ladder) = ctx.config.schedule()?;
            let options = AnnealOptions {
                level_tol_factor: ladder,
            };
            let out = anneal(
                &rho,
                &target,
                &schedule,
                &ctx.config.newton_settings(),
                &ctx.config.quadrature_settings(),
                &options,
            )?;
            if let Some(k) = out.failed_at {
                return Err(CliError::Numerical(format!(
                    "annealing failed at level {k} (eps {})",
                    out.levels[k].eps
                )));
            }
            let last = out.levels.last().expect("nonempty schedule");
            let results = json!({
                "epsilon": last.eps,
                "report": last.report,
                "total_iterations": out.total_iterations(),
            });
            (last.potential.clone(), results)
        }
        (None, None) => {
            return Err(CliError::Config(
                "solve needs [solve].eps or a [schedule]".into(),
            ))
        }
    };
    write_json(&ctx.out_dir.join("report.json"), &ctx.report("solve", &results))?;
    write_json(&ctx.out_dir.join("potential.json"), &potential_json(&psi))?;
    Ok(())
}

/// Computes the requested sweep quantity over a descending grid with
/// warm-started solves.
fn sweep_values(
    ctx: &RunContext,
    rho: &Density,
    target: &Target,
    quantity: Quantity,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>, CliError> {
    if let Some(p) = ctx.config.test_hooks.planted_power {
        return Ok(grid.iter().map(|e| (*e, e.powf(p))).collect());
    }
    let newton = ctx.config.newton_settings();
    let quad = ctx.config.quadrature_settings();
    let mut rows = Vec::with_capacity(grid.len());
    match quantity {
        Quantity::PsiDotNorm => {
            let mut warm: Option<Potential<f64>> = None;
            for &eps in grid {
                let sol = ctx.solve_once(rho, target, eps, warm.as_ref())?;
                let dot = psi_dot(rho, target, &sol.potential, eps, &sol.rule)?;
                rows.push((eps, dot.iter().fold(0.0f64, |m, v| m.max(v.abs()))));
                warm = Some(sol.potential);
            }
        }
        Quantity::PsiGapToZeroEps => {
            let psi0 = solve_unregularized_1d(rho, target)?;
            let mut warm: Option<Potential<f64>> = None;
            for &eps in grid {
                let sol = ctx.solve_once(rho, target, eps, warm.as_ref())?;
                rows.push((eps, sol.potential.sup_distance(&psi0)?));
                warm = Some(sol.potential);
            }
        }
        Quantity::CostGapResidual => {
            let mut warm: Option<Potential<f64>> = None;
            for &eps in grid {
                let (rec, sol) = cost_gap_record(rho, target, eps, warm.as_ref(), &newton, &quad)?;
                rows.push((eps, rec.residual));
                warm = Some(sol.potential);
            }
        }
    }
    Ok(rows)
}

pub fn cmd_sweep(ctx: &RunContext, quantity: Quantity) -> Result<(), CliError> {
    let (rho, target) = ctx.instance()?;
    let grid = ctx.config.grid_points()?;
    let rows = sweep_values(ctx, &rho, &target, quantity, &grid)?;
    let csv = sweep_csv(&rows);
    let csv_name = format!("sweep_{}.csv", quantity.name());
    write_atomic(&ctx.out_dir.join(&csv_name), csv.as_bytes())?;
    let results = json!({
        "quantity": quantity.name(),
        "rows": rows.len(),
        "csv": csv_name,
    });
    write_json(
        &ctx.out_dir.join(format!("sweep_{}.json", quantity.name())),
        &ctx.report("sweep", &results),
    )?;
    Ok(())
}

pub fn cmd_rate(ctx: &RunContext, quantity: Quantity) -> Result<(), CliError> {
    let (rho, target) = ctx.instance()?;
    let grid = ctx.config.grid_points()?;
    let rows = sweep_values(ctx, &rho, &target, quantity, &grid)?;
    let csv = sweep_csv(&rows);
    let csv_path = ctx.out_dir.join(format!("sweep_{}.csv", quantity.name()));
    write_atomic(&csv_path, csv.as_bytes())?;
    // fit from the emitted file: the 17-digit format round-trips exactly
    let text = std::fs::read_to_string(&csv_path)
        .map_err(|e| CliError::Config(format!("cannot reread {csv_path:?}: {e}")))?;
    let rows = crate::output::read_sweep_csv(&text)?;
    let eps: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let vals: Vec<f64> = rows.iter().map(|r| r.1.max(1e-300)).collect();
    let fit: RateFit = fit_rate(&eps, &vals)?;
    let results = json!({ "quantity": quantity.name(), "fit": fit });
    write_json(
        &ctx.out_dir.join(format!("rate_{}.json", quantity.name())),
        &ctx.report("rate", &results),
    )?;
    Ok(())
}

#[derive(Serialize)]
struct CheckResult {
    name: &'static str,
    pass: bool,
    lhs: f64,
    rhs: f64,
}

pub fn cmd_check(ctx: &RunContext) -> Result<(), CliError> {
    let (rho, target) = ctx.instance()?;
    let eps = ctx.config.check.eps;
    let newton = ctx.config.newton_settings();
    let sol = ctx.solve_once(&rho, &target, eps, None)?;
    let mut psi = sol.potential.clone();
    if let Some(c) = ctx.config.test_hooks.corrupt_potential {
        let mut values = psi.values().to_vec();
        values[0] += c;
        psi = Potential::new(values, eps)?;
    }
    let rule = &sol.rule;
    let n = target.len();
    let mut checks: Vec<CheckResult> = Vec::new();

    // gauge
    checks.push(CheckResult {
        name: "gauge_zero_sum",
        pass: psi.gauge_defect() <= 1e-12 * n as f64,
        lhs: psi.gauge_defect(),
        rhs: 1e-12 * n as f64,
    });

    // first-order condition / marginal condition
    let d = kantorovich_eval(&rho, &target, &psi, eps, rule, EvalRequest::full())?;
    let residual = d
        .gradient
        .iter()
        .zip(target.weights())
        .fold(0.0f64, |m, (g, w)| m.max((g + w).abs()));
    checks.push(CheckResult {
        name: "first_order_condition",
        pass: residual <= newton.tol,
        lhs: residual,
        rhs: newton.tol,
    });
    checks.push(CheckResult {
        name: "plan_marginal_matches_target",
        pass: residual <= newton.tol,
        lhs: residual,
        rhs: newton.tol,
    });

    // finite-difference oracles
    let h = 1e-6f64.max(1e-4 * psi.sup_norm());
    let fd = finite_diff_gradient(&rho, &target, &psi, eps, rule, h)?;
    let gscale = d.gradient.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let grad_err = d
        .gradient
        .iter()
        .zip(&fd)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs() / gscale));
    checks.push(CheckResult {
        name: "finite_diff_gradient",
        pass: grad_err <= 1e-5,
        lhs: grad_err,
        rhs: 1e-5,
    });

    let hess = d.hessian.as_ref().expect("requested");
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut hess_err = 0.0f64;
    for _ in 0..3 {
        let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let exact = hess.quadratic_form(&v);
        let approx = finite_diff_hessian_quadratic(&rho, &target, &psi, eps, rule, &v, 2e-5)?;
        hess_err = hess_err.max((exact - approx).abs() / exact.abs().max(1e-9));
    }
    checks.push(CheckResult {
        name: "finite_diff_hessian_form",
        pass: hess_err <= 1e-4,
        lhs: hess_err,
        rhs: 1e-4,
    });

    let eg = d.eps_grad.as_ref().expect("requested");
    let fd = finite_diff_eps_grad(&rho, &target, &psi, eps, rule, 1e-3 * eps)?;
    let escale = eg.iter().fold(1e-12f64, |m, v| m.max(v.abs()));
    let eps_err = eg
        .iter()
        .zip(&fd)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs() / escale));
    checks.push(CheckResult {
        name: "finite_diff_eps_gradient",
        pass: eps_err <= 1e-4,
        lhs: eps_err,
        rhs: 1e-4,
    });

    // strong convexity on random directions (worst margin reported)
    let mut worst = (0.0f64, f64::INFINITY);
    let mut all_hold = true;
    for _ in 0..ctx.config.check.random_directions {
        let v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let chk = check_strong_convexity(&rho, &target, &psi, eps, &v, rule)?;
        all_hold &= chk.holds;
        if chk.rhs - chk.lhs < worst.1 - worst.0 {
            worst = (chk.lhs, chk.rhs);
        }
    }
    checks.push(CheckResult {
        name: "strong_convexity",
        pass: all_hold,
        lhs: worst.0,
        rhs: worst.1,
    });

    // a-priori sup-norm bound
    checks.push(CheckResult {
        name: "potential_sup_norm_bound",
        pass: sol.report.sup_norm_bound_ok(),
        lhs: sol.report.potential_sup_norm,
        rhs: sol.report.sup_norm_bound,
    });

    // Sinkhorn oracle agreement on a discretized source
    let atom_rule = build_rule(*rho.domain(), 1, ctx.config.check.sinkhorn_atoms)?;
    let atoms = discretize_source(&rho, &atom_rule)?;
    let sk = sinkhorn_discrete(&atoms, &target, eps, 1e-12, 200_000)?;
    let sk_gap = sk.target_potential.sup_distance(&psi)?;
    checks.push(CheckResult {
        name: "sinkhorn_agreement",
        pass: sk_gap <= 5e-4,
        lhs: sk_gap,
        rhs: 5e-4,
    });

    let all_passed = checks.iter().all(|c| c.pass);
    let results = json!({
        "epsilon": eps,
        "checks": checks,
        "all_passed": all_passed,
    });
    write_json(&ctx.out_dir.join("check.json"), &ctx.report("check", &results))?;
    if !all_passed {
        let failing: Vec<&str> = checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name)
            .collect();
        return Err(CliError::Numerical(format!(
            "checks failed: {}",
            failing.join(", ")
        )));
    }
    Ok(())
}

pub fn cmd_anneal(ctx: &RunContext) -> Result<(), CliError> {
    let (rho, target) = ctx.instance()?;
    let (schedule, ladder) = ctx.config.schedule()?;
    let options = AnnealOptions {
        level_tol_factor: ladder,
    };
    let out = anneal(
        &rho,
        &target,
        &schedule,
        &ctx.config.newton_settings(),
        &ctx.config.quadrature_settings(),
        &options,
    )?;
    let levels: Vec<serde_json::Value> = out
        .levels
        .iter()
        .map(|l| {
            json!({
                "epsilon": l.eps,
                "iterations": l.report.iterations,
                "residual": l.report.final_residual,
                "warm_start_gap": l.warm_start_gap,
                "sup_norm": l.report.potential_sup_norm,
                "sup_norm_bound_ok": l.report.sup_norm_bound_ok(),
            })
        })
        .collect();
    let results = json!({
        "levels": levels,
        "total_iterations": out.total_iterations(),
        "failed_at": out.failed_at,
    });
    write_json(&ctx.out_dir.join("anneal.json"), &ctx.report("anneal", &results))?;
    if let Some(k) = out.failed_at {
        return Err(CliError::Numerical(format!(
            "annealing failed at level {k}"
        )));
    }
    let last = out.levels.last().expect("nonempty schedule");
    write_json(
        &ctx.out_dir.join("potential.json"),
        &potential_json(&last.potential),
    )?;
    Ok(())
}
