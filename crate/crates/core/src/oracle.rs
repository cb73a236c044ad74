//! Independent verification paths: central finite differences for every
//! analytic derivative, and a log-domain Sinkhorn solver on a discretized
//! source whose potentials must agree with the continuous Newton solve.

use crate::entropic::{kantorovich_eval_values, EvalRequest, Potential};
use crate::error::{Error, Result};
use crate::measures::{DiscreteTarget, SourceDensity};
use crate::quadrature::QuadratureRule;
use crate::scalar::{dot, Scalar};

/// Central finite differences of the functional value per coordinate.
/// Perturbations live in R^N; no gauge recentering is applied.
pub fn finite_diff_gradient<S: Scalar, const D: usize>(
    rho: &SourceDensity<S, D>,
    target: &DiscreteTarget<S, D>,
    psi: &Potential<S>,
    eps: S,
    rule: &QuadratureRule<S, D>,
    h: S,
) -> Result<Vec<S>> {
    if !(h > S::zero()) {
        return Err(Error::InvalidParameter("step must be positive".into()));
    }
    let n = psi.len();
    let mut out = Vec::with_capacity(n);
    let mut values = psi.values().to_vec();
    for i in 0..n {
        let orig = values[i];
        values[i] = orig + h;
        let plus =
            kantorovich_eval_values(rho, target, &values, eps, rule, EvalRequest::value_only())?
                .value;
        values[i] = orig - h;
        let minus =
            kantorovich_eval_values(rho, target, &values, eps, rule, EvalRequest::value_only())?
                .value;
        values[i] = orig;
        out.push((plus - minus) / (S::c(2.0) * h));
    }
    Ok(out)
}

/// Second central difference of the value along `v`, an approximation of
/// the Hessian quadratic form <v, H v>.
pub fn finite_diff_hessian_quadratic<S: Scalar, const D: usize>(
    rho: &SourceDensity<S, D>,
    target: &DiscreteTarget<S, D>,
    psi: &Potential<S>,
    eps: S,
    rule: &QuadratureRule<S, D>,
    v: &[S],
    h: S,
) -> Result<S> {
    if !(h > S::zero()) {
        return Err(Error::InvalidParameter("step must be positive".into()));
    }
    if v.len() != psi.len() {
        return Err(Error::DimensionMismatch("direction length".into()));
    }
    let eval = |values: &[S]| -> Result<S> {
        Ok(
            kantorovich_eval_values(rho, target, values, eps, rule, EvalRequest::value_only())?
                .value,
        )
    };
    let base: Vec<S> = psi.values().to_vec();
    let plus: Vec<S> = base.iter().zip(v).map(|(p, d)| *p + h * *d).collect();
    let minus: Vec<S> = base.iter().zip(v).map(|(p, d)| *p - h * *d).collect();
    let f0 = eval(&base)?;
    let fp = eval(&plus)?;
    let fm = eval(&minus)?;
    Ok((fp - S::c(2.0) * f0 + fm) / (h * h))
}

/// Central difference in the regularization at fixed psi:
/// (grad K(eps + h) - grad K(eps - h)) / (2 h). Requires h < eps / 2.
pub fn finite_diff_eps_grad<S: Scalar, const D: usize>(
    rho: &SourceDensity<S, D>,
    target: &DiscreteTarget<S, D>,
    psi: &Potential<S>,
    eps: S,
    rule: &QuadratureRule<S, D>,
    h: S,
) -> Result<Vec<S>> {
    if !(h > S::zero() && h < eps * S::c(0.5)) {
        return Err(Error::InvalidParameter(format!(
            "eps-derivative step must satisfy 0 < h < eps/2, got h = {h}, eps = {eps}"
        )));
    }
    let plus = kantorovich_eval_values(
        rho,
        target,
        psi.values(),
        eps + h,
        rule,
        EvalRequest::value_only(),
    )?
    .gradient;
    let minus = kantorovich_eval_values(
        rho,
        target,
        psi.values(),
        eps - h,
        rule,
        EvalRequest::value_only(),
    )?
    .gradient;
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| (*p - *m) / (S::c(2.0) * h))
        .collect())
}

/// Output of the discrete Sinkhorn oracle.
#[derive(Clone, Debug)]
pub struct SinkhornResult<S: Scalar> {
    /// Potential on the source atoms (the smoothed-max transform of the
    /// target potential at each atom).
    pub source_potential: Vec<S>,
    /// Target potential, gauge-fixed to zero sum and comparable with the
    /// Newton solver output.
    pub target_potential: Potential<S>,
    pub iterations: usize,
    /// Final sup-norm violation of the target marginal.
    pub marginal_violation: f64,
    /// Dual objective after each iteration (non-increasing).
    pub objective_trace: Vec<f64>,
}

/// Log-domain Sinkhorn on the correlation kernel exp(<x, y>/eps) between a
/// weighted atom cloud and the discrete target. Alternates exact dual
/// maximizations until the target-marginal violation is at most `tol`.
pub fn sinkhorn_discrete<S: Scalar, const D: usize>(
    atoms: &[([S; D], S)],
    target: &DiscreteTarget<S, D>,
    eps: S,
    tol: f64,
    max_iter: usize,
) -> Result<SinkhornResult<S>> {
    if !(eps > S::zero()) {
        return Err(Error::NonPositiveEpsilon(eps.as_f64()));
    }
    if atoms.is_empty() {
        return Err(Error::InvalidParameter("no source atoms".into()));
    }
    if atoms.iter().any(|(_, a)| !(*a > S::zero())) {
        return Err(Error::InvalidParameter(
            "atom weights must be positive".into(),
        ));
    }
    let m = atoms.len();
    let n = target.len();
    let log_a: Vec<S> = atoms.iter().map(|(_, a)| a.ln()).collect();
    let log_mu: Vec<S> = target.weights().iter().map(|w| w.ln()).collect();
    // gains g[k][i] = <x_k, y_i>
    let gains: Vec<Vec<S>> = atoms
        .iter()
        .map(|(x, _)| target.points().iter().map(|y| dot(x, y)).collect())
        .collect();

    let mut f = vec![S::zero(); m];
    let mut g = vec![S::zero(); n];
    let mut trace = Vec::new();
    let mut violation = f64::INFINITY;
    let mut iterations = 0usize;

    let lse = |terms: &mut dyn Iterator<Item = S>| -> S {
        let collected: Vec<S> = terms.collect();
        let mx = collected.iter().fold(S::neg_infinity(), |a, b| a.max(*b));
        let mut z = S::zero();
        for t in &collected {
            z = z + (*t - mx).exp();
        }
        mx + z.ln()
    };

    for it in 0..max_iter {
        iterations = it + 1;
        // f-update: smoothed-max transform of g at each atom
        for k in 0..m {
            let mut terms = (0..n).map(|i| (gains[k][i] - g[i]) / eps);
            f[k] = eps * lse(&mut terms);
        }
        // g-update: matches the target marginal exactly in exact arithmetic
        for i in 0..n {
            let mut terms = (0..m).map(|k| log_a[k] + (gains[k][i] - f[k]) / eps);
            g[i] = eps * lse(&mut terms) - eps * log_mu[i];
        }
        // dual objective (after an f-refresh the plan mass is exactly 1)
        let mut f2 = vec![S::zero(); m];
        for k in 0..m {
            let mut terms = (0..n).map(|i| (gains[k][i] - g[i]) / eps);
            f2[k] = eps * lse(&mut terms);
        }
        let mut obj = eps;
        for k in 0..m {
            obj = obj + atoms[k].1 * f2[k];
        }
        for i in 0..n {
            obj = obj + target.weights()[i] * g[i];
        }
        trace.push(obj.as_f64());
        // target-marginal violation of the plan built from (f2, g)
        let mut sup = S::zero();
        for i in 0..n {
            let mut col = S::zero();
            for k in 0..m {
                col = col + (log_a[k] + (gains[k][i] - f2[k] - g[i]) / eps).exp();
            }
            sup = sup.max((col - target.weights()[i]).abs());
        }
        violation = sup.as_f64();
        if violation <= tol {
            f = f2;
            break;
        }
        f = f2;
        if it + 1 == max_iter {
            return Err(Error::SolverFailure(format!(
                "sinkhorn did not reach tol {tol} in {max_iter} iterations \
                 (violation {violation})"
            )));
        }
    }

    // gauge-fix the target potential; compensate on the source side so the
    // plan is unchanged
    let nf = S::from_usize(n).unwrap();
    let mean: S = g.iter().copied().sum::<S>() / nf;
    for v in f.iter_mut() {
        *v = *v + mean;
    }
    let target_potential = Potential::new(g, eps)?;
    Ok(SinkhornResult {
        source_potential: f,
        target_potential,
        iterations,
        marginal_violation: violation,
        objective_trace: trace,
    })
}
