//! Sensitivity of the dual potentials in the regularization parameter:
//! the governing linear system for d psi / d eps, log-log rate fitting, and
//! the strong-convexity and constant-formula checks.

use serde::{Deserialize, Serialize};

use crate::entropic::{kantorovich_eval, legendre_transform, EvalRequest, Potential};
use crate::error::{Error, Result};
use crate::linalg::{expand_zero_sum, reduce_zero_sum};
use crate::measures::{DiscreteTarget, SourceDensity};
use crate::quadrature::QuadratureRule;
use crate::scalar::{dot, Scalar};

/// Solves H(psi) d + dG(psi) = 0 on the zero-sum subspace, where H is the
/// Hessian of the functional and dG its mixed derivative in the
/// regularization. At a solved potential this is the derivative of the
/// solution path eps -> psi(eps).
pub fn psi_dot<S: Scalar, const D: usize>(
    rho: &SourceDensity<S, D>,
    target: &DiscreteTarget<S, D>,
    psi: &Potential<S>,
    eps: S,
    rule: &QuadratureRule<S, D>,
) -> Result<Vec<S>> {
    let d = kantorovich_eval(rho, target, psi, eps, rule, EvalRequest::full())?;
    let hess = d.hessian.expect("hessian requested");
    let eg = d.eps_grad.expect("eps-gradient requested");
    if target.len() == 1 {
        return Ok(vec![S::zero()]);
    }
    let reduced = hess.reduce_to_zero_sum();
    let rhs: Vec<S> = reduce_zero_sum(&eg).iter().map(|v| -*v).collect();
    let x = reduced.solve_spd_regularized(&rhs, S::c(1e-12))?;
    Ok(expand_zero_sum(&x))
}

/// Least-squares line fit; returns (slope, intercept, r_squared).
pub fn fit_linear(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 {
        (sxy * sxy) / (sxx * syy)
    } else {
        1.0
    };
    (slope, intercept, r2)
}

/// Log-log slope estimate over a grid of regularizations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub eps_min: f64,
    pub eps_max: f64,
    pub n_points: usize,
}

/// Fits log(value) against log(eps) by least squares.
pub fn fit_rate(eps: &[f64], values: &[f64]) -> Result<RateFit> {
    if eps.len() != values.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} grid points vs {} values",
            eps.len(),
            values.len()
        )));
    }
    if eps.len() < 3 {
        return Err(Error::InvalidParameter(
            "rate fit needs at least 3 points".into(),
        ));
    }
    if values.iter().any(|v| !(*v > 0.0)) || eps.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidParameter(
            "rate fit needs strictly positive values".into(),
        ));
    }
    let lx: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ly: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (slope, intercept, r2) = fit_linear(&lx, &ly);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for e in eps {
        lo = lo.min(*e);
        hi = hi.max(*e);
    }
    Ok(RateFit {
        slope,
        intercept,
        r_squared: r2,
        eps_min: lo,
        eps_max: hi,
        n_points: eps.len(),
    })
}

/// Both sides of the variance inequality
/// Var_mu(v) <= (e^{R_Y diam X} M/m + eps) <v, H v>.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvexityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub quadratic_form: f64,
    pub holds: bool,
}

pub fn check_strong_convexity<S: Scalar, const D: usize>(
    rho: &SourceDensity<S, D>,
    target: &DiscreteTarget<S, D>,
    psi: &Potential<S>,
    eps: S,
    v: &[S],
    rule: &QuadratureRule<S, D>,
) -> Result<ConvexityCheck> {
    if v.len() != target.len() {
        return Err(Error::DimensionMismatch("direction length".into()));
    }
    if !(rho.lower_bound() > S::zero()) {
        return Err(Error::InvalidParameter(
            "strong convexity constant needs a positive density lower bound".into(),
        ));
    }
    let mean: S = v
        .iter()
        .zip(target.weights())
        .map(|(a, w)| *a * *w)
        .sum();
    let second: S = v
        .iter()
        .zip(target.weights())
        .map(|(a, w)| *a * *a * *w)
        .sum();
    let lhs = second - mean * mean;
    let d = kantorovich_eval(rho, target, psi, eps, rule, EvalRequest::with_hessian())?;
    let q = d.hessian.unwrap().quadratic_form(v);
    let constant =
        (target.radius() * rho.domain().diameter()).exp() * rho.upper_bound()
            / rho.lower_bound()
            + eps;
    let rhs = constant * q;
    // the absolute floor covers directions annihilated by both sides,
    // where the two quantities are pure rounding noise
    let floor = 1e-12 * (1.0 + lhs.as_f64().abs());
    Ok(ConvexityCheck {
        lhs: lhs.as_f64(),
        rhs: rhs.as_f64(),
        constant: constant.as_f64(),
        quadratic_form: q.as_f64(),
        holds: lhs.as_f64() <= rhs.as_f64() * (1.0 + 1e-8) + floor,
    })
}

/// The bracketed constant expression from the sensitivity bound, evaluated
/// from instance metadata. The unspecified dimension-dependent prefactor is
/// not included. In one dimension (or with fewer than three non-aligned
/// points) the angle term is undefined and omitted, with the flag cleared.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoughConstantBound {
    pub value: f64,
    pub theta_term_included: bool,
    /// Maximum angle over non-aligned target triples, when defined.
    pub theta: Option<f64>,
}

pub fn rough_constant_bound<S: Scalar, const D: usize>(
    rho: &SourceDensity<S, D>,
    target: &DiscreteTarget<S, D>,
) -> RoughConstantBound {
    let n = target.len() as f64;
    let mu_min = target.min_weight().as_f64();
    let m_rho = rho.lower_bound().as_f64();
    let big_m = rho.upper_bound().as_f64();
    let r_x = rho.domain().radius().as_f64();
    let r_y = target.radius().as_f64();
    let diam_x = rho.domain().diameter().as_f64();
    let diam_y = target.diameter().as_f64();
    let delta = target.min_separation().as_f64();
    let alpha = rho.holder_exponent().as_f64();
    let c_rho = rho.holder_constant().as_f64();
    let log_inv_mu = (1.0 / mu_min).ln();
    let d = D as i32;

    let prefactor = (n / mu_min) * (big_m / m_rho) * (r_y * diam_x).exp();
    let term1 = n * r_x * diam_y + log_inv_mu;
    let term2 = n * n
        * big_m
        * diam_x.powi(d - 1)
        * (1.0 + c_rho / delta.powf(alpha) + r_x * diam_y + log_inv_mu);

    let theta = max_angle(target);
    let (term3, included) = match theta {
        Some(th) => (
            n.powi(3) * big_m * diam_x.powi(d - 2) * diam_y.powi(4)
                / ((th / 2.0).cos() * delta.powi(4))
                * (1.0 + r_x * diam_y + log_inv_mu),
            true,
        ),
        None => (0.0, false),
    };
    RoughConstantBound {
        value: prefactor * (term1 + term2 + term3),
        theta_term_included: included,
        theta,
    }
}

/// Maximum angle at the middle vertex over all ordered triples of distinct,
/// non-aligned target points. `None` when no such triple exists (fewer than
/// three points, or all points collinear, as in one dimension).
fn max_angle<S: Scalar, const D: usize>(target: &DiscreteTarget<S, D>) -> Option<f64> {
    let pts = target.points();
    let n = pts.len();
    if n < 3 {
        return None;
    }
    let mut best: Option<f64> = None;
    for j in 0..n {
        for i in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                if k == j || k == i {
                    continue;
                }
                let mut a = [S::zero(); D];
                let mut b = [S::zero(); D];
                for c in 0..D {
                    a[c] = pts[i][c] - pts[j][c];
                    b[c] = pts[k][c] - pts[j][c];
                }
                let na = dot(&a, &a).sqrt();
                let nb = dot(&b, &b).sqrt();
                let cosv = (dot(&a, &b) / (na * nb)).as_f64().clamp(-1.0, 1.0);
                let sinv = (1.0 - cosv * cosv).max(0.0).sqrt();
                if sinv <= 1e-12 {
                    continue; // aligned triple
                }
                let angle = sinv.atan2(cosv);
                if best.map_or(true, |b| angle > b) {
                    best = Some(angle);
                }
            }
        }
    }
    best
}

/// Margin of `x` to the second-best target under an unregularized
/// potential: the smallest positive gap between the transform value and the
/// scores of the non-maximizing points. Errors on cell boundaries.
pub fn c_x_margin<S: Scalar, const D: usize>(
    target: &DiscreteTarget<S, D>,
    psi0: &Potential<S>,
    x: &[S; D],
) -> Result<S> {
    let (star, argmax) = legendre_transform(target, psi0, x)?;
    if argmax.len() != 1 {
        return Err(Error::BoundaryPoint);
    }
    if target.len() < 2 {
        return Err(Error::InvalidParameter(
            "margin needs at least two target points".into(),
        ));
    }
    let mut margin = S::infinity();
    for (i, (y, p)) in target.points().iter().zip(psi0.values()).enumerate() {
        if i == argmax[0] {
            continue;
        }
        margin = margin.min(star - (dot(x, y) - *p));
    }
    Ok(margin)
}
