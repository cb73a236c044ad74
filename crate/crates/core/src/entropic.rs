//! Pointwise entropic kernel: smoothed max transform, soft assignments, and
//! the regularized functional K with its gradient, Hessian, and derivative
//! in the regularization parameter.
//!
//! All exponentials run through stabilized logits (per-point max
//! subtraction); probabilities and log-probabilities are derived jointly so
//! that products like p*log(p) never see a rounded-to-zero probability.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::measures::{DiscreteTarget, SourceDensity};
use crate::quadrature::QuadratureRule;
use crate::scalar::{dot, Scalar};

/// Gauge-fixed dual vector: entries sum to zero, tagged with the
/// regularization it was produced at (zero allowed for the unregularized
/// limit).
#[derive(Clone, Debug, PartialEq)]
pub struct Potential<S> {
    values: Vec<S>,
    epsilon: S,
}

impl<S: Scalar> Potential<S> {
    /// Recenters the given values to the zero-sum gauge.
    pub fn new(values: Vec<S>, epsilon: S) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty potential".into()));
        }
        if !(epsilon >= S::zero()) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "potential epsilon must be finite and non-negative, got {epsilon}"
            )));
        }
        let n = S::from_usize(values.len()).unwrap();
        let mean: S = values.iter().copied().sum::<S>() / n;
        let values = values.into_iter().map(|v| v - mean).collect();
        Ok(Self { values, epsilon })
    }

    pub fn zeros(n: usize, epsilon: S) -> Result<Self> {
        Self::new(vec![S::zero(); n], epsilon)
    }

    /// Same values, tagged with a different regularization (used by warm
    /// starts along an annealing schedule).
    pub fn retagged(&self, epsilon: S) -> Result<Self> {
        Self::new(self.values.clone(), epsilon)
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn epsilon(&self) -> S {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> S {
        self.values.iter().fold(S::zero(), |m, v| m.max(v.abs()))
    }

    pub fn two_norm(&self) -> S {
        self.values
            .iter()
            .map(|v| *v * *v)
            .sum::<S>()
            .sqrt()
    }

    pub fn gauge_defect(&self) -> S {
        self.values.iter().copied().sum::<S>().abs()
    }

    pub fn sup_distance(&self, other: &Potential<S>) -> Result<S> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "potentials of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(S::zero(), |m, (a, b)| m.max((*a - *b).abs())))
    }
}

/// Conditional transport plan at a point: a probability vector over the
/// target points.
#[derive(Clone, Debug)]
pub struct SoftAssignment<S, const D: usize> {
    pub probs: Vec<S>,
    pub at_point: [S; D],
}

impl<S: Scalar, const D: usize> SoftAssignment<S, D> {
    pub fn entropy(&self) -> S {
        let floor = S::ln_min_positive();
        self.probs
            .iter()
            .map(|p| {
                if *p > S::zero() {
                    let lp = p.ln();
                    if lp > floor {
                        -*p * lp
                    } else {
                        S::zero()
                    }
                } else {
                    S::zero()
                }
            })
            .sum()
    }

    pub fn sup_distance(&self, other: &SoftAssignment<S, D>) -> S {
        self.probs
            .iter()
            .zip(&other.probs)
            .fold(S::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }
}

/// Stabilized logits at one point: l_i = (<x, y_i> - psi_i) / eps, their
/// max, and the log-sum-exp.
struct NodeKernel<S> {
    logits: Vec<S>,
    lse: S,
}

impl<S: Scalar> NodeKernel<S> {
    fn compute<const D: usize>(
        target: &DiscreteTarget<S, D>,
        psi: &[S],
        x: &[S; D],
        eps: S,
    ) -> Self {
        let n = target.len();
        let mut logits = Vec::with_capacity(n);
        let mut m = S::neg_infinity();
        for (y, p) in target.points().iter().zip(psi) {
            let l = (dot(x, y) - *p) / eps;
            if l > m {
                m = l;
            }
            logits.push(l);
        }
        let mut z = S::zero();
        for l in &logits {
            z = z + (*l - m).exp();
        }
        let lse = m + z.ln();
        Self { logits, lse }
    }

    #[inline]
    fn log_prob(&self, i: usize) -> S {
        self.logits[i] - self.lse
    }

    #[inline]
    fn prob(&self, i: usize) -> S {
        self.log_prob(i).exp()
    }
}

fn check_eps<S: Scalar>(eps: S) -> Result<()> {
    if !(eps > S::zero()) || !eps.is_finite() {
        return Err(Error::NonPositiveEpsilon(eps.as_f64()));
    }
    Ok(())
}

fn check_len<S: Scalar, const D: usize>(
    target: &DiscreteTarget<S, D>,
    psi: &Potential<S>,
) -> Result<()> {
    if target.len() != psi.len() {
        return Err(Error::DimensionMismatch(format!(
            "target has {} points, potential has {} entries",
            target.len(),
            psi.len()
        )));
    }
    Ok(())
}

/// The smoothed max transform eps * log sum_i exp((<x,y_i> - psi_i)/eps).
/// Satisfies max_i(<x,y_i> - psi_i) <= value <= max + eps log N.
pub fn c_eps_transform<S: Scalar, const D: usize>(
    target: &DiscreteTarget<S, D>,
    psi: &Potential<S>,
    x: &[S; D],
    eps: S,
) -> Result<S> {
    check_eps(eps)?;
    check_len(target, psi)?;
    let k = NodeKernel::compute(target, psi.values(), x, eps);
    Ok(eps * k.lse)
}

/// The unregularized transform max_i(<x,y_i> - psi_i) together with every
/// maximizing index (ties are reported, not broken).
pub fn legendre_transform<S: Scalar, const D: usize>(
    target: &DiscreteTarget<S, D>,
    psi: &Potential<S>,
    x: &[S; D],
) -> Result<(S, Vec<usize>)> {
    check_len(target, psi)?;
    let mut best = S::neg_infinity();
    let mut arg = Vec::new();
    for (i, (y, p)) in target.points().iter().zip(psi.values()).enumerate() {
        let v = dot(x, y) - *p;
        if v > best {
            best = v;
            arg.clear();
            arg.push(i);
        } else if v == best {
            arg.push(i);
        }
    }
    Ok((best, arg))
}

/// Indices of the Laguerre cells containing `x` (more than one on a cell
/// boundary).
pub fn laguerre_index<S: Scalar, const D: usize>(
    target: &DiscreteTarget<S, D>,
    psi: &Potential<S>,
    x: &[S; D],
) -> Result<Vec<usize>> {
    Ok(legendre_transform(target, psi, x)?.1)
}

/// Softmax of the stabilized logits: exact simplex membership for any
/// positive regularization.
pub fn soft_assignment<S: Scalar, const D: usize>(
    target: &DiscreteTarget<S, D>,
    psi: &Potential<S>,
    x: &[S; D],
    eps: S,
) -> Result<SoftAssignment<S, D>> {
    check_eps(eps)?;
    check_len(target, psi)?;
    let k = NodeKernel::compute(target, psi.values(), x, eps);
    let mut probs: Vec<S> = (0..target.len()).map(|i| k.prob(i)).collect();
    let total: S = probs.iter().copied().sum();
    for p in &mut probs {
        *p = *p / total;
    }
    Ok(SoftAssignment {
        probs,
        at_point: *x,
    })
}

/// Which derivatives `kantorovich_eval` should assemble.
#[derive(Clone, Copy, Debug, Default)]
pub struct EvalRequest {
    pub hessian: bool,
    pub eps_grad: bool,
}

impl EvalRequest {
    pub fn value_only() -> Self {
        Self::default()
    }

    pub fn with_hessian() -> Self {
        Self {
            hessian: true,
            eps_grad: false,
        }
    }

    pub fn full() -> Self {
        Self {
            hessian: true,
            eps_grad: true,
        }
    }
}

/// Value and derivatives of the regularized functional at one potential.
#[derive(Clone, Debug)]
pub struct KantorovichDerivatives<S> {
    /// K(psi) = E_rho[transform] + eps.
    pub value: S,
    /// -E_rho[pi_x(psi)]; entries in [-1, 0] summing to -1.
    pub gradient: Vec<S>,
    /// (1/eps) E_rho[diag(pi) - pi pi^T]; positive semi-definite,
    /// annihilates constants.
    pub hessian: Option<DenseMatrix<S>>,
    /// (1/eps) E_rho[(diag(pi) - pi pi^T) log pi]; sums to zero.
    pub eps_grad: Option<Vec<S>>,
}

/// One quadrature pass assembling the requested derivatives.
///
/// The rho-expectation is normalized by the rule's own mass of rho, so the
/// discretized source is exactly a probability measure and the gradient
/// entries sum to -1 up to roundoff.
pub fn kantorovich_eval<S: Scalar, const D: usize>(
    rho: &SourceDensity<S, D>,
    target: &DiscreteTarget<S, D>,
    psi: &Potential<S>,
    eps: S,
    rule: &QuadratureRule<S, D>,
    request: EvalRequest,
) -> Result<KantorovichDerivatives<S>> {
    check_len(target, psi)?;
    kantorovich_eval_values(rho, target, psi.values(), eps, rule, request)
}

/// Evaluation at a raw coefficient vector, without gauge recentering.
/// Finite-difference oracles perturb single coordinates and must see the
/// un-projected functional.
pub fn kantorovich_eval_values<S: Scalar, const D: usize>(
    rho: &SourceDensity<S, D>,
    target: &DiscreteTarget<S, D>,
    psi_values: &[S],
    eps: S,
    rule: &QuadratureRule<S, D>,
    request: EvalRequest,
) -> Result<KantorovichDerivatives<S>> {
    check_eps(eps)?;
    if target.len() != psi_values.len() {
        return Err(Error::DimensionMismatch(format!(
            "target has {} points, vector has {} entries",
            target.len(),
            psi_values.len()
        )));
    }
    if rule.node_count() == 0 {
        return Err(Error::InvalidParameter("empty quadrature rule".into()));
    }
    let n = target.len();
    let floor = S::ln_min_positive();
    let mut mass = S::zero();
    let mut value = S::zero();
    let mut gradient = vec![S::zero(); n];
    let mut hessian = if request.hessian {
        Some(DenseMatrix::zeros(n))
    } else {
        None
    };
    let mut eps_grad = if request.eps_grad {
        Some(vec![S::zero(); n])
    } else {
        None
    };
    let mut probs = vec![S::zero(); n];
    let mut plogp = vec![S::zero(); n];
    let mut bad: Option<Vec<f64>> = None;

    rule.for_each_node(|x, w| {
        let r = rho.eval(x);
        if r == S::zero() {
            return;
        }
        let wr = w * r;
        let k = NodeKernel::compute(target, psi_values, x, eps);
        if !k.lse.is_finite() && bad.is_none() {
            bad = Some(x.iter().map(|c| c.as_f64()).collect());
            return;
        }
        mass = mass + wr;
        value = value + wr * eps * k.lse;
        for i in 0..n {
            let lp = k.log_prob(i);
            let p = lp.exp();
            probs[i] = p;
            plogp[i] = if lp > floor { p * lp } else { S::zero() };
            gradient[i] = gradient[i] - wr * p;
        }
        if let Some(h) = hessian.as_mut() {
            for i in 0..n {
                let pi = probs[i];
                for j in 0..=i {
                    let mut v = -pi * probs[j];
                    if i == j {
                        v = v + pi;
                    }
                    h.add_to(i, j, wr * v);
                }
            }
        }
        if let Some(e) = eps_grad.as_mut() {
            let s: S = plogp.iter().copied().sum();
            for i in 0..n {
                e[i] = e[i] + wr * (plogp[i] - probs[i] * s);
            }
        }
    });

    if let Some(node) = bad {
        return Err(Error::NonFiniteAtNode { node });
    }
    if !(mass > S::zero()) {
        return Err(Error::InvalidParameter(
            "source mass vanishes on the quadrature rule".into(),
        ));
    }

    value = value / mass + eps;
    for g in &mut gradient {
        *g = *g / mass;
    }
    if let Some(h) = hessian.as_mut() {
        let scale = (eps * mass).recip();
        for i in 0..n {
            for j in 0..=i {
                let v = h.get(i, j) * scale;
                h.set(i, j, v);
                h.set(j, i, v);
            }
        }
    }
    if let Some(e) = eps_grad.as_mut() {
        let scale = (eps * mass).recip();
        for v in e.iter_mut() {
            *v = *v * scale;
        }
    }

    Ok(KantorovichDerivatives {
        value,
        gradient,
        hessian,
        eps_grad,
    })
}
