//! Composite tensor-product Gauss-Legendre quadrature on axis-aligned boxes,
//! with two refinement passes:
//!
//! * graded halving toward prescribed points (density kinks and cusps), and
//! * adaptive splitting near Laguerre-cell boundaries, where soft-assignment
//!   integrands develop layers of width proportional to the regularization.

use crate::entropic::Potential;
use crate::error::{Error, Result};
use crate::measures::DiscreteTarget;
use crate::scalar::{dot, Scalar};

/// Axis-aligned box domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxDomain<S, const D: usize> {
    pub lo: [S; D],
    pub hi: [S; D],
}

impl<S: Scalar, const D: usize> BoxDomain<S, D> {
    pub fn new(lo: [S; D], hi: [S; D]) -> Result<Self> {
        for k in 0..D {
            if !(lo[k] < hi[k]) {
                return Err(Error::InvalidParameter(format!(
                    "degenerate box: axis {k} has lo {} >= hi {}",
                    lo[k], hi[k]
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn volume(&self) -> S {
        let mut v = S::one();
        for k in 0..D {
            v = v * (self.hi[k] - self.lo[k]);
        }
        v
    }

    /// Radius of the smallest origin-centered ball containing the box.
    pub fn radius(&self) -> S {
        let mut acc = S::zero();
        for k in 0..D {
            let m = self.lo[k].abs().max(self.hi[k].abs());
            acc = acc + m * m;
        }
        acc.sqrt()
    }

    /// Euclidean diameter (diagonal length).
    pub fn diameter(&self) -> S {
        let mut acc = S::zero();
        for k in 0..D {
            let d = self.hi[k] - self.lo[k];
            acc = acc + d * d;
        }
        acc.sqrt()
    }

    pub fn contains(&self, x: &[S; D]) -> bool {
        (0..D).all(|k| x[k] >= self.lo[k] && x[k] <= self.hi[k])
    }

    pub fn center(&self) -> [S; D] {
        let mut c = [S::zero(); D];
        let half = S::c(0.5);
        for k in 0..D {
            c[k] = (self.lo[k] + self.hi[k]) * half;
        }
        c
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre polynomial. Exact for polynomials of degree 2n-1.
pub fn gauss_legendre<S: Scalar>(order: usize) -> (Vec<S>, Vec<S>) {
    assert!(order >= 1, "order must be at least 1");
    let n = order;
    let mut nodes = vec![S::zero(); n];
    let mut weights = vec![S::zero(); n];
    let nf = S::from_usize(n).unwrap();
    for i in 0..(n + 1) / 2 {
        // Chebyshev-flavored initial guess, then Newton on P_n.
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5);
        let mut x = S::c(theta.cos());
        let mut dp = S::one();
        for _ in 0..100 {
            // Evaluate P_n and P_n' by the three-term recurrence.
            let mut p0 = S::one();
            let mut p1 = x;
            for k in 2..=n {
                let kf = S::from_usize(k).unwrap();
                let p2 = ((S::c(2.0) * kf - S::one()) * x * p1 - (kf - S::one()) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { S::one() } else { p0 };
            dp = nf * (x * p - pm1) / (x * x - S::one());
            let dx = p / dp;
            x = x - dx;
            if dx.abs() <= S::epsilon() * S::c(2.0) {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = S::c(2.0) / ((S::one() - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = S::zero();
    }
    (nodes, weights)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Panel<S, const D: usize> {
    pub lo: [S; D],
    pub hi: [S; D],
}

impl<S: Scalar, const D: usize> Panel<S, D> {
    fn width(&self, axis: usize) -> S {
        self.hi[axis] - self.lo[axis]
    }

    fn max_width(&self) -> S {
        (0..D).fold(S::zero(), |m, k| m.max(self.width(k)))
    }

    fn center(&self) -> [S; D] {
        let mut c = [S::zero(); D];
        let half = S::c(0.5);
        for k in 0..D {
            c[k] = (self.lo[k] + self.hi[k]) * half;
        }
        c
    }

    /// Splits along every axis wider than `limit` (or the widest axis if
    /// none exceed it), producing 2^m children.
    fn split(&self, limit: S) -> Vec<Panel<S, D>> {
        let mut split_axis = [false; D];
        let mut any = false;
        for k in 0..D {
            if self.width(k) > limit {
                split_axis[k] = true;
                any = true;
            }
        }
        if !any {
            let mut widest = 0;
            for k in 1..D {
                if self.width(k) > self.width(widest) {
                    widest = k;
                }
            }
            split_axis[widest] = true;
        }
        let half = S::c(0.5);
        let mut out = vec![*self];
        for k in 0..D {
            if !split_axis[k] {
                continue;
            }
            let mut next = Vec::with_capacity(out.len() * 2);
            for p in &out {
                let mid = (p.lo[k] + p.hi[k]) * half;
                let mut a = *p;
                a.hi[k] = mid;
                let mut b = *p;
                b.lo[k] = mid;
                next.push(a);
                next.push(b);
            }
            out = next;
        }
        out
    }
}

/// Composite tensor Gauss-Legendre rule: a list of panels sharing one
/// reference node set.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule<S, const D: usize> {
    pub domain: BoxDomain<S, D>,
    pub order: usize,
    nodes1d: Vec<S>,
    weights1d: Vec<S>,
    panels: Vec<Panel<S, D>>,
    /// Set when adaptive refinement hit the depth cap while a panel still
    /// triggered the split criterion.
    pub depth_warning: bool,
}

impl<S: Scalar, const D: usize> QuadratureRule<S, D> {
    pub fn node_count(&self) -> usize {
        self.panels.len() * self.order.pow(D as u32)
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    pub fn panels(&self) -> &[Panel<S, D>] {
        &self.panels
    }

    /// Calls `f(x, w)` for every node x with weight w. Weights sum to the
    /// domain volume.
    pub fn for_each_node<F: FnMut(&[S; D], S)>(&self, mut f: F) {
        let n = self.order;
        let half = S::c(0.5);
        for p in &self.panels {
            let mut hw = [S::zero(); D];
            let mut c = [S::zero(); D];
            for k in 0..D {
                hw[k] = (p.hi[k] - p.lo[k]) * half;
                c[k] = (p.lo[k] + p.hi[k]) * half;
            }
            let mut idx = [0usize; D];
            loop {
                let mut x = [S::zero(); D];
                let mut w = S::one();
                for k in 0..D {
                    x[k] = c[k] + hw[k] * self.nodes1d[idx[k]];
                    w = w * hw[k] * self.weights1d[idx[k]];
                }
                f(&x, w);
                // advance the multi-index
                let mut carry = 0;
                loop {
                    idx[carry] += 1;
                    if idx[carry] < n {
                        break;
                    }
                    idx[carry] = 0;
                    carry += 1;
                    if carry == D {
                        break;
                    }
                }
                if carry == D {
                    break;
                }
            }
        }
    }
}

/// Builds a uniform composite rule over `domain` with `panels_per_axis`
/// panels per axis and tensor Gauss-Legendre nodes of the given order.
pub fn build_rule<S: Scalar, const D: usize>(
    domain: BoxDomain<S, D>,
    order: usize,
    panels_per_axis: usize,
) -> Result<QuadratureRule<S, D>> {
    if order < 1 {
        return Err(Error::InvalidParameter("order must be >= 1".into()));
    }
    if panels_per_axis < 1 {
        return Err(Error::InvalidParameter("panels_per_axis must be >= 1".into()));
    }
    let (nodes1d, weights1d) = gauss_legendre::<S>(order);
    let m = panels_per_axis;
    let mf = S::from_usize(m).unwrap();
    let mut panels = Vec::with_capacity(m.pow(D as u32));
    let mut idx = [0usize; D];
    loop {
        let mut lo = [S::zero(); D];
        let mut hi = [S::zero(); D];
        for k in 0..D {
            let w = (domain.hi[k] - domain.lo[k]) / mf;
            lo[k] = domain.lo[k] + w * S::from_usize(idx[k]).unwrap();
            hi[k] = if idx[k] + 1 == m {
                domain.hi[k]
            } else {
                domain.lo[k] + w * S::from_usize(idx[k] + 1).unwrap()
            };
        }
        panels.push(Panel { lo, hi });
        let mut carry = 0;
        loop {
            idx[carry] += 1;
            if idx[carry] < m {
                break;
            }
            idx[carry] = 0;
            carry += 1;
            if carry == D {
                break;
            }
        }
        if carry == D {
            break;
        }
    }
    Ok(QuadratureRule {
        domain,
        order,
        nodes1d,
        weights1d,
        panels,
        depth_warning: false,
    })
}

/// Grades panels toward the given points by repeated halving, so that the
/// panel touching each point has width at most `min_width` on every axis.
/// Used to resolve integrable kinks and cusps of source densities.
pub fn refine_toward_points<S: Scalar, const D: usize>(
    rule: &QuadratureRule<S, D>,
    points: &[[S; D]],
    min_width: S,
) -> QuadratureRule<S, D> {
    let mut out = rule.clone();
    if points.is_empty() {
        return out;
    }
    let touches = |p: &Panel<S, D>, pt: &[S; D]| -> bool {
        (0..D).all(|k| pt[k] >= p.lo[k] && pt[k] <= p.hi[k])
    };
    let mut panels = Vec::with_capacity(out.panels.len());
    for panel in &out.panels {
        let mut stack = vec![*panel];
        while let Some(p) = stack.pop() {
            let hit = points.iter().any(|pt| touches(&p, pt));
            if hit && p.max_width() > min_width {
                let children = p.split(min_width);
                if children.iter().any(|c| c.max_width() >= p.max_width()) {
                    panels.push(p); // width at float resolution
                } else {
                    stack.extend(children);
                }
            } else {
                panels.push(p);
            }
        }
    }
    panels.sort_by(|a, b| {
        for k in 0..D {
            match a.lo[k].partial_cmp(&b.lo[k]).unwrap() {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    });
    out.panels = panels;
    out
}

/// Settings for rule construction and adaptive refinement.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureSettings {
    /// Gauss-Legendre order per panel.
    pub order: usize,
    /// Uniform panels per axis before refinement.
    pub panels_per_axis: usize,
    /// Target panel width near cell boundaries is `kappa * eps`, shrunk
    /// further by the target spread (see `refine_near_boundaries`).
    pub kappa: f64,
    /// Soft-assignment entropy above which a panel is considered to contain
    /// boundary-layer structure. Kept far below the entropy scale so that
    /// refinement extends through the exponential tails of the layers.
    pub entropy_threshold: f64,
    /// Maximum levels of adaptive splitting per panel.
    pub max_depth: usize,
    /// Width of the graded panels hugging a density kink.
    pub grading_min_width: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            order: 8,
            panels_per_axis: 16,
            kappa: 4.0,
            entropy_threshold: 1e-12,
            max_depth: 12,
            grading_min_width: 1e-10,
        }
    }
}

/// Splits panels that intersect soft-assignment boundary layers until their
/// width is at most `kappa * eps / max(1, diam(Y)/2)`, up to `max_depth`
/// levels. A panel triggers when the Shannon entropy of the soft assignment
/// at its center or any corner exceeds the threshold, or when the leading
/// target index differs among those sample points.
pub fn refine_near_boundaries<S: Scalar, const D: usize>(
    rule: &QuadratureRule<S, D>,
    psi: &Potential<S>,
    eps: S,
    target: &DiscreteTarget<S, D>,
    settings: &QuadratureSettings,
) -> Result<QuadratureRule<S, D>> {
    if eps <= S::zero() {
        return Err(Error::NonPositiveEpsilon(eps.as_f64()));
    }
    let spread = (target.diameter() * S::c(0.5)).max(S::one());
    let width_limit = S::c(settings.kappa) * eps / spread;
    let threshold = S::c(settings.entropy_threshold);
    let mut out = rule.clone();
    let mut warning = false;

    // Entropy of the soft assignment and leading index, from stabilized logits.
    let probe = |x: &[S; D]| -> (S, usize) {
        let n = target.len();
        let mut best = S::neg_infinity();
        let mut best_i = 0usize;
        let mut logits = Vec::with_capacity(n);
        for (i, y) in target.points().iter().enumerate() {
            let l = (dot(x, y) - psi.values()[i]) / eps;
            if l > best {
                best = l;
                best_i = i;
            }
            logits.push(l);
        }
        let mut z = S::zero();
        for l in &logits {
            z = z + (*l - best).exp();
        }
        let lse = best + z.ln();
        let floor = S::ln_min_positive();
        let mut h = S::zero();
        for l in &logits {
            let lp = *l - lse;
            if lp > floor {
                h = h - lp.exp() * lp;
            }
        }
        (h, best_i)
    };

    let triggers = |p: &Panel<S, D>| -> bool {
        let (hc, ic) = probe(&p.center());
        if hc > threshold {
            return true;
        }
        let mut corner = [S::zero(); D];
        for mask in 0..(1usize << D) {
            for k in 0..D {
                corner[k] = if mask & (1 << k) != 0 { p.hi[k] } else { p.lo[k] };
            }
            let (h, i) = probe(&corner);
            if h > threshold || i != ic {
                return true;
            }
        }
        false
    };

    let mut panels = Vec::with_capacity(out.panels.len());
    for panel in &out.panels {
        let mut stack = vec![(*panel, 0usize)];
        while let Some((p, depth)) = stack.pop() {
            if p.max_width() > width_limit && triggers(&p) {
                let children = p.split(width_limit);
                if depth >= settings.max_depth
                    || children.iter().any(|c| c.max_width() >= p.max_width())
                {
                    warning = true;
                    panels.push(p);
                } else {
                    for child in children {
                        stack.push((child, depth + 1));
                    }
                }
            } else {
                panels.push(p);
            }
        }
    }
    panels.sort_by(|a, b| {
        for k in 0..D {
            match a.lo[k].partial_cmp(&b.lo[k]).unwrap() {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    });
    out.panels = panels;
    out.depth_warning = warning;
    Ok(out)
}

/// Integrates `w_k * f(x_k)` over the rule (no density weighting).
pub fn integrate<S: Scalar, const D: usize, F: FnMut(&[S; D]) -> S>(
    rule: &QuadratureRule<S, D>,
    mut f: F,
) -> Result<S> {
    let mut acc = S::zero();
    let mut bad: Option<Vec<f64>> = None;
    rule.for_each_node(|x, w| {
        let v = f(x);
        if !v.is_finite() && bad.is_none() {
            bad = Some(x.iter().map(|c| c.as_f64()).collect());
        }
        acc = acc + w * v;
    });
    if let Some(node) = bad {
        return Err(Error::NonFiniteAtNode { node });
    }
    Ok(acc)
}

/// The rho-weighted integral sum_k w_k rho(x_k) f(x_k). Deterministic for a
/// fixed rule; errors if the integrand is not finite at some node.
pub fn expectation<S: Scalar, const D: usize, F: FnMut(&[S; D]) -> S>(
    rule: &QuadratureRule<S, D>,
    rho: &crate::measures::SourceDensity<S, D>,
    mut f: F,
) -> Result<S> {
    integrate(rule, |x| rho.eval(x) * f(x))
}
