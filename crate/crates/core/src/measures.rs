//! Source densities and discrete target measures.
//!
//! The built-in one-dimensional densities live on `[-s, s]` (restriction of
//! the parent family to the interval, renormalized): uniform, truncated
//! Gaussian, truncated Laplace, and the cusp family `rho(x) ∝ 1 - |x|^alpha`.
//! Each carries exact bounds, its Hölder data, and closed-form CDF/quantile
//! evaluators where available (the Gaussian CDF is integrated numerically).

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quadrature::{build_rule, BoxDomain};
use crate::scalar::{dist, norm, Scalar};

/// Named density family with parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BuiltinDensity<S> {
    Lebesgue,
    Gaussian { sigma: S },
    Laplace,
    Holder { alpha: S },
}

#[derive(Clone)]
enum DensityKind<S: Scalar, const D: usize> {
    Builtin {
        family: BuiltinDensity<S>,
        shrink: S,
        norm: S,
    },
    Custom {
        eval: Arc<dyn Fn(&[S; D]) -> S + Send + Sync>,
        cdf: Option<Arc<dyn Fn(S) -> S + Send + Sync>>,
        quantile: Option<Arc<dyn Fn(S) -> S + Send + Sync>>,
    },
}

/// A continuous probability density on an axis-aligned box, with the bounds
/// and regularity metadata the solver and the constant formulas need.
#[derive(Clone)]
pub struct SourceDensity<S: Scalar, const D: usize> {
    domain: BoxDomain<S, D>,
    kind: DensityKind<S, D>,
    lower_bound: S,
    upper_bound: S,
    holder_exponent: S,
    holder_constant: S,
    singular_points: Vec<[S; D]>,
}

impl<S: Scalar, const D: usize> std::fmt::Debug for SourceDensity<S, D> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SourceDensity")
            .field("domain", &self.domain)
            .field("lower_bound", &self.lower_bound)
            .field("upper_bound", &self.upper_bound)
            .field("holder_exponent", &self.holder_exponent)
            .finish()
    }
}

fn gaussian_half_integral<S: Scalar>(sigma: S, t: S) -> S {
    // int_0^t exp(-u^2 / (2 sigma^2)) du with a fixed composite rule.
    if t == S::zero() {
        return S::zero();
    }
    let dom = BoxDomain::new([S::zero()], [t.abs()]).expect("positive length");
    let rule = build_rule(dom, 16, 32).expect("valid rule");
    let two_sig_sq = S::c(2.0) * sigma * sigma;
    let mut acc = S::zero();
    rule.for_each_node(|x, w| {
        acc = acc + w * (-(x[0] * x[0]) / two_sig_sq).exp();
    });
    if t > S::zero() {
        acc
    } else {
        -acc
    }
}

impl<S: Scalar> SourceDensity<S, 1> {
    /// Builds one of the four benchmark densities on `[-s, s]`.
    ///
    /// When `shrink` is not given, the cusp family defaults to `s = 0.99`
    /// (it needs `s < 1` for a positive lower bound) and the others to
    /// `s = 1`.
    pub fn builtin(family: BuiltinDensity<S>, shrink: Option<S>) -> Result<Self> {
        let s = match shrink {
            Some(v) => {
                if !(v > S::zero() && v <= S::one()) {
                    return Err(Error::InvalidParameter(format!(
                        "shrink must lie in (0, 1], got {v}"
                    )));
                }
                v
            }
            None => match family {
                BuiltinDensity::Holder { .. } => S::c(0.99),
                _ => S::one(),
            },
        };
        let domain = BoxDomain::new([-s], [s])?;
        let (norm_const, lower, upper, alpha, c_rho, singular) = match family {
            BuiltinDensity::Lebesgue => {
                let z = S::c(2.0) * s;
                (z, z.recip(), z.recip(), S::one(), S::zero(), vec![])
            }
            BuiltinDensity::Gaussian { sigma } => {
                if !(sigma > S::zero()) {
                    return Err(Error::InvalidParameter(format!(
                        "gaussian sigma must be positive, got {sigma}"
                    )));
                }
                let z = S::c(2.0) * gaussian_half_integral(sigma, s);
                let m = (-(s * s) / (S::c(2.0) * sigma * sigma)).exp() / z;
                let big_m = z.recip();
                // max |rho'| is attained at x = min(sigma, s)
                let xm = sigma.min(s);
                let c = xm * (-(xm * xm) / (S::c(2.0) * sigma * sigma)).exp()
                    / (sigma * sigma * z);
                (z, m, big_m, S::one(), c, vec![])
            }
            BuiltinDensity::Laplace => {
                let z = S::c(2.0) * (S::one() - (-s).exp());
                let m = (-s).exp() / z;
                let big_m = z.recip();
                (z, m, big_m, S::one(), z.recip(), vec![[S::zero()]])
            }
            BuiltinDensity::Holder { alpha } => {
                if !(alpha > S::zero() && alpha <= S::one()) {
                    return Err(Error::InvalidParameter(format!(
                        "holder alpha must lie in (0, 1], got {alpha}"
                    )));
                }
                let z = S::c(2.0) * (s - s.powf(S::one() + alpha) / (S::one() + alpha));
                let m = (S::one() - s.powf(alpha)) / z;
                let big_m = z.recip();
                // | |x|^a - |x'|^a | <= |x - x'|^a, so C = 1/Z.
                (z, m, big_m, alpha, z.recip(), vec![[S::zero()]])
            }
        };
        Ok(Self {
            domain,
            kind: DensityKind::Builtin {
                family,
                shrink: s,
                norm: norm_const,
            },
            lower_bound: lower,
            upper_bound: upper,
            holder_exponent: alpha,
            holder_constant: c_rho,
            singular_points: singular,
        })
    }

    /// CDF of a 1D density. Closed form except for the Gaussian family,
    /// which integrates its density numerically.
    pub fn cdf(&self, x: S) -> Result<S> {
        let s = self.domain.hi[0];
        let xc = x.max(self.domain.lo[0]).min(s);
        match &self.kind {
            DensityKind::Builtin { family, norm, .. } => {
                let z = *norm;
                Ok(match family {
                    BuiltinDensity::Lebesgue => (xc + s) / z,
                    BuiltinDensity::Laplace => {
                        if xc <= S::zero() {
                            (xc.exp() - (-s).exp()) / z
                        } else {
                            S::c(0.5) + (S::one() - (-xc).exp()) / z
                        }
                    }
                    BuiltinDensity::Holder { alpha } => {
                        let a = *alpha;
                        let t = xc.abs();
                        let half_mass = t - t.powf(S::one() + a) / (S::one() + a);
                        S::c(0.5) + xc.signum() * half_mass / z
                    }
                    BuiltinDensity::Gaussian { sigma } => {
                        S::c(0.5) + gaussian_half_integral(*sigma, xc) / z
                    }
                })
            }
            DensityKind::Custom { cdf, .. } => match cdf {
                Some(f) => Ok(f(xc)),
                None => Err(Error::InvalidParameter(
                    "density has no CDF evaluator".into(),
                )),
            },
        }
    }

    /// Monotone inverse of the CDF. Closed form for the uniform and Laplace
    /// families; bisection on the CDF for the others.
    pub fn quantile(&self, p: S) -> Result<S> {
        if !(p >= S::zero() && p <= S::one()) {
            return Err(Error::InvalidParameter(format!(
                "probability must lie in [0, 1], got {p}"
            )));
        }
        let s = self.domain.hi[0];
        match &self.kind {
            DensityKind::Builtin { family, norm, .. } => {
                let z = *norm;
                match family {
                    BuiltinDensity::Lebesgue => Ok(z * p - s),
                    BuiltinDensity::Laplace => {
                        if p <= S::c(0.5) {
                            Ok(((-s).exp() + p * z).ln())
                        } else {
                            Ok(-(S::one() - (p - S::c(0.5)) * z).ln())
                        }
                    }
                    _ => self.quantile_bisect(p),
                }
            }
            DensityKind::Custom { quantile, .. } => match quantile {
                Some(f) => Ok(f(p)),
                None => Err(Error::InvalidParameter(
                    "density has no quantile evaluator".into(),
                )),
            },
        }
    }

    fn quantile_bisect(&self, p: S) -> Result<S> {
        let mut lo = self.domain.lo[0];
        let mut hi = self.domain.hi[0];
        let flo = self.cdf(lo)?;
        let fhi = self.cdf(hi)?;
        if p <= flo {
            return Ok(lo);
        }
        if p >= fhi {
            return Ok(hi);
        }
        for _ in 0..200 {
            let mid = (lo + hi) * S::c(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid)? < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo + hi) * S::c(0.5))
    }
}

impl<S: Scalar, const D: usize> SourceDensity<S, D> {
    /// Wraps a user-supplied evaluator with explicit bounds and Hölder data.
    pub fn from_fn(
        domain: BoxDomain<S, D>,
        eval: Arc<dyn Fn(&[S; D]) -> S + Send + Sync>,
        lower_bound: S,
        upper_bound: S,
        holder_exponent: S,
        holder_constant: S,
        singular_points: Vec<[S; D]>,
    ) -> Result<Self> {
        if !(lower_bound >= S::zero()) || !(upper_bound >= lower_bound) {
            return Err(Error::InvalidParameter(
                "density bounds must satisfy 0 <= m <= M".into(),
            ));
        }
        if !(holder_exponent > S::zero() && holder_exponent <= S::one()) {
            return Err(Error::InvalidParameter(
                "Hölder exponent must lie in (0, 1]".into(),
            ));
        }
        Ok(Self {
            domain,
            kind: DensityKind::Custom {
                eval,
                cdf: None,
                quantile: None,
            },
            lower_bound,
            upper_bound,
            holder_exponent,
            holder_constant,
            singular_points,
        })
    }

    /// Evaluates the density. Zero outside the domain.
    pub fn eval(&self, x: &[S; D]) -> S {
        if !self.domain.contains(x) {
            return S::zero();
        }
        match &self.kind {
            DensityKind::Builtin { family, norm, .. } => {
                let t = x[0];
                match family {
                    BuiltinDensity::Lebesgue => norm.recip(),
                    BuiltinDensity::Gaussian { sigma } => {
                        (-(t * t) / (S::c(2.0) * *sigma * *sigma)).exp() / *norm
                    }
                    BuiltinDensity::Laplace => (-t.abs()).exp() / *norm,
                    BuiltinDensity::Holder { alpha } => {
                        (S::one() - t.abs().powf(*alpha)) / *norm
                    }
                }
            }
            DensityKind::Custom { eval, .. } => eval(x),
        }
    }

    pub fn domain(&self) -> &BoxDomain<S, D> {
        &self.domain
    }

    /// Pointwise lower bound m on the domain (zero allowed only for the
    /// unshrunk cusp family, which fails the positivity assumption).
    pub fn lower_bound(&self) -> S {
        self.lower_bound
    }

    pub fn upper_bound(&self) -> S {
        self.upper_bound
    }

    pub fn holder_exponent(&self) -> S {
        self.holder_exponent
    }

    pub fn holder_constant(&self) -> S {
        self.holder_constant
    }

    /// Interior points where the density has a kink or cusp; quadrature is
    /// graded toward these.
    pub fn singular_points(&self) -> &[[S; D]] {
        &self.singular_points
    }

    /// Support half-width for built-in families; `None` for custom
    /// densities.
    pub fn shrink(&self) -> Option<S> {
        match &self.kind {
            DensityKind::Builtin { shrink, .. } => Some(*shrink),
            DensityKind::Custom { .. } => None,
        }
    }
}

/// Finitely supported target measure with derived geometry.
#[derive(Clone, Debug)]
pub struct DiscreteTarget<S: Scalar, const D: usize> {
    points: Vec<[S; D]>,
    weights: Vec<S>,
    min_separation: S,
    radius: S,
    diameter: S,
}

impl<S: Scalar, const D: usize> DiscreteTarget<S, D> {
    pub fn new(points: Vec<[S; D]>, weights: Vec<S>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("target must have points".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w > S::zero())) {
            return Err(Error::InvalidParameter(
                "target weights must be strictly positive".into(),
            ));
        }
        let total: S = weights.iter().copied().sum();
        let n = points.len();
        let tol = S::c(1e-12) * S::from_usize(n.max(1)).unwrap();
        if (total - S::one()).abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "target weights sum to {total}, expected 1"
            )));
        }
        let weights: Vec<S> = weights.into_iter().map(|w| w / total).collect();

        let mut min_sep = S::infinity();
        let mut diam = S::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = dist(&points[i], &points[j]);
                min_sep = min_sep.min(d);
                diam = diam.max(d);
            }
        }
        if n > 1 && !(min_sep > S::zero()) {
            return Err(Error::InvalidParameter(
                "target points must be pairwise distinct".into(),
            ));
        }
        let radius = points.iter().fold(S::zero(), |m, p| m.max(norm(p)));
        Ok(Self {
            points,
            weights,
            min_separation: min_sep,
            radius,
            diameter: diam,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[S; D]] {
        &self.points
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn min_weight(&self) -> S {
        self.weights.iter().copied().fold(S::infinity(), S::min)
    }

    /// Minimum pairwise distance (infinite for a single point).
    pub fn min_separation(&self) -> S {
        self.min_separation
    }

    pub fn radius(&self) -> S {
        self.radius
    }

    pub fn diameter(&self) -> S {
        self.diameter
    }

    /// Shannon-type entropy term sum_i mu_i log mu_i (non-positive).
    pub fn neg_entropy(&self) -> S {
        self.weights.iter().map(|w| *w * w.ln()).sum()
    }

    /// Second moment sum_i mu_i |y_i|^2.
    pub fn second_moment(&self) -> S {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| *w * crate::scalar::dot(p, p))
            .sum()
    }
}

impl<S: Scalar> DiscreteTarget<S, 1> {
    /// True when the 1D points are strictly increasing.
    pub fn is_sorted_strict(&self) -> bool {
        self.points.windows(2).all(|w| w[0][0] < w[1][0])
    }
}

/// Draws `n` points uniformly in `[lo, hi]`, rejection-sampled so that all
/// pairwise distances are at least `min_sep`. Deterministic in the seed.
pub fn random_points_1d<S: Scalar>(
    lo: S,
    hi: S,
    n: usize,
    min_sep: S,
    seed: u64,
) -> Result<Vec<S>> {
    if !(hi > lo) {
        return Err(Error::InvalidParameter("empty interval".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<S> = Vec::with_capacity(n);
    let mut attempts = 0usize;
    let span = hi - lo;
    while pts.len() < n {
        attempts += 1;
        if attempts > 100_000 * n.max(1) {
            return Err(Error::InvalidParameter(
                "rejection sampling failed: separation too large for interval".into(),
            ));
        }
        let u: f64 = rng.gen::<f64>();
        let c = lo + span * S::c(u);
        if pts.iter().all(|p| (*p - c).abs() >= min_sep) {
            pts.push(c);
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(pts)
}

/// Weighted atoms produced by sampling a density at quadrature nodes.
pub fn discretize_source<S: Scalar, const D: usize>(
    rho: &SourceDensity<S, D>,
    rule: &crate::quadrature::QuadratureRule<S, D>,
) -> Result<Vec<([S; D], S)>> {
    if rule.node_count() == 0 {
        return Err(Error::InvalidParameter("empty quadrature rule".into()));
    }
    let mut atoms = Vec::with_capacity(rule.node_count());
    let mut total = S::zero();
    rule.for_each_node(|x, w| {
        let m = w * rho.eval(x);
        total = total + m;
        atoms.push((*x, m));
    });
    if !(total > S::zero()) {
        return Err(Error::InvalidParameter(
            "density mass vanishes on the rule".into(),
        ));
    }
    for a in &mut atoms {
        a.1 = a.1 / total;
    }
    Ok(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{build_rule, integrate, refine_toward_points};
    use approx::assert_abs_diff_eq;

    fn normalization<S: Scalar>(rho: &SourceDensity<S, 1>) -> S {
        let rule = build_rule(*rho.domain(), 16, 32).unwrap();
        let rule = refine_toward_points(&rule, rho.singular_points(), S::c(1e-10));
        integrate(&rule, |x| rho.eval(x)).unwrap()
    }

    #[test]
    fn lebesgue_is_uniform_half() {
        let rho = SourceDensity::<f64, 1>::builtin(BuiltinDensity::Lebesgue, None).unwrap();
        assert_abs_diff_eq!(rho.eval(&[0.3]), 0.5, epsilon = 1e-15);
        assert_eq!(rho.lower_bound(), 0.5);
        assert_eq!(rho.upper_bound(), 0.5);
        assert_abs_diff_eq!(normalization(&rho), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn holder_density_value_at_zero() {
        // Unshrunk cusp family: rho(0) = (1+a)/(2a), equal to 3/2 at a = 1/2.
        let rho =
            SourceDensity::<f64, 1>::builtin(BuiltinDensity::Holder { alpha: 0.5 }, Some(1.0))
                .unwrap();
        assert_abs_diff_eq!(rho.eval(&[0.0]), 1.5, epsilon = 1e-14);
        assert_eq!(rho.lower_bound(), 0.0);
        assert_abs_diff_eq!(normalization(&rho), 1.0, epsilon = 1e-9);
        // Default shrink keeps the lower bound positive.
        let shrunk =
            SourceDensity::<f64, 1>::builtin(BuiltinDensity::Holder { alpha: 0.5 }, None).unwrap();
        assert!(shrunk.lower_bound() > 0.0);
        assert_abs_diff_eq!(normalization(&shrunk), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn laplace_normalization_matches_quadrature_oracle() {
        let rho = SourceDensity::<f64, 1>::builtin(BuiltinDensity::Laplace, None).unwrap();
        // rho(x) = e^{-|x|} / (2 (1 - e^{-1})) on [-1, 1]
        let expected = 1.0 / (2.0 * (1.0 - (-1.0f64).exp()));
        assert_abs_diff_eq!(rho.eval(&[0.0]), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(normalization(&rho), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_normalizes_and_bounds_hold() {
        let rho =
            SourceDensity::<f64, 1>::builtin(BuiltinDensity::Gaussian { sigma: 1.0 }, None)
                .unwrap();
        assert_abs_diff_eq!(normalization(&rho), 1.0, epsilon = 1e-10);
        for i in 0..100 {
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / 100.0;
            let v = rho.eval(&[x]);
            assert!(v >= rho.lower_bound() - 1e-15);
            assert!(v <= rho.upper_bound() + 1e-15);
        }
    }

    #[test]
    fn quantile_inverts_cdf_on_grid() {
        for family in [
            BuiltinDensity::Lebesgue,
            BuiltinDensity::Gaussian { sigma: 1.0 },
            BuiltinDensity::Laplace,
            BuiltinDensity::Holder { alpha: 0.5 },
        ] {
            let rho = SourceDensity::<f64, 1>::builtin(family, None).unwrap();
            let s = rho.domain().hi[0];
            for i in 0..100 {
                let x = -s + 2.0 * s * (i as f64 + 0.5) / 100.0;
                let p = rho.cdf(x).unwrap();
                let xr = rho.quantile(p).unwrap();
                assert!(
                    (xr - x).abs() <= 1e-10,
                    "{family:?}: quantile(cdf({x})) = {xr}"
                );
            }
        }
    }

    #[test]
    fn quantile_known_values() {
        let rho = SourceDensity::<f64, 1>::builtin(BuiltinDensity::Lebesgue, None).unwrap();
        assert_abs_diff_eq!(rho.quantile(0.5).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.quantile(0.25).unwrap(), -0.5, epsilon = 1e-15);
        let holder =
            SourceDensity::<f64, 1>::builtin(BuiltinDensity::Holder { alpha: 0.5 }, None).unwrap();
        assert_abs_diff_eq!(holder.quantile(0.5).unwrap(), 0.0, epsilon = 1e-12);
        assert!(rho.quantile(1.5).is_err());
    }

    #[test]
    fn holder_modulus_respected_on_random_pairs() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for family in [
            BuiltinDensity::Lebesgue,
            BuiltinDensity::Gaussian { sigma: 1.0 },
            BuiltinDensity::Laplace,
            BuiltinDensity::Holder { alpha: 0.5 },
        ] {
            let rho = SourceDensity::<f64, 1>::builtin(family, None).unwrap();
            let s = rho.domain().hi[0];
            let a = rho.holder_exponent();
            let c = rho.holder_constant();
            for _ in 0..1000 {
                let x = -s + 2.0 * s * rng.gen::<f64>();
                let y = -s + 2.0 * s * rng.gen::<f64>();
                let lhs = (rho.eval(&[x]) - rho.eval(&[y])).abs();
                let rhs = c * (x - y).abs().powf(a);
                assert!(lhs <= rhs + 1e-12, "{family:?}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn target_geometry_and_validation() {
        let t = DiscreteTarget::new(
            vec![[-1.0f64], [0.5], [1.0]],
            vec![0.25, 0.25, 0.5],
        )
        .unwrap();
        assert_abs_diff_eq!(t.min_separation(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t.diameter(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.radius(), 1.0, epsilon = 1e-15);
        assert!(t.is_sorted_strict());

        assert!(DiscreteTarget::new(vec![[0.0f64], [0.0]], vec![0.5, 0.5]).is_err());
        assert!(DiscreteTarget::new(vec![[0.0f64]], vec![0.9]).is_err());
        assert!(DiscreteTarget::new(vec![[0.0f64], [1.0]], vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn midpoint_discretization_of_lebesgue() {
        let rho = SourceDensity::<f64, 1>::builtin(BuiltinDensity::Lebesgue, None).unwrap();
        let rule = build_rule(*rho.domain(), 1, 2).unwrap();
        let atoms = discretize_source(&rho, &rule).unwrap();
        assert_eq!(atoms.len(), 2);
        assert_abs_diff_eq!(atoms[0].0[0], -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(atoms[1].0[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(atoms[0].1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(atoms[1].1, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn discretization_weights_positive_and_normalized() {
        for family in [
            BuiltinDensity::Gaussian { sigma: 1.0 },
            BuiltinDensity::Holder { alpha: 0.5 },
        ] {
            let rho = SourceDensity::<f64, 1>::builtin(family, None).unwrap();
            let rule = build_rule(*rho.domain(), 4, 7).unwrap();
            let atoms = discretize_source(&rho, &rule).unwrap();
            assert!(atoms.iter().all(|(_, w)| *w > 0.0), "{family:?}");
            let total: f64 = atoms.iter().map(|(_, w)| w).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn random_points_respect_separation_and_seed() {
        let a = random_points_1d::<f64>(-1.0, 1.0, 5, 0.1, 42).unwrap();
        let b = random_points_1d::<f64>(-1.0, 1.0, 5, 0.1, 42).unwrap();
        assert_eq!(a, b);
        for w in a.windows(2) {
            assert!(w[1] - w[0] >= 0.1);
        }
        let c = random_points_1d::<f64>(-1.0, 1.0, 5, 0.1, 43).unwrap();
        assert_ne!(a, c);
    }
}
