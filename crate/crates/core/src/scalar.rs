//! Floating-point scalar abstraction for the numerical kernels.
//!
//! All core math is generic over [`Scalar`] so the same code instantiates at
//! `f32` and `f64`. Tolerances and literals written as `f64` constants are
//! converted through [`Scalar::c`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("constant must be representable")
    }

    /// Widens to `f64` for reporting and serialization.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }

    /// Natural log of the smallest positive normal value; below this,
    /// `exp` underflows to zero.
    #[inline]
    fn ln_min_positive() -> Self {
        Self::min_positive_value().ln()
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Dot product of two fixed-dimension points.
#[inline]
pub fn dot<S: Scalar, const D: usize>(a: &[S; D], b: &[S; D]) -> S {
    let mut acc = S::zero();
    for k in 0..D {
        acc = acc + a[k] * b[k];
    }
    acc
}

/// Euclidean norm.
#[inline]
pub fn norm<S: Scalar, const D: usize>(a: &[S; D]) -> S {
    dot(a, a).sqrt()
}

/// Euclidean distance.
#[inline]
pub fn dist<S: Scalar, const D: usize>(a: &[S; D], b: &[S; D]) -> S {
    let mut acc = S::zero();
    for k in 0..D {
        let d = a[k] - b[k];
        acc = acc + d * d;
    }
    acc.sqrt()
}

/// Squared Euclidean distance.
#[inline]
pub fn dist_sq<S: Scalar, const D: usize>(a: &[S; D], b: &[S; D]) -> S {
    let mut acc = S::zero();
    for k in 0..D {
        let d = a[k] - b[k];
        acc = acc + d * d;
    }
    acc
}
