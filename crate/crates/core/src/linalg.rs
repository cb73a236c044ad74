//! Small dense symmetric matrices and Cholesky solves.
//!
//! Problem sizes here are tiny (N is the number of target points, typically
//! below a hundred), so a dense row-major layout with an unblocked Cholesky
//! factorization is appropriate.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = self.data[i * self.n + j] + v;
    }

    pub fn trace(&self) -> S {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![S::zero(); self.n];
        for i in 0..self.n {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            let mut acc = S::zero();
            for (a, b) in row.iter().zip(x) {
                acc = acc + *a * *b;
            }
            y[i] = acc;
        }
        y
    }

    /// xᵀ A x
    pub fn quadratic_form(&self, x: &[S]) -> S {
        let ax = self.mul_vec(x);
        x.iter().zip(&ax).map(|(a, b)| *a * *b).sum()
    }

    /// Maximum absolute row sum deviation from zero, |A·1|_inf.
    pub fn row_sum_sup(&self) -> S {
        let ones = vec![S::one(); self.n];
        self.mul_vec(&ones)
            .into_iter()
            .fold(S::zero(), |m, v| m.max(v.abs()))
    }

    /// Reduces an N×N matrix to the (N-1)-dimensional coordinates of the
    /// zero-sum subspace with basis vectors e_i - e_N.
    pub fn reduce_to_zero_sum(&self) -> DenseMatrix<S> {
        let n = self.n;
        assert!(n >= 2);
        let m = n - 1;
        let mut out = DenseMatrix::zeros(m);
        let hnn = self.get(n - 1, n - 1);
        for i in 0..m {
            for j in 0..m {
                let v = self.get(i, j) - self.get(i, n - 1) - self.get(n - 1, j) + hnn;
                out.set(i, j, v);
            }
        }
        out
    }

    fn cholesky(&self) -> Option<Vec<S>> {
        let n = self.n;
        let mut l = vec![S::zero(); n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self.get(i, j);
                for k in 0..j {
                    sum = sum - l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if sum <= S::zero() || !sum.is_finite() {
                        return None;
                    }
                    l[i * n + i] = sum.sqrt();
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Some(l)
    }

    /// Solves A x = b for symmetric positive definite A via Cholesky.
    pub fn cholesky_solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let l = self.cholesky()?;
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let lik = l[i * n + k];
                y[i] = y[i] - lik * y[k];
            }
            y[i] = y[i] / l[i * n + i];
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let lki = l[k * n + i];
                y[i] = y[i] - lki * y[k];
            }
            y[i] = y[i] / l[i * n + i];
        }
        Some(y)
    }

    /// Cholesky solve with a single Tikhonov retry: on failure adds
    /// `scale * trace(A)/n` to the diagonal and tries once more.
    pub fn solve_spd_regularized(&self, b: &[S], scale: S) -> Result<Vec<S>> {
        if let Some(x) = self.cholesky_solve(b) {
            return Ok(x);
        }
        let lambda = scale * self.trace() / S::from_usize(self.n).unwrap();
        let mut reg = self.clone();
        for i in 0..self.n {
            reg.add_to(i, i, lambda);
        }
        reg.cholesky_solve(b).ok_or(Error::SingularSystem)
    }
}

/// Expands reduced zero-sum coordinates back to R^N: last entry is minus the
/// sum of the rest, so the result sums to zero by construction.
pub fn expand_zero_sum<S: Scalar>(reduced: &[S]) -> Vec<S> {
    let mut out = Vec::with_capacity(reduced.len() + 1);
    let mut sum = S::zero();
    for &v in reduced {
        out.push(v);
        sum = sum + v;
    }
    out.push(-sum);
    out
}

/// Projects a full vector to the reduced coordinates: (v_i - v_N).
pub fn reduce_zero_sum<S: Scalar>(v: &[S]) -> Vec<S> {
    let n = v.len();
    assert!(n >= 2);
    let last = v[n - 1];
    v[..n - 1].iter().map(|&x| x - last).collect()
}
