//! Kernel functions and Gram matrices.
//!
//! | family       | k(x, y)                                  |
//! |--------------|------------------------------------------|
//! | `Linear`     | `<x, y>`                                 |
//! | `Polynomial` | `(1 + <x, y>)^d`                         |
//! | `Rbf`        | `exp(-gamma * ||x - y||^2)`              |
//! | `Anova`      | `sum_k exp(-sigma * (x_k - y_k)^2)^d`    |
//!
//! The ANOVA exponent is applied to each term of the sum, so
//! `Anova(sigma, d)` equals `Anova(d * sigma, 1)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid kernel parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", bound = "T: Scalar")]
pub enum KernelSpec<T> {
    Linear,
    Polynomial { degree: u32 },
    Rbf { gamma: T },
    Anova { sigma: T, degree: u32 },
}

impl<T: Scalar> KernelSpec<T> {
    pub fn polynomial(degree: u32) -> Result<Self, KernelError> {
        Self::Polynomial { degree }.validated()
    }

    pub fn rbf(gamma: T) -> Result<Self, KernelError> {
        Self::Rbf { gamma }.validated()
    }

    pub fn anova(sigma: T, degree: u32) -> Result<Self, KernelError> {
        Self::Anova { sigma, degree }.validated()
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Polynomial { .. } => "polynomial",
            Self::Rbf { .. } => "rbf",
            Self::Anova { .. } => "anova",
        }
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(KernelError::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        let degree_ok = |d: u32| {
            if d >= 1 {
                Ok(())
            } else {
                Err(KernelError::InvalidParameter("degree must be >= 1".into()))
            }
        };
        match *self {
            Self::Linear => Ok(()),
            Self::Polynomial { degree } => degree_ok(degree),
            Self::Rbf { gamma } => positive("gamma", gamma),
            Self::Anova { sigma, degree } => {
                positive("sigma", sigma)?;
                degree_ok(degree)
            }
        }
    }

    fn validated(self) -> Result<Self, KernelError> {
        self.validate().map(|_| self)
    }

    /// Evaluates the kernel without checking dimensions; extra trailing
    /// elements of the longer slice are ignored.
    #[inline]
    pub fn eval_unchecked(&self, x: &[T], y: &[T]) -> T {
        match *self {
            Self::Linear => dot(x, y),
            Self::Polynomial { degree } => (T::one() + dot(x, y)).powi(degree as i32),
            Self::Rbf { gamma } => {
                let d2: T = x.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum();
                (-gamma * d2).exp()
            }
            Self::Anova { sigma, degree } => x
                .iter()
                .zip(y)
                .map(|(&a, &b)| (-sigma * (a - b) * (a - b)).exp().powi(degree as i32))
                .sum(),
        }
    }

    pub fn eval(&self, x: &[T], y: &[T]) -> Result<T, KernelError> {
        if x.len() != y.len() {
            return Err(KernelError::DimensionMismatch(x.len(), y.len()));
        }
        Ok(self.eval_unchecked(x, y))
    }
}

#[inline]
fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(&a, &b)| a * b).sum()
}

/// `kernel_eval` in free-function form.
pub fn kernel_eval<T: Scalar>(spec: &KernelSpec<T>, x: &[T], y: &[T]) -> Result<T, KernelError> {
    spec.eval(x, y)
}

/// Full Gram matrix over the rows of `rows`. Each unordered pair is evaluated
/// once and mirrored, so the result is exactly symmetric.
pub fn gram<T: Scalar>(spec: &KernelSpec<T>, rows: &Matrix<T>) -> Matrix<T> {
    let n = rows.n_rows();
    let upper: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = rows.row(i);
            (i..n)
                .map(|j| spec.eval_unchecked(xi, rows.row(j)))
                .collect()
        })
        .collect();
    let mut g = Matrix::zeros(n, n);
    for (i, tail) in upper.into_iter().enumerate() {
        for (off, v) in tail.into_iter().enumerate() {
            g.set(i, i + off, v);
            g.set(i + off, i, v);
        }
    }
    g
}
