use serde::{Deserialize, Serialize};

use super::{SvmConfig, SvmError, SvmModel};
use crate::dataset::Class;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct KktReport<T> {
    /// Worst violation over the box constraints and the per-point margin conditions.
    pub max_violation: T,
    /// `|sum_i alpha_i y_i|`.
    pub equality_residual: T,
    /// Index of the training point with the worst violation.
    pub worst_index: usize,
}

/// Checks the optimality conditions of `model` on its training data.
///
/// With `m_i = y_i f(x_i)`:
/// `alpha = 0 => m_i >= 1`, `0 < alpha < C => m_i = 1`, `alpha = C => m_i <= 1`.
/// Violations are measured as the distance from `m_i` to the allowed range;
/// dual variables outside `[0, C]` count by how far they lie outside.
pub fn check_kkt<T: Scalar>(
    model: &SvmModel<T>,
    rows: &Matrix<T>,
    labels: &[Class],
    config: &SvmConfig<T>,
) -> Result<KktReport<T>, SvmError> {
    let n = rows.n_rows();
    if labels.len() != n || model.n_train != n {
        return Err(SvmError::DimensionMismatch {
            expected: model.n_train,
            found: n.min(labels.len()),
        });
    }
    let c = config.c;
    let mut alpha = vec![T::zero(); n];
    for (&i, &coef) in model.sv_indices.iter().zip(&model.coeffs) {
        alpha[i] = coef * labels[i].sign::<T>();
    }

    let mut worst = T::zero();
    let mut worst_index = 0;
    let mut residual = T::zero();
    for i in 0..n {
        let y: T = labels[i].sign();
        residual += alpha[i] * y;
        let margin = y * model.decision_value(rows.row(i))?;
        let one = T::one();
        let a = alpha[i];
        let v = if a < T::zero() || a > c {
            (-a).max(a - c)
        } else if a == T::zero() {
            (one - margin).max(T::zero())
        } else if a == c {
            (margin - one).max(T::zero())
        } else {
            (margin - one).abs()
        };
        if v > worst {
            worst = v;
            worst_index = i;
        }
    }
    Ok(KktReport {
        max_violation: worst,
        equality_residual: residual.abs(),
        worst_index,
    })
}

/// `sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j G_ij`.
pub fn dual_objective<T: Scalar>(
    alphas: &[T],
    labels: &[Class],
    gram: &Matrix<T>,
) -> Result<T, SvmError> {
    let n = alphas.len();
    if labels.len() != n || gram.n_rows() != n || gram.n_cols() != n {
        return Err(SvmError::DimensionMismatch {
            expected: n,
            found: if labels.len() != n {
                labels.len()
            } else {
                gram.n_rows()
            },
        });
    }
    let ya: Vec<T> = alphas
        .iter()
        .zip(labels)
        .map(|(&a, l)| a * l.sign::<T>())
        .collect();
    let mut quad = T::zero();
    for i in 0..n {
        let gi = gram.row(i);
        let inner: T = gi.iter().zip(&ya).map(|(&g, &v)| g * v).sum();
        quad += ya[i] * inner;
    }
    Ok(alphas.iter().copied().sum::<T>() - quad / T::lit(2.0))
}
