use serde::{Deserialize, Serialize};

use super::{DatasetError, EncodedDataset};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizePolicy {
    /// Min/max over every row, before any split.
    Global,
    /// Min/max over the training rows of each fold only.
    #[default]
    PerFold,
    /// Leave values as encoded.
    None,
}

/// Per-column min-max scaler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Scaler<T> {
    pub mins: Vec<T>,
    pub maxs: Vec<T>,
}

impl<T: Scalar> Scaler<T> {
    /// Fits column ranges over `rows` of `matrix`.
    pub fn fit(matrix: &Matrix<T>, rows: &[usize]) -> Result<Self, DatasetError> {
        let (&first, rest) = rows.split_first().ok_or(DatasetError::EmptyFitSet)?;
        let mut mins = matrix.row(first).to_vec();
        let mut maxs = mins.clone();
        for &i in rest {
            for (j, &v) in matrix.row(i).iter().enumerate() {
                if v < mins[j] {
                    mins[j] = v;
                }
                if v > maxs[j] {
                    maxs[j] = v;
                }
            }
        }
        Ok(Self { mins, maxs })
    }

    /// `(x - min) / (max - min)`; constant columns map to 0.
    pub fn transform_row(&self, row: &mut [T]) {
        for ((v, &lo), &hi) in row.iter_mut().zip(&self.mins).zip(&self.maxs) {
            let span = hi - lo;
            *v = if span > T::zero() {
                (*v - lo) / span
            } else {
                T::zero()
            };
        }
    }

    pub fn transform(&self, matrix: &Matrix<T>) -> Matrix<T> {
        let mut out = matrix.clone();
        for i in 0..out.n_rows() {
            self.transform_row(out.row_mut(i));
        }
        out
    }
}

/// Min-max scales every column of `data` to [0, 1].
///
/// With [`NormalizePolicy::Global`] the ranges come from all rows and `fit_rows` is
/// ignored. With [`NormalizePolicy::PerFold`] they come from `fit_rows` only and are
/// then applied to every row, so rows outside the fit set may fall outside [0, 1].
/// [`NormalizePolicy::None`] returns the data unchanged.
pub fn normalize<T: Scalar>(
    data: &EncodedDataset<T>,
    policy: NormalizePolicy,
    fit_rows: Option<&[usize]>,
) -> Result<EncodedDataset<T>, DatasetError> {
    let all: Vec<usize>;
    let rows = match policy {
        NormalizePolicy::None => return Ok(data.clone()),
        NormalizePolicy::Global => {
            all = (0..data.n_samples()).collect();
            &all[..]
        }
        NormalizePolicy::PerFold => fit_rows.unwrap_or(&[]),
    };
    let scaler = Scaler::fit(&data.matrix, rows)?;
    Ok(EncodedDataset {
        matrix: scaler.transform(&data.matrix),
        columns: data.columns.clone(),
        labels: data.labels.clone(),
        scaler: Some(scaler),
    })
}
