use serde::{Deserialize, Serialize};

use super::{Class, FeatureKind, FeatureSpec, RawCell, RawDataset, Scaler};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    /// 0 for `zero`, 1 for `one`.
    Binary {
        zero: String,
        one: String,
    },
    /// Indicator of `value`; `values` lists every level of the source feature.
    OneHot {
        value: String,
        values: Vec<String>,
    },
}

/// Provenance of one encoded column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMeta {
    pub source: String,
    #[serde(flatten)]
    pub kind: ColumnKind,
}

impl ColumnMeta {
    pub fn numeric(source: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            kind: ColumnKind::Numeric,
        }
    }

    /// Generated column name: the source name, or `Source=value` for one-hot columns.
    pub fn name(&self) -> String {
        match &self.kind {
            ColumnKind::OneHot { value, .. } => format!("{}={}", self.source, value),
            _ => self.source.clone(),
        }
    }
}

/// Numeric feature matrix with column provenance and binary labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EncodedDataset<T> {
    pub matrix: Matrix<T>,
    pub columns: Vec<ColumnMeta>,
    pub labels: Vec<Class>,
    pub scaler: Option<Scaler<T>>,
}

impl<T: Scalar> EncodedDataset<T> {
    /// Wraps an all-numeric matrix. Column names default to `x0, x1, ...` when `names` is `None`.
    pub fn from_numeric(matrix: Matrix<T>, labels: Vec<Class>, names: Option<Vec<String>>) -> Self {
        assert_eq!(matrix.n_rows(), labels.len(), "one label per row");
        let names =
            names.unwrap_or_else(|| (0..matrix.n_cols()).map(|j| format!("x{j}")).collect());
        assert_eq!(names.len(), matrix.n_cols(), "one name per column");
        Self {
            matrix,
            columns: names.into_iter().map(ColumnMeta::numeric).collect(),
            labels,
            scaler: None,
        }
    }

    pub fn n_samples(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn n_columns(&self) -> usize {
        self.matrix.n_cols()
    }

    pub fn column_names(&self) -> Vec<String> {
        self.columns.iter().map(ColumnMeta::name).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name() == name)
    }

    /// Indices of all encoded columns derived from a source feature.
    pub fn columns_of(&self, source: &str) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.source == source)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn count(&self, class: Class) -> usize {
        self.labels.iter().filter(|&&c| c == class).count()
    }

    /// Reconstructs the source feature list from column metadata, in column order.
    pub fn source_features(&self) -> Vec<FeatureSpec> {
        let mut out: Vec<FeatureSpec> = Vec::new();
        for c in &self.columns {
            if out.last().is_some_and(|f| f.name == c.source) {
                continue;
            }
            let kind = match &c.kind {
                ColumnKind::Numeric => FeatureKind::Numeric,
                ColumnKind::Binary { zero, one } => FeatureKind::Binary {
                    values: [zero.clone(), one.clone()],
                },
                ColumnKind::OneHot { values, .. } => FeatureKind::Nominal {
                    values: values.clone(),
                },
            };
            out.push(FeatureSpec {
                name: c.source.clone(),
                kind,
            });
        }
        out
    }
}

/// Maps a validated raw dataset to numbers: binary nominals to {0, 1},
/// multi-valued nominals to one-hot blocks, numeric features unchanged.
/// The result is not normalized.
pub fn encode<T: Scalar>(raw: &RawDataset) -> EncodedDataset<T> {
    let mut columns = Vec::new();
    for f in &raw.schema.features {
        match &f.kind {
            FeatureKind::Numeric => columns.push(ColumnMeta::numeric(&f.name)),
            FeatureKind::Binary { values } => columns.push(ColumnMeta {
                source: f.name.clone(),
                kind: ColumnKind::Binary {
                    zero: values[0].clone(),
                    one: values[1].clone(),
                },
            }),
            FeatureKind::Nominal { values } => {
                columns.extend(values.iter().map(|v| ColumnMeta {
                    source: f.name.clone(),
                    kind: ColumnKind::OneHot {
                        value: v.clone(),
                        values: values.clone(),
                    },
                }));
            }
        }
    }

    let n_cols = columns.len();
    let mut matrix = Matrix::zeros(raw.len(), n_cols);
    for (i, record) in raw.records.iter().enumerate() {
        let out = matrix.row_mut(i);
        let mut j = 0;
        for (f, cell) in raw.schema.features.iter().zip(record) {
            match (&f.kind, cell) {
                (FeatureKind::Numeric, RawCell::Number(v)) => {
                    out[j] = T::lit(*v);
                    j += 1;
                }
                (FeatureKind::Binary { values }, RawCell::Text(s)) => {
                    out[j] = if *s == values[1] { T::one() } else { T::zero() };
                    j += 1;
                }
                (FeatureKind::Nominal { values }, RawCell::Text(s)) => {
                    for v in values {
                        out[j] = if v == s { T::one() } else { T::zero() };
                        j += 1;
                    }
                }
                _ => unreachable!("raw dataset cells are schema-validated"),
            }
        }
    }

    EncodedDataset {
        matrix,
        columns,
        labels: raw.labels.clone(),
        scaler: None,
    }
}
