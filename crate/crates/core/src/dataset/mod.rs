//! Tabular ingestion: CSV parsing against a schema, nominal encoding, min-max
//! normalization and stratified fold planning.

mod csv_io;
mod encode;
mod folds;
mod normalize;
pub mod schema;
mod synth;

pub use csv_io::{parse_csv, write_encoded_csv};
pub use encode::{encode, ColumnKind, ColumnMeta, EncodedDataset};
pub use folds::{stratified_kfold, FoldPlan};
pub use normalize::{normalize, NormalizePolicy, Scaler};
pub use schema::{FeatureKind, FeatureSpec, RawSchema, TargetSpec};
pub use synth::{synth_generate, SynthConfig, SynthDataset};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid schema: {0}")]
    Schema(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("column `{0}` declared in schema is missing from the header")]
    MissingColumn(String),
    #[error("header column `{0}` is not declared in the schema")]
    UnknownColumn(String),
    #[error("line {line}: missing value in column `{column}`")]
    MissingValue { line: u64, column: String },
    #[error("line {line}: column `{column}` has illegal value `{value}`")]
    IllegalNominalValue {
        line: u64,
        column: String,
        value: String,
    },
    #[error("line {line}: column `{column}` expects a number, found `{value}`")]
    NonNumericCell {
        line: u64,
        column: String,
        value: String,
    },
    #[error("line {line}: expected {expected} cells, found {found}")]
    RowLength {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("normalization fit set is empty")]
    EmptyFitSet,
    #[error("cannot plan {k} folds over {n} samples")]
    TooFewSamples { n: usize, k: usize },
    #[error("fold count must be at least 2, got {0}")]
    InvalidFoldCount(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Binary class label. CAD is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    Negative,
    Positive,
}

impl Class {
    pub fn from_sign<T: Scalar>(v: T) -> Self {
        if v >= T::zero() {
            Class::Positive
        } else {
            Class::Negative
        }
    }

    /// +1 for positive, -1 for negative.
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            Class::Positive => T::one(),
            Class::Negative => -T::one(),
        }
    }

    pub fn is_positive(self) -> bool {
        self == Class::Positive
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawCell {
    Number(f64),
    Text(String),
}

/// Schema-validated rows, cells in schema feature order.
#[derive(Debug, Clone)]
pub struct RawDataset {
    pub schema: RawSchema,
    pub records: Vec<Vec<RawCell>>,
    pub labels: Vec<Class>,
}

impl RawDataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn count(&self, class: Class) -> usize {
        self.labels.iter().filter(|&&c| c == class).count()
    }

    pub fn cell(&self, row: usize, feature: &str) -> Option<&RawCell> {
        let j = self
            .schema
            .features
            .iter()
            .position(|f| f.name == feature)?;
        self.records.get(row).map(|r| &r[j])
    }
}
