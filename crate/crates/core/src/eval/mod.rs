//! Classification metrics, ROC analysis and cross-validated evaluation.

mod cv;
mod metrics;
mod report;
mod roc;

pub use cv::{cross_validate, fold_decisions, mask_columns, FoldOutcome};
pub use metrics::{confusion, mean_metrics, metrics, ConfusionMatrix, Metrics};
pub use report::{EvalReport, FoldReport, REPORT_SCHEMA_VERSION, TABLE_HEADER};
pub use roc::{auc, roc_curve, RocPoint};

use thiserror::Error;

use crate::dataset::DatasetError;
use crate::svm::SvmError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    EmptyInput,
    #[error("confusion matrix has no samples")]
    EmptyMatrix,
    #[error("ROC needs both classes among the labels")]
    SingleClassInput,
    #[error("feature mask selects no columns")]
    EmptyMask,
    #[error("fold plan covers {plan} samples but the dataset has {data}")]
    FoldMismatch { plan: usize, data: usize },
    #[error("fold {fold}: {source}")]
    Training {
        fold: usize,
        #[source]
        source: SvmError,
    },
    #[error("fold {fold}: {source}")]
    Normalization {
        fold: usize,
        #[source]
        source: DatasetError,
    },
    #[error("report schema version {found} is not supported (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("malformed report: {0}")]
    Json(String),
}
