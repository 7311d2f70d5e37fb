use serde::{Deserialize, Serialize};

use super::{ConfusionMatrix, EvalError, Metrics, RocPoint};
use crate::dataset::NormalizePolicy;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Column order of the comparison table.
pub const TABLE_HEADER: [&str; 7] = [
    "Method",
    "ACC",
    "PPV",
    "F-measure",
    "Recall",
    "Specificity",
    "AUC",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub n_test: usize,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
}

/// Result of one cross-validated evaluation.
///
/// `micro` metrics come from the pooled confusion counts and are the headline
/// numbers; `macro` metrics are the mean of the per-fold values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub method: String,
    /// Seed of the fold plan.
    pub seed: u64,
    pub k: usize,
    pub normalize: NormalizePolicy,
    pub svm: serde_json::Value,
    /// Encoded columns the models were trained on.
    pub columns: Vec<String>,
    pub n_samples: usize,
    pub folds: Vec<FoldReport>,
    pub pooled: ConfusionMatrix,
    pub micro: Metrics,
    #[serde(rename = "macro")]
    pub macro_avg: Metrics,
    pub roc: Vec<RocPoint>,
    pub auc: f64,
    pub unconverged_folds: Vec<usize>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Parses a report, rejecting unknown schema versions before anything else.
    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| EvalError::Json(e.to_string()))?;
        let found = value
            .get("schema_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| EvalError::Json("missing schema_version".into()))?;
        if found != u64::from(REPORT_SCHEMA_VERSION) {
            return Err(EvalError::SchemaVersion {
                found: found as u32,
                expected: REPORT_SCHEMA_VERSION,
            });
        }
        serde_json::from_value(value).map_err(|e| EvalError::Json(e.to_string()))
    }

    /// One comparison-table row: method name then percentages with two decimals.
    pub fn table_row(&self) -> [String; 7] {
        let m = self.micro.as_row();
        let pct = |v: f64| format!("{:.2}", 100.0 * v);
        [
            self.method.clone(),
            pct(m[0]),
            pct(m[1]),
            pct(m[2]),
            pct(m[3]),
            pct(m[4]),
            pct(self.auc),
        ]
    }

    /// Header plus [`EvalReport::table_row`] as CSV text.
    pub fn table_csv(&self) -> String {
        format!(
            "{}\n{}\n",
            TABLE_HEADER.join(","),
            self.table_row().join(",")
        )
    }
}
