use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::dataset::Class;

/// Binary confusion counts, CAD (+1) being the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn correct(&self) -> u64 {
        self.tp + self.tn
    }

    pub fn record(&mut self, truth: Class, predicted: Class) {
        match (truth, predicted) {
            (Class::Positive, Class::Positive) => self.tp += 1,
            (Class::Negative, Class::Positive) => self.fp += 1,
            (Class::Positive, Class::Negative) => self.fn_ += 1,
            (Class::Negative, Class::Negative) => self.tn += 1,
        }
    }
}

impl std::ops::Add for ConfusionMatrix {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            tn: self.tn + o.tn,
        }
    }
}

pub fn confusion(y_true: &[Class], y_pred: &[Class]) -> Result<ConfusionMatrix, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        cm.record(t, p);
    }
    Ok(cm)
}

/// Scalar metrics of a confusion matrix. A ratio whose denominator is zero is
/// reported as 0 and its name is listed in `degenerate`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub ppv: f64,
    pub recall: f64,
    pub specificity: f64,
    pub f_measure: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degenerate: Vec<String>,
}

impl Metrics {
    /// Values in report order: accuracy, ppv, f-measure, recall, specificity.
    pub fn as_row(&self) -> [f64; 5] {
        [
            self.accuracy,
            self.ppv,
            self.f_measure,
            self.recall,
            self.specificity,
        ]
    }
}

pub fn metrics(cm: &ConfusionMatrix) -> Result<Metrics, EvalError> {
    if cm.total() == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let mut degenerate = Vec::new();
    let mut ratio = |name: &str, num: u64, den: u64| {
        if den == 0 {
            degenerate.push(name.to_string());
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let accuracy = ratio("accuracy", cm.tp + cm.tn, cm.total());
    let ppv = ratio("ppv", cm.tp, cm.tp + cm.fp);
    let recall = ratio("recall", cm.tp, cm.tp + cm.fn_);
    let specificity = ratio("specificity", cm.tn, cm.tn + cm.fp);
    let f_measure = if ppv + recall > 0.0 {
        2.0 * ppv * recall / (ppv + recall)
    } else {
        degenerate.push("f_measure".to_string());
        0.0
    };
    Ok(Metrics {
        accuracy,
        ppv,
        recall,
        specificity,
        f_measure,
        degenerate,
    })
}

/// Element-wise mean of metric sets; `degenerate` collects every name seen.
pub fn mean_metrics(all: &[Metrics]) -> Metrics {
    let n = all.len().max(1) as f64;
    let mean = |f: fn(&Metrics) -> f64| all.iter().map(f).sum::<f64>() / n;
    let mut degenerate: Vec<String> = all.iter().flat_map(|m| m.degenerate.clone()).collect();
    degenerate.sort();
    degenerate.dedup();
    Metrics {
        accuracy: mean(|m| m.accuracy),
        ppv: mean(|m| m.ppv),
        recall: mean(|m| m.recall),
        specificity: mean(|m| m.specificity),
        f_measure: mean(|m| m.f_measure),
        degenerate,
    }
}
