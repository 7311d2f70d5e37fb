use rayon::prelude::*;

use super::{
    auc, mean_metrics, metrics, roc_curve, ConfusionMatrix, EvalError, EvalReport, FoldReport,
    REPORT_SCHEMA_VERSION,
};
use crate::dataset::{Class, EncodedDataset, FoldPlan, NormalizePolicy, Scaler};
use crate::scalar::Scalar;
use crate::svm::{train, SvmConfig};

/// Held-out decision values for every sample plus per-fold bookkeeping.
#[derive(Debug, Clone)]
pub struct FoldOutcome<T> {
    /// Decision value of each sample from the model that did not see it.
    pub decision: Vec<T>,
    pub fold_confusions: Vec<ConfusionMatrix>,
    /// Folds whose solver exhausted its update budget.
    pub unconverged: Vec<usize>,
}

impl<T: Scalar> FoldOutcome<T> {
    pub fn pooled(&self) -> ConfusionMatrix {
        self.fold_confusions
            .iter()
            .fold(ConfusionMatrix::default(), |a, &b| a + b)
    }

    /// Fraction of samples classified correctly across all folds.
    pub fn accuracy(&self) -> f64 {
        let p = self.pooled();
        p.correct() as f64 / p.total() as f64
    }
}

/// Indices of the set bits of `mask`.
pub fn mask_columns(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter(|(_, &on)| on)
        .map(|(j, _)| j)
        .collect()
}

/// Trains one model per fold on the selected `columns` and scores the held-out rows.
///
/// Folds run in parallel; results are assembled by fold index and the first
/// failing fold (by index) is reported.
pub fn fold_decisions<T: Scalar>(
    data: &EncodedDataset<T>,
    columns: &[usize],
    folds: &FoldPlan,
    svm: &SvmConfig<T>,
    policy: NormalizePolicy,
) -> Result<FoldOutcome<T>, EvalError> {
    if columns.is_empty() {
        return Err(EvalError::EmptyMask);
    }
    if folds.n_samples() != data.n_samples() {
        return Err(EvalError::FoldMismatch {
            plan: folds.n_samples(),
            data: data.n_samples(),
        });
    }
    let all_rows: Vec<usize> = (0..data.n_samples()).collect();
    let selected = data.matrix.select(&all_rows, columns);
    let global = match policy {
        NormalizePolicy::Global => Some(
            Scaler::fit(&selected, &all_rows)
                .map_err(|source| EvalError::Normalization { fold: 0, source })?,
        ),
        _ => None,
    };
    let all_cols: Vec<usize> = (0..columns.len()).collect();

    let per_fold: Vec<Result<_, EvalError>> = (0..folds.k)
        .into_par_iter()
        .map(|fold| {
            let train_rows = folds.train_rows(fold);
            let test_rows = folds.test_rows(fold);
            let mut x_train = selected.select(&train_rows, &all_cols);
            let mut x_test = selected.select(&test_rows, &all_cols);
            let scaler = match policy {
                NormalizePolicy::Global => global.clone(),
                NormalizePolicy::PerFold => Some(
                    Scaler::fit(&x_train, &(0..train_rows.len()).collect::<Vec<_>>())
                        .map_err(|source| EvalError::Normalization { fold, source })?,
                ),
                NormalizePolicy::None => None,
            };
            if let Some(s) = &scaler {
                x_train = s.transform(&x_train);
                x_test = s.transform(&x_test);
            }
            let y_train: Vec<Class> = train_rows.iter().map(|&i| data.labels[i]).collect();
            let model = train(&x_train, &y_train, svm)
                .map_err(|source| EvalError::Training { fold, source })?;
            let scores = model
                .decision_values(&x_test)
                .map_err(|source| EvalError::Training { fold, source })?;
            let mut cm = ConfusionMatrix::default();
            for (&i, &s) in test_rows.iter().zip(&scores) {
                cm.record(data.labels[i], Class::from_sign(s));
            }
            Ok((test_rows, scores, cm, model.convergence.converged))
        })
        .collect();

    let mut decision = vec![T::zero(); data.n_samples()];
    let mut fold_confusions = Vec::with_capacity(folds.k);
    let mut unconverged = Vec::new();
    for (fold, result) in per_fold.into_iter().enumerate() {
        let (rows, scores, cm, converged) = result?;
        for (i, s) in rows.into_iter().zip(scores) {
            decision[i] = s;
        }
        fold_confusions.push(cm);
        if !converged {
            unconverged.push(fold);
        }
    }
    Ok(FoldOutcome {
        decision,
        fold_confusions,
        unconverged,
    })
}

/// Full cross-validated evaluation of the columns selected by `mask`.
pub fn cross_validate<T: Scalar>(
    data: &EncodedDataset<T>,
    mask: &[bool],
    folds: &FoldPlan,
    svm: &SvmConfig<T>,
    policy: NormalizePolicy,
) -> Result<EvalReport, EvalError> {
    if mask.len() != data.n_columns() {
        return Err(EvalError::LengthMismatch(mask.len(), data.n_columns()));
    }
    let columns = mask_columns(mask);
    let outcome = fold_decisions(data, &columns, folds, svm, policy)?;

    let mut fold_reports = Vec::with_capacity(folds.k);
    for (fold, cm) in outcome.fold_confusions.iter().enumerate() {
        fold_reports.push(FoldReport {
            fold,
            n_test: cm.total() as usize,
            confusion: *cm,
            metrics: metrics(cm)?,
        });
    }
    let pooled = outcome.pooled();
    let per_fold_metrics: Vec<_> = fold_reports.iter().map(|f| f.metrics.clone()).collect();
    let roc = roc_curve(&data.labels, &outcome.decision)?;
    let names = data.column_names();

    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        method: String::new(),
        seed: folds.seed,
        k: folds.k,
        normalize: policy,
        svm: serde_json::to_value(svm).expect("svm config serializes"),
        columns: columns.iter().map(|&j| names[j].clone()).collect(),
        n_samples: data.n_samples(),
        micro: metrics(&pooled)?,
        macro_avg: mean_metrics(&per_fold_metrics),
        pooled,
        folds: fold_reports,
        auc: auc(&roc),
        roc,
        unconverged_folds: outcome.unconverged,
    })
}
