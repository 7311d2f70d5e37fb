use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use super::GaError;
use crate::dataset::{EncodedDataset, FoldPlan, NormalizePolicy};
use crate::eval::{fold_decisions, mask_columns, EvalError};
use crate::scalar::Scalar;
use crate::svm::SvmConfig;

/// Pooled cross-validated accuracy of an SVM on the encoded columns set in `mask`.
pub fn fitness_eval<T: Scalar>(
    mask: &[bool],
    data: &EncodedDataset<T>,
    folds: &FoldPlan,
    svm: &SvmConfig<T>,
    policy: NormalizePolicy,
) -> Result<f64, EvalError> {
    if mask.len() != data.n_columns() {
        return Err(EvalError::LengthMismatch(mask.len(), data.n_columns()));
    }
    fold_decisions(data, &mask_columns(mask), folds, svm, policy).map(|o| o.accuracy())
}

/// Memoizing fitness function over gene masks for one GA run.
pub struct FitnessEvaluator<'a, T: Scalar> {
    data: &'a EncodedDataset<T>,
    gene_columns: Vec<Vec<usize>>,
    folds: FoldPlan,
    svm: SvmConfig<T>,
    policy: NormalizePolicy,
    cache: Option<Mutex<HashMap<Vec<bool>, f64>>>,
    evaluations: AtomicU64,
    hits: AtomicU64,
}

impl<'a, T: Scalar> FitnessEvaluator<'a, T> {
    pub fn new(
        data: &'a EncodedDataset<T>,
        gene_columns: Vec<Vec<usize>>,
        folds: FoldPlan,
        svm: SvmConfig<T>,
        policy: NormalizePolicy,
        cache: bool,
    ) -> Self {
        Self {
            data,
            gene_columns,
            folds,
            svm,
            policy,
            cache: cache.then(|| Mutex::new(HashMap::new())),
            evaluations: AtomicU64::new(0),
            hits: AtomicU64::new(0),
        }
    }

    pub fn n_genes(&self) -> usize {
        self.gene_columns.len()
    }

    pub fn folds(&self) -> &FoldPlan {
        &self.folds
    }

    /// Sorted encoded columns switched on by a gene mask.
    pub fn columns(&self, mask: &[bool]) -> Vec<usize> {
        let mut cols: Vec<usize> = mask
            .iter()
            .zip(&self.gene_columns)
            .filter(|(&on, _)| on)
            .flat_map(|(_, c)| c.iter().copied())
            .collect();
        cols.sort_unstable();
        cols.dedup();
        cols
    }

    pub fn column_names(&self, mask: &[bool]) -> Vec<String> {
        let names = self.data.column_names();
        self.columns(mask)
            .into_iter()
            .map(|j| names[j].clone())
            .collect()
    }

    fn compute(&self, mask: &[bool]) -> Result<f64, GaError> {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let cols = self.columns(mask);
        fold_decisions(self.data, &cols, &self.folds, &self.svm, self.policy)
            .map(|o| o.accuracy())
            .map_err(|source| GaError::Fitness {
                columns: self.column_names(mask),
                source,
            })
    }

    fn lookup(&self, mask: &[bool]) -> Option<f64> {
        self.cache
            .as_ref()
            .and_then(|c| c.lock().expect("cache lock").get(mask).copied())
    }

    fn store(&self, mask: &[bool], value: f64) {
        if let Some(c) = &self.cache {
            c.lock().expect("cache lock").insert(mask.to_vec(), value);
        }
    }

    /// Fitness of one mask and whether it came from the cache.
    pub fn evaluate(&self, mask: &[bool]) -> Result<(f64, bool), GaError> {
        if let Some(v) = self.lookup(mask) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok((v, true));
        }
        let v = self.compute(mask)?;
        self.store(mask, v);
        Ok((v, false))
    }

    /// Fitness of every mask, in order.
    ///
    /// Cache lookups and deduplication happen sequentially before the parallel
    /// evaluation, so hit counts and results do not depend on scheduling.
    pub fn evaluate_all(&self, masks: &[&[bool]]) -> Result<Vec<f64>, GaError> {
        let mut out: Vec<Option<f64>> = vec![None; masks.len()];
        let mut pending: Vec<&[bool]> = Vec::new();
        let mut pending_of: Vec<usize> = vec![usize::MAX; masks.len()];
        for (i, m) in masks.iter().enumerate() {
            if let Some(v) = self.lookup(m) {
                self.hits.fetch_add(1, Ordering::Relaxed);
                out[i] = Some(v);
            } else if self.cache.is_some() {
                match pending.iter().position(|p| p == m) {
                    Some(k) => {
                        self.hits.fetch_add(1, Ordering::Relaxed);
                        pending_of[i] = k;
                    }
                    None => {
                        pending_of[i] = pending.len();
                        pending.push(m);
                    }
                }
            } else {
                pending_of[i] = pending.len();
                pending.push(m);
            }
        }

        let computed: Vec<Result<f64, GaError>> =
            pending.par_iter().map(|m| self.compute(m)).collect();
        let mut values = Vec::with_capacity(computed.len());
        for (m, r) in pending.iter().zip(computed) {
            let v = r?;
            self.store(m, v);
            values.push(v);
        }
        Ok(out
            .into_iter()
            .zip(pending_of)
            .map(|(v, k)| v.unwrap_or_else(|| values[k]))
            .collect())
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    pub fn cache_hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }
}
