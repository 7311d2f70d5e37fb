use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Class, DatasetError};

/// Assignment of every sample to one of `k` cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn n_samples(&self) -> usize {
        self.assignments.len()
    }

    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        self.rows_where(|f| f == fold)
    }

    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        self.rows_where(|f| f != fold)
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    fn rows_where(&self, pred: impl Fn(usize) -> bool) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|&(_, &f)| pred(f))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Stratified k-fold assignment.
///
/// Each class is shuffled independently, then the classes are laid end to end
/// (positives first) and dealt round-robin. Dealing one contiguous sequence keeps
/// both the per-class counts and the overall fold sizes within one of each other.
pub fn stratified_kfold(labels: &[Class], k: usize, seed: u64) -> Result<FoldPlan, DatasetError> {
    if k < 2 {
        return Err(DatasetError::InvalidFoldCount(k));
    }
    let n = labels.len();
    if n < k {
        return Err(DatasetError::TooFewSamples { n, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order = Vec::with_capacity(n);
    for class in [Class::Positive, Class::Negative] {
        let mut idx: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        order.extend(idx);
    }
    let mut assignments = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(FoldPlan {
        k,
        assignments,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels(pos: usize, neg: usize) -> Vec<Class> {
        let mut v = vec![Class::Positive; pos];
        v.extend(vec![Class::Negative; neg]);
        v
    }

    fn class_counts(plan: &FoldPlan, labels: &[Class], class: Class) -> Vec<usize> {
        let mut c = vec![0; plan.k];
        for (i, &f) in plan.assignments.iter().enumerate() {
            if labels[i] == class {
                c[f] += 1;
            }
        }
        c
    }

    #[test]
    fn cad_sized_split() {
        let y = labels(216, 87);
        let plan = stratified_kfold(&y, 10, 1).unwrap();
        assert!(plan.fold_sizes().iter().all(|&s| s == 30 || s == 31));
        assert!(class_counts(&plan, &y, Class::Positive)
            .iter()
            .all(|&c| c == 21 || c == 22));
        assert!(class_counts(&plan, &y, Class::Negative)
            .iter()
            .all(|&c| c == 8 || c == 9));
    }

    #[test]
    fn balanced_five_folds() {
        let y = labels(5, 5);
        let plan = stratified_kfold(&y, 5, 3).unwrap();
        assert_eq!(class_counts(&plan, &y, Class::Positive), vec![1; 5]);
        assert_eq!(class_counts(&plan, &y, Class::Negative), vec![1; 5]);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            stratified_kfold(&labels(2, 1), 10, 0),
            Err(DatasetError::TooFewSamples { n: 3, k: 10 })
        ));
        assert!(matches!(
            stratified_kfold(&labels(2, 1), 1, 0),
            Err(DatasetError::InvalidFoldCount(1))
        ));
    }

    proptest! {
        #[test]
        fn stratification_invariants(pos in 0usize..60, neg in 0usize..60, k in 2usize..12, seed: u64) {
            prop_assume!(pos + neg >= k);
            let y = labels(pos, neg);
            let plan = stratified_kfold(&y, k, seed).unwrap();
            prop_assert_eq!(plan.assignments.len(), y.len());
            prop_assert!(plan.assignments.iter().all(|&f| f < k));
            let sizes = plan.fold_sizes();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            for (class, total) in [(Class::Positive, pos), (Class::Negative, neg)] {
                let share = total as f64 / k as f64;
                for c in class_counts(&plan, &y, class) {
                    prop_assert!((c as f64 - share).abs() < 1.0);
                }
            }
            prop_assert_eq!(stratified_kfold(&y, k, seed).unwrap(), plan);
        }
    }
}
