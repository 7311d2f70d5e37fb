//! Binary soft-margin C-SVC trained on the dual problem.
//!
//! The solver is SMO with maximal-violating-pair selection. Gram matrices are
//! precomputed for up to [`DENSE_LIMIT`] samples, above which kernel rows are
//! computed on demand through an LRU cache.

mod kkt;
mod qmatrix;
mod solver;

pub use kkt::{check_kkt, dual_objective, KktReport};
pub use qmatrix::DENSE_LIMIT;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Class;
use crate::kernels::{KernelError, KernelSpec};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use qmatrix::KernelRows;
use solver::Problem;

#[derive(Debug, Error, PartialEq)]
pub enum SvmError {
    #[error("training labels contain a single class")]
    SingleClassInput,
    #[error("need at least 2 training samples, got {0}")]
    TooFewSamples(usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid svm configuration: {0}")]
    InvalidConfig(String),
    #[error("solver stopped after {pair_updates} pair updates with KKT gap {gap:e}")]
    DidNotConverge { pair_updates: u64, gap: f64 },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SvmConfig<T> {
    /// Box constraint on the dual variables.
    pub c: T,
    pub kernel: KernelSpec<T>,
    /// Stopping threshold on the maximal KKT violation.
    pub tolerance: T,
    pub max_pair_updates: u64,
}

impl<T: Scalar> SvmConfig<T> {
    pub fn new(kernel: KernelSpec<T>) -> Self {
        Self {
            c: T::one(),
            kernel,
            tolerance: T::lit(1e-3),
            max_pair_updates: 10_000_000,
        }
    }

    pub fn with_c(mut self, c: T) -> Self {
        self.c = c;
        self
    }

    pub fn with_tolerance(mut self, tolerance: T) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<(), SvmError> {
        if !(self.c > T::zero() && self.c.is_finite()) {
            return Err(SvmError::InvalidConfig(format!(
                "C must be positive, got {}",
                self.c
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= T::zero() {
            return Err(SvmError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_pair_updates == 0 {
            return Err(SvmError::InvalidConfig(
                "max_pair_updates must be positive".into(),
            ));
        }
        self.kernel.validate()?;
        Ok(())
    }
}

/// Termination state of the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Convergence<T> {
    pub converged: bool,
    pub pair_updates: u64,
    /// Maximal violating-pair gap at termination.
    pub gap: T,
}

/// Trained classifier. Only vectors with a nonzero dual variable are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SvmModel<T> {
    pub kernel: KernelSpec<T>,
    pub c: T,
    pub sv_rows: Matrix<T>,
    /// Signed dual coefficients `alpha_i * y_i`, aligned with `sv_rows`.
    pub coeffs: Vec<T>,
    /// Positions of the support vectors in the training set.
    pub sv_indices: Vec<usize>,
    pub bias: T,
    /// Columns of the full encoded feature vector this model reads, in order.
    pub column_mask: Vec<usize>,
    pub n_train: usize,
    pub dual_objective: T,
    pub convergence: Convergence<T>,
}

impl<T: Scalar> SvmModel<T> {
    pub fn n_features(&self) -> usize {
        self.sv_rows.n_cols()
    }

    /// `sum_i coeff_i * k(sv_i, x) + b`.
    pub fn decision_value(&self, x: &[T]) -> Result<T, SvmError> {
        if x.len() != self.n_features() {
            return Err(SvmError::DimensionMismatch {
                expected: self.n_features(),
                found: x.len(),
            });
        }
        Ok(self.decision_value_unchecked(x))
    }

    fn decision_value_unchecked(&self, x: &[T]) -> T {
        self.sv_rows
            .rows()
            .zip(&self.coeffs)
            .map(|(sv, &a)| a * self.kernel.eval_unchecked(sv, x))
            .sum::<T>()
            + self.bias
    }

    /// Sign of the decision value; exactly zero maps to the positive class.
    pub fn predict(&self, x: &[T]) -> Result<Class, SvmError> {
        self.decision_value(x).map(Class::from_sign)
    }

    /// Decision value for a full encoded feature vector, reading only `column_mask`.
    pub fn decision_value_full(&self, x: &[T]) -> Result<T, SvmError> {
        let needed = self.column_mask.iter().max().map_or(0, |&m| m + 1);
        if x.len() < needed {
            return Err(SvmError::DimensionMismatch {
                expected: needed,
                found: x.len(),
            });
        }
        let sub: Vec<T> = self.column_mask.iter().map(|&j| x[j]).collect();
        self.decision_value(&sub)
    }

    pub fn decision_values(&self, rows: &Matrix<T>) -> Result<Vec<T>, SvmError> {
        rows.rows().map(|r| self.decision_value(r)).collect()
    }

    /// Dense dual vector over the training set (zeros for non-support vectors).
    pub fn alphas(&self) -> Vec<T> {
        let mut a = vec![T::zero(); self.n_train];
        for (&i, &coef) in self.sv_indices.iter().zip(&self.coeffs) {
            a[i] = coef.abs();
        }
        a
    }

    /// Fails with [`SvmError::DidNotConverge`] if the update budget ran out.
    pub fn ensure_converged(&self) -> Result<(), SvmError> {
        if self.convergence.converged {
            Ok(())
        } else {
            Err(SvmError::DidNotConverge {
                pair_updates: self.convergence.pair_updates,
                gap: self.convergence.gap.as_f64(),
            })
        }
    }
}

/// Trains a C-SVC on `rows` (one sample per row) with labels `labels`.
///
/// A model is returned even when the pair-update budget runs out; its
/// [`Convergence`] records the achieved gap and
/// [`SvmModel::ensure_converged`] turns that into an error.
pub fn train<T: Scalar>(
    rows: &Matrix<T>,
    labels: &[Class],
    config: &SvmConfig<T>,
) -> Result<SvmModel<T>, SvmError> {
    train_observed(rows, labels, config, |_| {})
}

pub(crate) fn train_observed<T: Scalar>(
    rows: &Matrix<T>,
    labels: &[Class],
    config: &SvmConfig<T>,
    observe: impl FnMut(&[T]),
) -> Result<SvmModel<T>, SvmError> {
    config.validate()?;
    let n = rows.n_rows();
    if labels.len() != n {
        return Err(SvmError::DimensionMismatch {
            expected: n,
            found: labels.len(),
        });
    }
    if n < 2 {
        return Err(SvmError::TooFewSamples(n));
    }
    let has_pos = labels.iter().any(|c| c.is_positive());
    let has_neg = labels.iter().any(|c| !c.is_positive());
    if !(has_pos && has_neg) {
        return Err(SvmError::SingleClassInput);
    }

    let y: Vec<T> = labels.iter().map(|c| c.sign()).collect();
    let problem = Problem {
        y: &y,
        c: config.c,
        tolerance: config.tolerance,
        max_pair_updates: config.max_pair_updates,
        kernel: KernelRows::new(&config.kernel, rows),
    };
    let sol = problem.solve_observed(observe);
    let bias = solver::bias(&y, &sol.alpha, &sol.grad, config.c);

    // With G = Qa - e the objective sum(a) - 1/2 a'Qa equals -1/2 sum_i a_i (G_i - 1).
    let dual_objective = -sol
        .alpha
        .iter()
        .zip(&sol.grad)
        .map(|(&a, &g)| a * (g - T::one()))
        .sum::<T>()
        / T::lit(2.0);

    let sv_indices: Vec<usize> = (0..n).filter(|&i| sol.alpha[i] > T::zero()).collect();
    let coeffs = sv_indices.iter().map(|&i| sol.alpha[i] * y[i]).collect();
    let sv_rows = rows.select(&sv_indices, &(0..rows.n_cols()).collect::<Vec<_>>());

    Ok(SvmModel {
        kernel: config.kernel,
        c: config.c,
        sv_rows,
        coeffs,
        sv_indices,
        bias,
        column_mask: (0..rows.n_cols()).collect(),
        n_train: n,
        dual_objective,
        convergence: Convergence {
            converged: sol.converged,
            pair_updates: sol.pair_updates,
            gap: sol.gap,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> (Matrix<f64>, Vec<Class>) {
        (
            Matrix::from_rows(&[[0.0], [2.0]]).unwrap(),
            vec![Class::Negative, Class::Positive],
        )
    }

    #[test]
    fn two_point_boundary_at_midpoint() {
        let (x, y) = line();
        let cfg = SvmConfig::new(KernelSpec::Linear).with_c(10.0);
        let m = train(&x, &y, &cfg).unwrap();
        assert!(m.decision_value(&[1.0]).unwrap().abs() < 1e-6);
        assert!((m.decision_value(&[0.0]).unwrap() + 1.0).abs() < 1e-6);
        assert!((m.decision_value(&[2.0]).unwrap() - 1.0).abs() < 1e-6);
        // Analytic dual: alpha = 1/2 for both points, objective 1/2.
        assert!((m.dual_objective - 0.5).abs() < 1e-9);
        assert_eq!(m.predict(&[0.0]).unwrap(), Class::Negative);
        assert_eq!(m.predict(&[2.0]).unwrap(), Class::Positive);
    }

    #[test]
    fn xor_with_rbf() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]]).unwrap();
        let y = vec![
            Class::Negative,
            Class::Negative,
            Class::Positive,
            Class::Positive,
        ];
        let cfg = SvmConfig::new(KernelSpec::rbf(1.0).unwrap()).with_c(10.0);
        let m = train(&x, &y, &cfg).unwrap();
        for (r, &c) in x.rows().zip(&y) {
            assert_eq!(m.predict(r).unwrap(), c);
        }
    }

    #[test]
    fn single_class_rejected() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
        let cfg = SvmConfig::new(KernelSpec::<f64>::Linear);
        assert_eq!(
            train(&x, &[Class::Positive; 3], &cfg).unwrap_err(),
            SvmError::SingleClassInput
        );
    }

    #[test]
    fn config_and_shape_errors() {
        let (x, y) = line();
        let bad_c = SvmConfig::new(KernelSpec::<f64>::Linear).with_c(0.0);
        assert!(matches!(
            train(&x, &y, &bad_c),
            Err(SvmError::InvalidConfig(_))
        ));
        let cfg = SvmConfig::new(KernelSpec::<f64>::Linear);
        assert!(matches!(
            train(&x, &y[..1], &cfg),
            Err(SvmError::DimensionMismatch { .. })
        ));
        let m = train(&x, &y, &cfg).unwrap();
        assert!(matches!(
            m.decision_value(&[1.0, 2.0]),
            Err(SvmError::DimensionMismatch {
                expected: 1,
                found: 2
            })
        ));
    }

    #[test]
    fn tie_predicts_positive() {
        let (x, y) = line();
        let mut m = train(&x, &y, &SvmConfig::new(KernelSpec::Linear).with_c(10.0)).unwrap();
        m.bias = 0.0;
        m.coeffs = vec![0.0; m.coeffs.len()];
        assert_eq!(m.decision_value(&[5.0]).unwrap(), 0.0);
        assert_eq!(m.predict(&[5.0]).unwrap(), Class::Positive);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let x = Matrix::from_rows(&[[0.0, 0.1], [1.0, 0.9], [0.2, 0.8], [0.9, 0.3], [0.5, 0.5]])
            .unwrap();
        let y = vec![
            Class::Negative,
            Class::Negative,
            Class::Positive,
            Class::Positive,
            Class::Positive,
        ];
        let mut cfg = SvmConfig::new(KernelSpec::rbf(2.0).unwrap()).with_c(100.0);
        cfg.max_pair_updates = 1;
        let m = train(&x, &y, &cfg).unwrap();
        assert!(!m.convergence.converged);
        assert_eq!(m.convergence.pair_updates, 1);
        assert!(matches!(
            m.ensure_converged(),
            Err(SvmError::DidNotConverge { .. })
        ));
    }

    #[test]
    fn dual_objective_never_decreases() {
        let x = Matrix::from_rows(&[
            [0.1, 0.3],
            [0.9, 0.2],
            [0.4, 0.8],
            [0.7, 0.7],
            [0.2, 0.9],
            [0.6, 0.1],
            [0.5, 0.5],
        ])
        .unwrap();
        let y = vec![
            Class::Negative,
            Class::Positive,
            Class::Negative,
            Class::Positive,
            Class::Negative,
            Class::Positive,
            Class::Negative,
        ];
        for kernel in [
            KernelSpec::Linear,
            KernelSpec::rbf(3.0).unwrap(),
            KernelSpec::anova(2.0, 2).unwrap(),
            KernelSpec::polynomial(3).unwrap(),
        ] {
            let cfg = SvmConfig::new(kernel).with_c(5.0).with_tolerance(1e-8);
            let g = crate::kernels::gram(&kernel, &x);
            let mut trace = Vec::new();
            train_observed(&x, &y, &cfg, |a| {
                trace.push(dual_objective(a, &y, &g).unwrap());
                assert!(a.iter().all(|&v| (0.0..=5.0).contains(&v)));
            })
            .unwrap();
            assert!(!trace.is_empty());
            for w in trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "{kernel:?}: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn deterministic() {
        let x = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0], [0.5, 0.6], [0.9, 0.9]]).unwrap();
        let y = vec![
            Class::Negative,
            Class::Positive,
            Class::Negative,
            Class::Positive,
        ];
        let cfg = SvmConfig::new(KernelSpec::anova(1.0, 1).unwrap());
        assert_eq!(train(&x, &y, &cfg).unwrap(), train(&x, &y, &cfg).unwrap());
    }

    #[test]
    fn single_precision_training() {
        let x = Matrix::<f32>::from_rows(&[[0.0], [2.0]]).unwrap();
        let y = vec![Class::Negative, Class::Positive];
        let m = train(&x, &y, &SvmConfig::new(KernelSpec::Linear).with_c(10.0)).unwrap();
        assert!(m.decision_value(&[1.0]).unwrap().abs() < 1e-5);
    }
}
