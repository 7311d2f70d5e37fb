//! Kernel support vector classification with genetic-algorithm feature selection.
//!
//! The crate is organised by pipeline stage:
//!
//! - [`dataset`]: CSV ingestion against a schema, nominal encoding, min-max
//!   normalization, stratified fold planning and a planted-feature generator.
//! - [`kernels`]: linear, polynomial, RBF and ANOVA kernels and Gram matrices.
//! - [`svm`]: C-SVC trained by SMO on the dual, decision function, KKT checks.
//! - [`genetic`]: bitmask feature selection scored by cross-validated accuracy.
//! - [`eval`]: confusion matrices, metrics, ROC/AUC and cross-validation runs.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix it to `f64`, which is what the command-line tool uses.

pub mod dataset;
pub mod eval;
pub mod genetic;
pub mod kernels;
pub mod matrix;
pub mod presets;
pub mod scalar;
pub mod svm;

pub use dataset::{Class, DatasetError};
pub use eval::EvalError;
pub use genetic::GaError;
pub use kernels::KernelError;
pub use matrix::Matrix;
pub use scalar::Scalar;
pub use svm::SvmError;

pub type Dataset = dataset::EncodedDataset<f64>;
pub type Kernel = kernels::KernelSpec<f64>;
pub type Model = svm::SvmModel<f64>;
pub type Config = svm::SvmConfig<f64>;
pub use eval::EvalReport;
pub type GaSettings = genetic::GaConfig<f64>;
