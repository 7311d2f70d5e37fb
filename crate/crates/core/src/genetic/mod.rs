//! Wrapper feature selection with a generational genetic algorithm.
//!
//! Chromosomes are bitmasks over genes, where a gene is either one encoded
//! column or one raw source feature (toggling all of its encoded columns).
//! Fitness is the pooled cross-validated accuracy of an SVM trained on the
//! selected columns, using one fold plan frozen for the whole run.

mod fitness;
mod operators;
mod run;

pub use fitness::{fitness_eval, FitnessEvaluator};
pub use operators::{crossover, init_population, mutate, roulette_select, stream_rng};
pub use run::run_ga;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DatasetError, EncodedDataset, NormalizePolicy};
use crate::eval::EvalError;
use crate::kernels::KernelSpec;
use crate::scalar::Scalar;
use crate::svm::SvmConfig;

#[derive(Debug, Error)]
pub enum GaError {
    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot select from an empty population")]
    EmptyPopulation,
    #[error("parent lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("fitness evaluation of {columns:?} failed: {source}")]
    Fitness {
        columns: Vec<String>,
        #[source]
        source: EvalError,
    },
    /// A generation failed; `history` holds every generation completed before it.
    #[error("GA aborted after {} generation(s): {source}", history.generations.len())]
    Aborted {
        history: Box<GaHistory>,
        #[source]
        source: Box<GaError>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Fitness-proportionate selection, `P_i = f_i / sum_k f_k`.
    #[default]
    RouletteWheel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossoverKind {
    /// Two-point crossover: the segment between two random cut points is swapped.
    #[default]
    Shuffle,
}

/// What one gene switches on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneLayout {
    /// One gene per encoded column.
    #[default]
    Encoded,
    /// One gene per source feature; a one-hot feature's columns move together.
    Raw,
}

impl GeneLayout {
    /// Encoded columns controlled by each gene, in gene order.
    pub fn gene_columns<T: Scalar>(&self, data: &EncodedDataset<T>) -> Vec<Vec<usize>> {
        match self {
            GeneLayout::Encoded => (0..data.n_columns()).map(|j| vec![j]).collect(),
            GeneLayout::Raw => data
                .source_features()
                .iter()
                .map(|f| data.columns_of(&f.name))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GaConfig<T> {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_p: f64,
    pub mutation_p: f64,
    pub selection: Selection,
    pub crossover: CrossoverKind,
    /// Best chromosomes copied unchanged into the next generation.
    pub elitism: usize,
    /// Seeds every stochastic operator.
    pub seed: u64,
    pub inner_cv_folds: usize,
    /// Seed of the frozen fitness fold plan.
    pub fold_seed: u64,
    pub svm: SvmConfig<T>,
    pub normalize: NormalizePolicy,
    /// Force the first initial chromosome to select every gene.
    pub inject_full_mask: bool,
    pub genes: GeneLayout,
    /// Worker threads for fitness evaluation; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Memoize fitness by mask.
    pub cache: bool,
}

impl<T: Scalar> Default for GaConfig<T> {
    fn default() -> Self {
        Self {
            population_size: 50,
            generations: 10,
            crossover_p: 0.75,
            mutation_p: 1.0,
            selection: Selection::RouletteWheel,
            crossover: CrossoverKind::Shuffle,
            elitism: 1,
            seed: 0,
            inner_cv_folds: 10,
            fold_seed: 1,
            svm: SvmConfig::new(KernelSpec::Anova {
                sigma: T::one(),
                degree: 1,
            }),
            normalize: NormalizePolicy::PerFold,
            inject_full_mask: true,
            genes: GeneLayout::Encoded,
            threads: None,
            cache: true,
        }
    }
}

impl<T: Scalar> GaConfig<T> {
    pub fn validate(&self) -> Result<(), GaError> {
        let bad = |m: String| Err(GaError::InvalidConfig(m));
        if self.population_size < 2 {
            return bad(format!(
                "population_size must be >= 2, got {}",
                self.population_size
            ));
        }
        if self.generations < 1 {
            return bad("generations must be >= 1".into());
        }
        for (name, p) in [
            ("crossover_p", self.crossover_p),
            ("mutation_p", self.mutation_p),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.elitism > self.population_size {
            return bad(format!(
                "elitism {} exceeds population size {}",
                self.elitism, self.population_size
            ));
        }
        if self.inner_cv_folds < 2 {
            return bad("inner_cv_folds must be >= 2".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        self.svm
            .validate()
            .map_err(|e| GaError::InvalidConfig(e.to_string()))
    }
}

/// Candidate feature subset. The mask is never all zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    pub mask: Vec<bool>,
    pub fitness: Option<f64>,
}

impl Chromosome {
    pub fn new(mask: Vec<bool>) -> Self {
        debug_assert!(mask.iter().any(|&b| b), "empty chromosome");
        Self {
            mask,
            fitness: None,
        }
    }

    pub fn count_ones(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Mask as a `0`/`1` string, gene 0 first.
    pub fn bit_string(&self) -> String {
        self.mask
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    /// Encoded column names selected by the generation's best chromosome.
    pub best_mask: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaHistory {
    pub generations: Vec<GenerationRecord>,
    pub best: Option<Chromosome>,
    /// Encoded columns selected by `best`.
    pub best_columns: Vec<String>,
    /// Fitness computations actually performed.
    pub evaluations: u64,
    pub cache_hits: u64,
}

impl GaHistory {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("history serializes")
    }
}
