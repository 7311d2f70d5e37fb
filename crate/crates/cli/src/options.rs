//! Command-line flags and the TOML config file.
//!
//! The config file has three optional tables, `[data]`, `[eval]` and `[ga]`,
//! whose keys are the long flag names. A flag given on the command line
//! replaces the config value.

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use gsvma::dataset::NormalizePolicy;

#[derive(Debug, Parser)]
#[command(
    name = "gsvma",
    version,
    about = "SVM baselines and GA feature selection for tabular CAD data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode (and optionally normalize) a dataset and summarize it.
    Preprocess(RunArgs<NoEval, NoGa>),
    /// Cross-validate a kernel SVM baseline on every feature.
    Cv(RunArgs<EvalOpts, NoGa>),
    /// Select features with the genetic algorithm, then cross-validate the selection.
    Gsvma(RunArgs<EvalOpts, GaOpts>),
    /// Merge report JSON files into one comparison table.
    Report(ReportArgs),
    /// Write a synthetic planted-feature dataset and its schema.
    Synth(SynthArgs),
    /// Print the SHA-256 of a file, optionally checking it.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs<E: Args, G: Args> {
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Validate configuration and input, write nothing.
    #[arg(long)]
    pub dry_run: bool,
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub eval: E,
    #[command(flatten)]
    pub ga: G,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalize {
    Global,
    PerFold,
    None,
}

impl From<Normalize> for NormalizePolicy {
    fn from(n: Normalize) -> Self {
        match n {
            Normalize::Global => NormalizePolicy::Global,
            Normalize::PerFold => NormalizePolicy::PerFold,
            Normalize::None => NormalizePolicy::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SvmLinear,
    SvmRbf,
    SvmAnova,
    Gsvma,
}

/// Row order of the comparison table.
pub const TABLE_ORDER: [Method; 4] = [
    Method::SvmAnova,
    Method::SvmLinear,
    Method::SvmRbf,
    Method::Gsvma,
];

impl Method {
    pub fn key(self) -> &'static str {
        match self {
            Method::SvmLinear => "svm-linear",
            Method::SvmRbf => "svm-rbf",
            Method::SvmAnova => "svm-anova",
            Method::Gsvma => "gsvma",
        }
    }

    pub fn display(self) -> &'static str {
        match self {
            Method::SvmLinear => "Linear SVM",
            Method::SvmRbf => "LibSVM with RBF",
            Method::SvmAnova => "SVM with Anova",
            Method::Gsvma => "GSVMA",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct DataOpts {
    /// Input CSV with a header row.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Schema TOML; defaults to the bundled Z-Alizadeh Sani schema.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub normalize: Option<Normalize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct EvalOpts {
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// RBF width; defaults to 1 / number of columns.
    #[arg(long)]
    pub kernel_gamma: Option<f64>,
    /// ANOVA width.
    #[arg(long)]
    pub kernel_sigma: Option<f64>,
    /// ANOVA degree.
    #[arg(long)]
    pub kernel_degree: Option<u32>,
    /// Box constraint.
    #[arg(long)]
    pub c: Option<f64>,
    /// Comma-separated C values to sweep; the most accurate becomes the main report.
    #[arg(long, value_delimiter = ',')]
    pub c_grid: Option<Vec<f64>>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seed of the reported fold plan; defaults to `--seed`.
    #[arg(long)]
    pub fold_seed: Option<u64>,
    #[arg(long)]
    pub folds: Option<usize>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GaOpts {
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub crossover_p: Option<f64>,
    #[arg(long)]
    pub mutation_p: Option<f64>,
    #[arg(long)]
    pub elitism: Option<usize>,
    /// Evaluate a named preset mask instead of running the GA.
    #[arg(long)]
    pub ga_mask: Option<String>,
    /// Seed of the fold plan used for GA fitness; defaults to `--seed` + 1.
    #[arg(long)]
    pub ga_fold_seed: Option<u64>,
}

/// Placeholder for commands without evaluation flags. A shared config file's
/// `[eval]` table is ignored.
#[derive(Debug, Clone, Default, Args, Deserialize)]
pub struct NoEval {}

/// Placeholder for commands without GA flags.
#[derive(Debug, Clone, Default, Args, Deserialize)]
pub struct NoGa {}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Report JSON files.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
    /// Output directory for comparison.csv and comparison.md.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 300)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub features: usize,
    #[arg(long, default_value_t = 2)]
    pub informative: usize,
    /// Label noise relative to the clean score's spread.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Expected hex digest.
    #[arg(long)]
    pub expect: Option<String>,
}

pub trait Merge {
    /// Fills every unset field of `self` from `base`.
    fn merge(self, base: Self) -> Self;
}

macro_rules! merge_fields {
    ($t:ty; $($f:ident),*) => {
        impl Merge for $t {
            fn merge(self, base: Self) -> Self {
                Self { $($f: self.$f.or(base.$f)),* }
            }
        }
    };
}

merge_fields!(DataOpts; dataset, schema, normalize, out);
merge_fields!(EvalOpts; method, kernel_gamma, kernel_sigma, kernel_degree, c, c_grid, seed, fold_seed, folds, threads);
merge_fields!(GaOpts; population, generations, crossover_p, mutation_p, elitism, ga_mask, ga_fold_seed);

impl Merge for NoEval {
    fn merge(self, _: Self) -> Self {
        self
    }
}

impl Merge for NoGa {
    fn merge(self, _: Self) -> Self {
        self
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, bound = "")]
struct ConfigFile<E: for<'a> Deserialize<'a> + Default, G: for<'a> Deserialize<'a> + Default> {
    #[serde(default)]
    data: DataOpts,
    #[serde(default)]
    eval: E,
    #[serde(default)]
    ga: G,
}

impl<E, G> RunArgs<E, G>
where
    E: Args + Merge + Default + for<'a> Deserialize<'a>,
    G: Args + Merge + Default + for<'a> Deserialize<'a>,
{
    /// Flags merged over the config file, if one was given.
    pub fn resolve(self) -> anyhow::Result<(DataOpts, E, G, bool)> {
        let Some(path) = &self.config else {
            return Ok((self.data, self.eval, self.ga, self.dry_run));
        };
        let file: ConfigFile<E, G> = read_config(path)?;
        let base_dir = path.parent().unwrap_or(Path::new(""));
        let mut data = file.data;
        // Paths in the config file are relative to the file itself.
        for p in [&mut data.dataset, &mut data.schema, &mut data.out]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        }
        Ok((
            self.data.merge(data),
            self.eval.merge(file.eval),
            self.ga.merge(file.ga),
            self.dry_run,
        ))
    }
}

fn read_config<T: for<'a> Deserialize<'a>>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
}
