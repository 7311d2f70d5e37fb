use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Class, DatasetError, EncodedDataset};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Clean scores closer than this to the decision rule (in units of the
/// score's standard deviation) are redrawn, leaving a margin around it.
const MARGIN_BAND: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub n: usize,
    pub n_features: usize,
    pub n_informative: usize,
    /// Standard deviation of the Gaussian label noise relative to the
    /// standard deviation of the clean linear score.
    pub noise: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SynthDataset<T> {
    pub data: EncodedDataset<T>,
    /// Sorted indices of the columns the labels depend on.
    pub informative: Vec<usize>,
    /// Weight of each informative column in the labelling rule, aligned with `informative`.
    pub weights: Vec<f64>,
}

/// Planted-feature binary classification data.
///
/// Every column is uniform on [0, 1]. The label is the sign of
/// `sum_k w_k (x_k - 0.5) / sd + noise * eps` over the informative columns,
/// with `eps` standard normal. Non-informative columns carry no signal.
pub fn synth_generate<T: Scalar>(config: &SynthConfig) -> Result<SynthDataset<T>, DatasetError> {
    let SynthConfig {
        n,
        n_features,
        n_informative,
        noise,
        seed,
    } = *config;
    if n_informative == 0 || n_informative > n_features {
        return Err(DatasetError::InvalidConfig(format!(
            "need 1 <= n_informative <= n_features, got {n_informative} of {n_features}"
        )));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(DatasetError::InvalidConfig(format!(
            "noise must be >= 0, got {noise}"
        )));
    }
    if n == 0 {
        return Err(DatasetError::InvalidConfig("n must be positive".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut informative = sample(&mut rng, n_features, n_informative).into_vec();
    informative.sort_unstable();
    let weights: Vec<f64> = informative
        .iter()
        .map(|_| {
            let magnitude = rng.random_range(0.5..1.5);
            if rng.random_bool(0.5) {
                magnitude
            } else {
                -magnitude
            }
        })
        .collect();
    // Var of (U - 0.5) is 1/12.
    let sd = (weights.iter().map(|w| w * w).sum::<f64>() / 12.0).sqrt();

    let mut rows = Vec::with_capacity(n * n_features);
    let mut labels = Vec::with_capacity(n);
    while labels.len() < n {
        let x: Vec<f64> = (0..n_features).map(|_| rng.random::<f64>()).collect();
        let clean = informative
            .iter()
            .zip(&weights)
            .map(|(&j, w)| w * (x[j] - 0.5))
            .sum::<f64>()
            / sd;
        if clean.abs() < MARGIN_BAND {
            continue;
        }
        let eps: f64 = rng.sample(StandardNormal);
        let score = clean + noise * eps;
        labels.push(if score >= 0.0 {
            Class::Positive
        } else {
            Class::Negative
        });
        rows.extend(x.into_iter().map(T::lit));
    }

    let matrix = Matrix::from_row_major(n, n_features, rows).expect("row-major size");
    Ok(SynthDataset {
        data: EncodedDataset::from_numeric(matrix, labels, None),
        informative,
        weights,
    })
}
