use gsvma::dataset::{stratified_kfold, synth_generate, SynthConfig};
use gsvma::genetic::{fitness_eval, roulette_select, run_ga, GaConfig};
use gsvma::kernels::KernelSpec;
use gsvma::svm::SvmConfig;
use gsvma_oracle::chi_squared;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn roulette_fit(fitness: &[f64], seed: u64) {
    let total: f64 = fitness.iter().sum();
    let expected: Vec<f64> = fitness.iter().map(|f| f / total).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; fitness.len()];
    for _ in 0..100_000 {
        counts[roulette_select(fitness, &mut rng).unwrap()] += 1;
    }
    let (stat, p) = chi_squared(&counts, &expected);
    assert!(p > 1e-3, "chi2 = {stat}, p = {p}, counts {counts:?}");
}

#[test]
fn roulette_frequencies_follow_fitness() {
    roulette_fit(&[2.0, 3.0, 5.0], 21);
    roulette_fit(&[0.9, 0.1, 0.0, 0.45, 0.7, 0.3, 0.05, 1.0], 22);
}

#[test]
fn planted_columns_beat_every_mask_missing_one() {
    let synth = synth_generate::<f64>(&SynthConfig {
        n: 150,
        n_features: 8,
        n_informative: 2,
        noise: 0.0,
        seed: 6,
    })
    .unwrap();
    let config = GaConfig::<f64>::default();
    let folds = stratified_kfold(&synth.data.labels, 10, config.fold_seed).unwrap();
    let mask_of = |m: u32| -> Vec<bool> { (0..8).map(|b| m >> b & 1 == 1).collect() };
    let fit = |m: u32| {
        fitness_eval(
            &mask_of(m),
            &synth.data,
            &folds,
            &config.svm,
            config.normalize,
        )
        .unwrap()
    };
    let planted: u32 = synth.informative.iter().map(|&j| 1u32 << j).sum();
    let reference = fit(planted);
    for m in 1u32..256 {
        if m & planted != planted {
            assert!(fit(m) <= reference, "mask {m:08b} beats the planted pair");
        }
    }
}

fn small_config(threads: Option<usize>) -> GaConfig<f64> {
    GaConfig {
        population_size: 12,
        generations: 4,
        seed: 9,
        inner_cv_folds: 5,
        threads,
        svm: SvmConfig::new(KernelSpec::Anova {
            sigma: 1.0,
            degree: 1,
        }),
        ..GaConfig::default()
    }
}

#[test]
fn history_independent_of_thread_count() {
    let synth = synth_generate::<f64>(&SynthConfig {
        n: 120,
        n_features: 8,
        n_informative: 2,
        noise: 0.3,
        seed: 4,
    })
    .unwrap();
    let (best1, h1) = run_ga(&synth.data, &small_config(Some(1))).unwrap();
    let (best8, h8) = run_ga(&synth.data, &small_config(Some(8))).unwrap();
    assert_eq!(best1, best8);
    assert_eq!(h1.to_json(), h8.to_json());
    assert_eq!(h1.generations.len(), 4);
    assert!(h1
        .generations
        .windows(2)
        .all(|w| w[1].best_fitness >= w[0].best_fitness));
}
