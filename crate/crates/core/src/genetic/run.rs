use super::operators::{crossover, init_population, mutate, roulette_select, stream_rng};
use super::{Chromosome, FitnessEvaluator, GaConfig, GaError, GaHistory, GenerationRecord};
use crate::dataset::{stratified_kfold, EncodedDataset};
use crate::scalar::Scalar;

/// Runs the GA and returns the best chromosome ever evaluated with the full history.
///
/// Each generation is evaluated, recorded, and replaced by its `elitism` best
/// members followed by children bred with roulette selection, two-point
/// crossover and single-bit mutation. The run stops after `generations`
/// evaluated populations.
pub fn run_ga<T: Scalar>(
    data: &EncodedDataset<T>,
    config: &GaConfig<T>,
) -> Result<(Chromosome, GaHistory), GaError> {
    config.validate()?;
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| GaError::InvalidConfig(e.to_string()))?
            .install(|| run_in_pool(data, config)),
        None => run_in_pool(data, config),
    }
}

fn run_in_pool<T: Scalar>(
    data: &EncodedDataset<T>,
    config: &GaConfig<T>,
) -> Result<(Chromosome, GaHistory), GaError> {
    let folds = stratified_kfold(&data.labels, config.inner_cv_folds, config.fold_seed)?;
    let genes = config.genes.gene_columns(data);
    let n_genes = genes.len();
    if n_genes == 0 {
        return Err(GaError::InvalidConfig("dataset has no columns".into()));
    }
    let evaluator = FitnessEvaluator::new(
        data,
        genes,
        folds,
        config.svm,
        config.normalize,
        config.cache,
    );

    let mut history = GaHistory {
        generations: Vec::with_capacity(config.generations),
        best: None,
        best_columns: Vec::new(),
        evaluations: 0,
        cache_hits: 0,
    };
    let mut population = init_population(
        n_genes,
        config.population_size,
        config.inject_full_mask,
        config.seed,
    );

    for generation in 0..config.generations {
        let masks: Vec<&[bool]> = population.iter().map(|c| c.mask.as_slice()).collect();
        let fitness = match evaluator.evaluate_all(&masks) {
            Ok(f) => f,
            Err(e) => {
                history.evaluations = evaluator.evaluations();
                history.cache_hits = evaluator.cache_hits();
                return Err(GaError::Aborted {
                    history: Box::new(history),
                    source: Box::new(e),
                });
            }
        };
        for (c, &f) in population.iter_mut().zip(&fitness) {
            c.fitness = Some(f);
        }

        let ranked = rank(&fitness);
        let leader = &population[ranked[0]];
        let mean = fitness.iter().sum::<f64>() / fitness.len() as f64;
        history.generations.push(GenerationRecord {
            generation,
            best_fitness: fitness[ranked[0]],
            mean_fitness: mean,
            best_mask: evaluator.column_names(&leader.mask),
        });
        let improved = history
            .best
            .as_ref()
            .is_none_or(|b| fitness[ranked[0]] > b.fitness.unwrap_or(f64::NEG_INFINITY));
        if improved {
            history.best = Some(leader.clone());
            history.best_columns = evaluator.column_names(&leader.mask);
        }

        if generation + 1 == config.generations {
            break;
        }

        let mut next: Vec<Chromosome> = ranked
            .iter()
            .take(config.elitism)
            .map(|&i| population[i].clone())
            .collect();
        let mut pair = 0;
        while next.len() < config.population_size {
            let mut rng = stream_rng(config.seed, generation + 1, pair);
            pair += 1;
            let a = roulette_select(&fitness, &mut rng)?;
            let b = roulette_select(&fitness, &mut rng)?;
            let (mut ca, mut cb) = crossover(
                &population[a].mask,
                &population[b].mask,
                config.crossover_p,
                &mut rng,
            )?;
            mutate(&mut ca, config.mutation_p, &mut rng);
            mutate(&mut cb, config.mutation_p, &mut rng);
            next.push(Chromosome::new(ca));
            if next.len() < config.population_size {
                next.push(Chromosome::new(cb));
            }
        }
        population = next;
    }

    history.evaluations = evaluator.evaluations();
    history.cache_hits = evaluator.cache_hits();
    let best = history.best.clone().expect("at least one generation ran");
    Ok((best, history))
}

/// Indices sorted by fitness, best first; ties keep population order.
fn rank(fitness: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..fitness.len()).collect();
    idx.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]));
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{synth_generate, SynthConfig};

    fn small() -> EncodedDataset<f64> {
        synth_generate::<f64>(&SynthConfig {
            n: 80,
            n_features: 5,
            n_informative: 2,
            noise: 0.0,
            seed: 8,
        })
        .unwrap()
        .data
    }

    #[test]
    fn single_generation_boundary() {
        let data = small();
        let cfg = GaConfig::<f64> {
            population_size: 2,
            generations: 1,
            inner_cv_folds: 4,
            ..GaConfig::default()
        };
        let (best, h) = run_ga(&data, &cfg).unwrap();
        assert_eq!(h.generations.len(), 1);
        assert_eq!(h.evaluations, 2);
        let pop = init_population(5, 2, true, cfg.seed);
        let ev = FitnessEvaluator::new(
            &data,
            (0..5).map(|j| vec![j]).collect(),
            stratified_kfold(&data.labels, 4, cfg.fold_seed).unwrap(),
            cfg.svm,
            cfg.normalize,
            false,
        );
        let f: Vec<f64> = pop
            .iter()
            .map(|c| ev.evaluate(&c.mask).unwrap().0)
            .collect();
        assert_eq!(best.fitness.unwrap(), f[0].max(f[1]));
        assert_eq!(h.generations[0].best_fitness, f[0].max(f[1]));
    }

    #[test]
    fn monotone_best_and_constant_population() {
        let data = small();
        let cfg = GaConfig::<f64> {
            population_size: 8,
            generations: 5,
            inner_cv_folds: 4,
            seed: 3,
            ..GaConfig::default()
        };
        let (best, h) = run_ga(&data, &cfg).unwrap();
        assert_eq!(h.generations.len(), 5);
        for w in h.generations.windows(2) {
            assert!(w[1].best_fitness >= w[0].best_fitness);
        }
        assert_eq!(
            best.fitness.unwrap(),
            h.generations.last().unwrap().best_fitness
        );
        assert!(best.count_ones() > 0);
    }

    #[test]
    fn cache_is_transparent() {
        let data = small();
        let base = GaConfig::<f64> {
            population_size: 6,
            generations: 3,
            inner_cv_folds: 4,
            ..GaConfig::default()
        };
        let (_, with) = run_ga(&data, &base).unwrap();
        let (_, without) = run_ga(
            &data,
            &GaConfig {
                cache: false,
                ..base
            },
        )
        .unwrap();
        assert_eq!(with.generations, without.generations);
        assert_eq!(with.best, without.best);
        assert_eq!(without.cache_hits, 0);
    }

    #[test]
    fn raw_gene_layout_toggles_whole_features() {
        use crate::dataset::{ColumnKind, ColumnMeta};
        let mut data = small();
        // Pretend columns 3 and 4 are the two levels of one nominal feature.
        for (j, value) in [(3, "a"), (4, "b")] {
            data.columns[j] = ColumnMeta {
                source: "F".into(),
                kind: ColumnKind::OneHot {
                    value: value.into(),
                    values: vec!["a".into(), "b".into()],
                },
            };
        }
        let cfg = GaConfig::<f64> {
            population_size: 4,
            generations: 2,
            inner_cv_folds: 4,
            genes: super::super::GeneLayout::Raw,
            ..GaConfig::default()
        };
        let (_, h) = run_ga(&data, &cfg).unwrap();
        for rec in &h.generations {
            let has_a = rec.best_mask.iter().any(|c| c == "F=a");
            let has_b = rec.best_mask.iter().any(|c| c == "F=b");
            assert_eq!(has_a, has_b);
        }
    }

    #[test]
    fn invalid_config() {
        let data = small();
        let cfg = GaConfig::<f64> {
            population_size: 1,
            ..GaConfig::default()
        };
        assert!(matches!(
            run_ga(&data, &cfg),
            Err(GaError::InvalidConfig(_))
        ));
        let cfg = GaConfig::<f64> {
            crossover_p: 1.5,
            ..GaConfig::default()
        };
        assert!(matches!(
            run_ga(&data, &cfg),
            Err(GaError::InvalidConfig(_))
        ));
    }
}
