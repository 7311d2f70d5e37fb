//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! The paper-reproduction criterion needs the Z-Alizadeh Sani CSV, which is not
//! distributed with the repository; point `GSVMA_CAD_CSV` at it to run that
//! check, otherwise it is reported as SKIPPED.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use gsvma::dataset::{
    encode, parse_csv, stratified_kfold, synth_generate, Class, NormalizePolicy, RawSchema,
    SynthConfig,
};
use gsvma::eval::{auc, cross_validate, metrics, roc_curve, ConfusionMatrix};
use gsvma::genetic::{fitness_eval, run_ga, GaConfig};
use gsvma::kernels::{gram, KernelSpec};
use gsvma::presets::preset_mask;
use gsvma::svm::{check_kkt, train, SvmConfig};
use gsvma::Matrix;
use gsvma_oracle::rand::Rng;
use gsvma_oracle::{
    decision, dense_qp, mann_whitney_auc, min_eigenvalue, random_instance, random_points,
    reference_metrics, seeded, RefKernel,
};

enum Verdict {
    Pass(String),
    Fail(String),
    Skipped(String),
}

fn kernel(k: RefKernel) -> KernelSpec<f64> {
    match k {
        RefKernel::Linear => KernelSpec::Linear,
        RefKernel::Polynomial(degree) => KernelSpec::Polynomial { degree },
        RefKernel::Rbf(gamma) => KernelSpec::Rbf { gamma },
        RefKernel::Anova(sigma, degree) => KernelSpec::Anova { sigma, degree },
    }
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

const ORACLE_CS: [f64; 3] = [0.1, 1.0, 10.0];
/// Solver tolerance for the oracle comparison. The default 1e-3 stops with a
/// dual objective up to ~5e-4 short of the optimum on these instances.
const TIGHT_TOLERANCE: f64 = 1e-10;

struct Trained {
    x: Matrix<f64>,
    y: Vec<Class>,
    config: SvmConfig<f64>,
    model: gsvma::Model,
}

fn oracle_instances() -> Vec<gsvma_oracle::Instance> {
    (0..50u64)
        .map(|s| random_instance(7000 + s, s as usize, ORACLE_CS[(s / 4) as usize % 3]))
        .collect()
}

fn smo_vs_oracle(models: &mut Vec<Trained>) -> Verdict {
    let start = Instant::now();
    let mut worst_gap: f64 = 0.0;
    let mut disagreements = 0;
    let mut compared = 0;
    let mut unconverged = 0;
    for inst in oracle_instances() {
        let x = Matrix::from_rows(&inst.rows).unwrap();
        let y: Vec<Class> = inst.y.iter().map(|&v| Class::from_sign(v)).collect();
        let config = SvmConfig::new(kernel(inst.kernel))
            .with_c(inst.c)
            .with_tolerance(TIGHT_TOLERANCE);
        let model = train(&x, &y, &config).unwrap();
        unconverged += usize::from(!model.convergence.converged);
        let g = gsvma_oracle::gram(inst.kernel, &inst.rows);
        let reference = dense_qp(&g, &inst.y, inst.c);
        worst_gap = worst_gap.max((model.dual_objective - reference.objective).abs());
        for i in 0..x.n_rows() {
            let ours = model.decision_value(x.row(i)).unwrap();
            let theirs = decision(&g, &inst.y, &reference, i);
            if ours.abs() > 1e-6 && theirs.abs() > 1e-6 {
                compared += 1;
                disagreements += usize::from((ours > 0.0) != (theirs > 0.0));
            }
        }
        models.push(Trained {
            x,
            y,
            config,
            model,
        });
    }
    let elapsed = start.elapsed();
    check(
        worst_gap <= 1e-6 && disagreements == 0 && unconverged == 0 && elapsed < Duration::from_secs(10),
        format!(
            "50 instances, worst |dual gap| {worst_gap:.2e}, {disagreements}/{compared} sign disagreements, {elapsed:.2?}"
        ),
    )
}

fn kkt_suite(models: &[Trained]) -> Verdict {
    let mut box_exact = true;
    let mut worst_eq: f64 = 0.0;
    let mut worst_violation: f64 = 0.0;
    let mut worst_default: f64 = 0.0;
    for t in models {
        let report = check_kkt(&t.model, &t.x, &t.y, &t.config).unwrap();
        box_exact &= t
            .model
            .alphas()
            .iter()
            .all(|&a| a >= 0.0 && a <= t.config.c);
        worst_eq = worst_eq.max(report.equality_residual.abs());
        worst_violation = worst_violation.max(report.max_violation);
        // Same problem at the default tolerance.
        let default = SvmConfig::new(t.config.kernel).with_c(t.config.c);
        let model = train(&t.x, &t.y, &default).unwrap();
        let report = check_kkt(&model, &t.x, &t.y, &default).unwrap();
        box_exact &= model.alphas().iter().all(|&a| a >= 0.0 && a <= default.c);
        worst_eq = worst_eq.max(report.equality_residual.abs());
        worst_default = worst_default.max(report.max_violation);
    }
    check(
        box_exact && worst_eq <= 1e-8 && worst_violation <= 1e-3 && worst_default <= 1e-3,
        format!(
            "{} models x 2 tolerances, box exact: {box_exact}, worst |sum a_i y_i| {worst_eq:.2e}, worst violation {worst_violation:.2e} (tol 1e-10) / {worst_default:.2e} (tol 1e-3)",
            models.len()
        ),
    )
}

fn kernel_psd() -> Verdict {
    let mut rng = seeded(31);
    let mut worst = f64::INFINITY;
    for family in 0..4 {
        for _ in 0..100 {
            let n = rng.random_range(2..=20);
            let d = rng.random_range(1..=5);
            let points = random_points(&mut rng, n, d);
            let spec = RefKernel::random(family, &mut rng);
            let g = gram(&kernel(spec), &Matrix::from_rows(&points).unwrap());
            let dense = gsvma_oracle::nalgebra::DMatrix::from_fn(n, n, |i, j| g.get(i, j));
            worst = worst.min(min_eigenvalue(&dense));
        }
    }
    let mut worst_identity: f64 = 0.0;
    for _ in 0..1000 {
        let d = rng.random_range(1..=8);
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let sigma = rng.random_range(0.05..3.0);
        let degree = rng.random_range(1..=4);
        let a = KernelSpec::Anova { sigma, degree }.eval(&x, &y).unwrap();
        let b = KernelSpec::Anova {
            sigma: degree as f64 * sigma,
            degree: 1,
        }
        .eval(&x, &y)
        .unwrap();
        worst_identity = worst_identity.max((a - b).abs());
    }
    check(
        worst >= -1e-8 && worst_identity <= 1e-12,
        format!(
            "400 Gram matrices, smallest eigenvalue {worst:.2e}; ANOVA identity worst error {worst_identity:.2e}"
        ),
    )
}

fn metric_oracles() -> Verdict {
    let mut rng = seeded(41);
    let mut worst_metric: f64 = 0.0;
    for _ in 0..1000 {
        let mut cm = ConfusionMatrix::default();
        for cell in [&mut cm.tp, &mut cm.fp, &mut cm.fn_, &mut cm.tn] {
            *cell = if rng.random_bool(0.15) {
                0
            } else {
                rng.random_range(1..500)
            };
        }
        if cm.total() == 0 {
            cm.tp = 1;
        }
        let m = metrics(&cm).unwrap();
        let r = reference_metrics(cm.tp, cm.fp, cm.fn_, cm.tn);
        let ours = [m.accuracy, m.ppv, m.recall, m.specificity, m.f_measure];
        for (a, b) in ours.iter().zip(r) {
            worst_metric = worst_metric.max((a - b).abs());
        }
    }
    let mut worst_auc: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(2..80);
        let mut positive: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        positive[0] = true;
        positive[1] = false;
        let coarse = rng.random_bool(0.5);
        let scores: Vec<f64> = (0..n)
            .map(|_| {
                let s: f64 = rng.random_range(-2.0..2.0);
                if coarse {
                    (s * 2.0).round()
                } else {
                    s
                }
            })
            .collect();
        let y: Vec<Class> = positive
            .iter()
            .map(|&p| if p { Class::Positive } else { Class::Negative })
            .collect();
        let ours = auc(&roc_curve(&y, &scores).unwrap());
        worst_auc = worst_auc.max((ours - mann_whitney_auc(&positive, &scores)).abs());
    }
    check(
        worst_metric <= 1e-12 && worst_auc <= 1e-12,
        format!(
            "1000 confusion matrices, worst metric error {worst_metric:.2e}; 200 score vectors, worst AUC error {worst_auc:.2e}"
        ),
    )
}

struct GaRecovery {
    verdict: Verdict,
    histories: Vec<gsvma::genetic::GaHistory>,
}

fn ga_recovery() -> GaRecovery {
    let start = Instant::now();
    let mut hits = 0;
    let mut histories = Vec::new();
    let mut first = None;
    for seed in 0..10u64 {
        let synth = synth_generate::<f64>(&SynthConfig {
            n: 300,
            n_features: 10,
            n_informative: 2,
            noise: 0.0,
            seed,
        })
        .unwrap();
        let config = GaConfig::<f64> {
            seed,
            ..GaConfig::default()
        };
        let (best, history) = run_ga(&synth.data, &config).unwrap();
        hits += usize::from(synth.informative.iter().all(|&j| best.mask[j]));
        histories.push(history);
        if first.is_none() {
            first = Some((synth, config));
        }
    }

    // Exhaustive ranking of every non-empty mask on the first dataset.
    let (synth, config) = first.unwrap();
    let folds =
        stratified_kfold(&synth.data.labels, config.inner_cv_folds, config.fold_seed).unwrap();
    let planted: u32 = synth.informative.iter().map(|&j| 1u32 << j).sum();
    let fitness: Vec<(u32, f64)> = (1u32..1024)
        .map(|m| {
            let mask: Vec<bool> = (0..10).map(|b| m >> b & 1 == 1).collect();
            let f =
                fitness_eval(&mask, &synth.data, &folds, &config.svm, config.normalize).unwrap();
            (m, f)
        })
        .collect();
    let planted_fitness = fitness.iter().find(|p| p.0 == planted).unwrap().1;
    let rank = 1 + fitness.iter().filter(|p| p.1 > planted_fitness).count();
    let cutoff = (0.05 * 1023.0f64).ceil() as usize;
    let elapsed = start.elapsed();
    GaRecovery {
        verdict: check(
            hits >= 8 && rank <= cutoff && elapsed < Duration::from_secs(300),
            format!(
                "planted pair recovered in {hits}/10 runs; exhaustive rank {rank} of 1023 (top-5% cutoff {cutoff}, fitness {planted_fitness:.4}); {elapsed:.1?}"
            ),
        ),
        histories,
    }
}

fn ga_invariants(histories: &[gsvma::genetic::GaHistory]) -> Verdict {
    let monotone = histories.iter().all(|h| {
        h.generations
            .windows(2)
            .all(|w| w[1].best_fitness >= w[0].best_fitness)
    });
    let synth = synth_generate::<f64>(&SynthConfig {
        n: 200,
        n_features: 12,
        n_informative: 3,
        noise: 0.5,
        seed: 77,
    })
    .unwrap();
    let run = |threads| {
        let config = GaConfig::<f64> {
            population_size: 20,
            generations: 5,
            seed: 5,
            threads: Some(threads),
            ..GaConfig::default()
        };
        run_ga(&synth.data, &config).unwrap().1
    };
    let one = run(1);
    let eight = run(8);
    let same = one.to_json() == eight.to_json();
    check(
        monotone && same,
        format!(
            "best-so-far non-decreasing in {} histories: {monotone}; history identical at 1 and 8 threads: {same}",
            histories.len() + 2
        ),
    )
}

fn paper_reproduction() -> Verdict {
    let Ok(path) = std::env::var("GSVMA_CAD_CSV") else {
        return Verdict::Skipped("set GSVMA_CAD_CSV to the Z-Alizadeh Sani CSV to run".into());
    };
    let schema = RawSchema::z_alizadeh_sani();
    let bytes = match std::fs::read(&path) {
        Ok(b) => b,
        Err(e) => return Verdict::Fail(format!("cannot read {path}: {e}")),
    };
    let data = match parse_csv(bytes.as_slice(), &schema) {
        Ok(raw) => encode::<f64>(&raw),
        Err(e) => return Verdict::Fail(format!("{path}: {e}")),
    };
    let full = vec![true; data.n_columns()];
    let policy = NormalizePolicy::PerFold;
    let anova = KernelSpec::Anova {
        sigma: 1.0,
        degree: 1,
    };
    let plan = stratified_kfold(&data.labels, 10, 0).unwrap();

    let best_anova = ORACLE_CS
        .iter()
        .map(|&c| {
            let svm = SvmConfig::new(anova).with_c(c);
            cross_validate(&data, &full, &plan, &svm, policy)
                .unwrap()
                .micro
                .accuracy
        })
        .fold(0.0, f64::max);
    let a = best_anova >= 0.80;

    let start = Instant::now();
    let config = GaConfig::<f64>::default();
    let (best, _) = run_ga(&data, &config).unwrap();
    let elapsed = start.elapsed();
    let ga_folds = stratified_kfold(&data.labels, 10, config.fold_seed).unwrap();
    let baseline = fitness_eval(&full, &data, &ga_folds, &config.svm, policy).unwrap();
    let fitness = best.fitness.unwrap_or(0.0);
    let b = elapsed < Duration::from_secs(1800) && fitness >= baseline - 0.01;
    let final_acc = cross_validate(&data, &best.mask, &plan, &config.svm, policy)
        .unwrap()
        .micro
        .accuracy;

    let preset = preset_mask("paper35", &data).unwrap();
    let preset_acc = cross_validate(&data, &preset, &plan, &config.svm, policy)
        .unwrap()
        .micro
        .accuracy;
    let c = (preset_acc - 0.8945).abs() <= 0.05;
    check(
        a && b && c,
        format!(
            "(a) best ANOVA accuracy over C {{0.1,1,10}} {best_anova:.4} [{}]; (b) GA {elapsed:.0?}, fitness {fitness:.4} vs full-mask {baseline:.4}, final accuracy {final_acc:.4}{} [{}]; (c) paper35 accuracy {preset_acc:.4} [{}]",
            if a { "ok" } else { "below 0.80" },
            if (0.85..=0.92).contains(&final_acc) { " (in reproduction band)" } else { " (outside 0.85-0.92)" },
            if b { "ok" } else { "failed" },
            if c { "ok" } else { "not within 0.05 of 0.8945" },
        ),
    )
}

fn run_cli(args: &[&str], dir: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_gsvma"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "`gsvma {}` exited with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                files.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    files
}

fn cli_determinism() -> Verdict {
    let runs: Vec<Result<BTreeMap<String, Vec<u8>>, String>> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let p = dir.path();
            let data = [
                "--dataset",
                "s/synth.csv",
                "--schema",
                "s/synth.schema.toml",
            ];
            let with = |extra: &[&'static str]| -> Vec<&str> {
                let mut v = vec![];
                v.extend_from_slice(extra);
                v.extend_from_slice(&data);
                v
            };
            run_cli(
                &[
                    "synth", "--n", "150", "--noise", "0.3", "--seed", "2", "--out", "s",
                ],
                p,
            )?;
            run_cli(
                &with(&["preprocess", "--normalize", "global", "--out", "o/pre"]),
                p,
            )?;
            for method in ["svm-linear", "svm-rbf", "svm-anova"] {
                run_cli(
                    &with(&["cv", "--method", method, "--seed", "7", "--out", "o/cv"]),
                    p,
                )?;
            }
            run_cli(
                &with(&[
                    "cv",
                    "--method",
                    "svm-anova",
                    "--c-grid",
                    "0.1,1,10",
                    "--out",
                    "o/grid",
                ]),
                p,
            )?;
            run_cli(
                &with(&[
                    "gsvma",
                    "--population",
                    "8",
                    "--generations",
                    "3",
                    "--threads",
                    "2",
                    "--out",
                    "o/ga",
                ]),
                p,
            )?;
            run_cli(
                &[
                    "report",
                    "o/cv/svm-linear.report.json",
                    "o/cv/svm-rbf.report.json",
                    "o/cv/svm-anova.report.json",
                    "o/ga/gsvma.report.json",
                    "--out",
                    "o/report",
                ],
                p,
            )?;
            Ok(snapshot(&p.join("o")))
        })
        .collect();
    match (&runs[0], &runs[1]) {
        (Ok(a), Ok(b)) => {
            let checked = a
                .keys()
                .filter(|k| k.ends_with(".json") || k.ends_with(".csv"))
                .count();
            let differing: Vec<&String> = a
                .iter()
                .filter(|(k, v)| b.get(*k) != Some(*v))
                .map(|(k, _)| k)
                .collect();
            check(
                differing.is_empty() && a.len() == b.len() && checked > 0,
                format!(
                    "{} artifacts ({checked} JSON/CSV) from preprocess, cv, gsvma and report compared across two runs; differing: {differing:?}",
                    a.len()
                ),
            )
        }
        (Err(e), _) | (_, Err(e)) => Verdict::Fail(e.clone()),
    }
}

fn main() {
    let mut models = Vec::new();
    let smo = smo_vs_oracle(&mut models);
    let kkt = kkt_suite(&models);
    let recovery = ga_recovery();
    let invariants = ga_invariants(&recovery.histories);
    let results: Vec<(&str, Verdict)> = vec![
        ("1 SMO vs dense QP oracle", smo),
        ("2 KKT suite", kkt),
        ("3 kernel PSD suite", kernel_psd()),
        ("4 metric/AUC oracles", metric_oracles()),
        ("5 GA recovery", recovery.verdict),
        ("6 GA invariants", invariants),
        ("7 paper reproduction", paper_reproduction()),
        ("8 CLI determinism", cli_determinism()),
    ];

    let mut failed = 0;
    println!("acceptance criteria");
    for (name, verdict) in &results {
        let (tag, detail) = match verdict {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Verdict::Skipped(d) => ("SKIPPED", d),
        };
        println!("{tag:<8} {name}: {detail}");
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
