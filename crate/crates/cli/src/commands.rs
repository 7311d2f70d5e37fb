use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::Serialize;
use sha2::{Digest, Sha256};

use gsvma::dataset::{
    encode, normalize, parse_csv, stratified_kfold, synth_generate, write_encoded_csv, FoldPlan,
    NormalizePolicy, RawSchema, SynthConfig, TargetSpec,
};
use gsvma::eval::{cross_validate, TABLE_HEADER};
use gsvma::genetic::{run_ga, GaConfig, GaError, GaHistory};
use gsvma::kernels::KernelSpec;
use gsvma::presets::preset_mask;
use gsvma::svm::SvmConfig;
use gsvma::{Class, Dataset, EvalReport};

use crate::failure::{usage, Classify, Failure, Outcome};
use crate::options::{
    DataOpts, EvalOpts, GaOpts, Method, NoEval, NoGa, ReportArgs, RunArgs, SynthArgs, VerifyArgs,
    TABLE_ORDER,
};
use crate::svg::{line_chart, Axes, Series};

const DEFAULT_OUT: &str = "out";

struct Input {
    data: Dataset,
    file_name: String,
    sha256: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn load(opts: &DataOpts) -> Outcome<Input> {
    let path = opts
        .dataset
        .as_ref()
        .ok_or_else(|| usage("--dataset is required"))?;
    let schema = match &opts.schema {
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("cannot read schema {}", p.display()))
                .usage()?;
            RawSchema::from_toml(&text)
                .with_context(|| p.display().to_string())
                .usage()?
        }
        None => RawSchema::z_alizadeh_sani(),
    };
    let bytes = fs::read(path)
        .with_context(|| format!("cannot read dataset {}", path.display()))
        .usage()?;
    let raw = parse_csv(bytes.as_slice(), &schema)
        .with_context(|| path.display().to_string())
        .usage()?;
    Ok(Input {
        data: encode(&raw),
        file_name: path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        sha256: sha256_hex(&bytes),
    })
}

struct OutDir(PathBuf);

impl OutDir {
    fn create(opts: &DataOpts) -> Outcome<Self> {
        let dir = opts
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        fs::create_dir_all(&dir)
            .with_context(|| format!("cannot create {}", dir.display()))
            .compute()?;
        Ok(Self(dir))
    }

    fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Outcome {
        let path = self.0.join(name);
        fs::write(&path, contents)
            .with_context(|| format!("cannot write {}", path.display()))
            .compute()
    }
}

fn policy(opts: &DataOpts) -> NormalizePolicy {
    opts.normalize.map(Into::into).unwrap_or_default()
}

fn init_threads(threads: Option<usize>) -> Outcome {
    match threads {
        Some(0) => Err(usage("--threads must be at least 1")),
        Some(n) => {
            // Only the first call in a process can size the global pool.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
            Ok(())
        }
        None => Ok(()),
    }
}

fn svm_config(
    method: Method,
    opts: &EvalOpts,
    n_columns: usize,
    c: f64,
) -> Outcome<SvmConfig<f64>> {
    let kernel = match method {
        Method::SvmLinear => KernelSpec::Linear,
        Method::SvmRbf => KernelSpec::Rbf {
            gamma: opts.kernel_gamma.unwrap_or(1.0 / n_columns.max(1) as f64),
        },
        Method::SvmAnova | Method::Gsvma => KernelSpec::Anova {
            sigma: opts.kernel_sigma.unwrap_or(1.0),
            degree: opts.kernel_degree.unwrap_or(1),
        },
    };
    let config = SvmConfig::new(kernel).with_c(c);
    config.validate().usage()?;
    Ok(config)
}

fn fold_plan(data: &Dataset, folds: usize, seed: u64) -> Outcome<FoldPlan> {
    stratified_kfold(&data.labels, folds, seed).usage()
}

fn describe(input: &Input) {
    let data = &input.data;
    println!(
        "{}: {} samples ({} positive, {} negative), {} features, {} encoded columns",
        input.file_name,
        data.n_samples(),
        data.count(Class::Positive),
        data.count(Class::Negative),
        data.source_features().len(),
        data.n_columns()
    );
}

#[derive(Serialize)]
struct Summary<'a> {
    dataset: &'a str,
    sha256: &'a str,
    n_samples: usize,
    positive: usize,
    negative: usize,
    n_features: usize,
    n_columns: usize,
    normalize: NormalizePolicy,
    /// Whether encoded.csv holds min-max scaled values.
    normalized: bool,
    columns: Vec<String>,
}

pub fn preprocess(args: RunArgs<NoEval, NoGa>) -> Outcome {
    let (data_opts, _, _, dry_run) = args.resolve().usage()?;
    let input = load(&data_opts)?;
    let policy = policy(&data_opts);
    describe(&input);
    if dry_run {
        println!("dry run: nothing written");
        return Ok(());
    }
    let data = &input.data;
    let normalized = policy == NormalizePolicy::Global;
    let encoded = if normalized {
        normalize(data, policy, None).compute()?
    } else {
        data.clone()
    };
    let mut csv = Vec::new();
    write_encoded_csv(&encoded, &mut csv).compute()?;
    let summary = Summary {
        dataset: &input.file_name,
        sha256: &input.sha256,
        n_samples: data.n_samples(),
        positive: data.count(Class::Positive),
        negative: data.count(Class::Negative),
        n_features: data.source_features().len(),
        n_columns: data.n_columns(),
        normalize: policy,
        normalized,
        columns: data.column_names(),
    };
    let out = OutDir::create(&data_opts)?;
    out.write("encoded.csv", csv)?;
    out.write(
        "summary.json",
        serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n",
    )
}

fn roc_svg(report: &EvalReport) -> String {
    let title = format!("ROC: {} (AUC {:.3})", report.method, report.auc);
    line_chart(
        &Axes {
            title: &title,
            x_label: "False positive rate",
            y_label: "True positive rate",
            x_range: (0.0, 1.0),
            y_range: (0.0, 1.0),
            integer_x: false,
        },
        &[Series {
            label: &report.method,
            color: "#1f77b4",
            points: report.roc.iter().map(|p| (p.fpr, p.tpr)).collect(),
        }],
        true,
    )
}

fn fitness_svg(history: &GaHistory) -> String {
    let gens = &history.generations;
    let best: Vec<(f64, f64)> = gens
        .iter()
        .map(|g| (g.generation as f64, g.best_fitness))
        .collect();
    let mean: Vec<(f64, f64)> = gens
        .iter()
        .map(|g| (g.generation as f64, g.mean_fitness))
        .collect();
    let (lo, hi) = best
        .iter()
        .chain(&mean)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
            (a.min(p.1), b.max(p.1))
        });
    let mut y_range = ((lo * 20.0).floor() / 20.0, (hi * 20.0).ceil() / 20.0);
    if y_range.1 <= y_range.0 {
        y_range.1 = y_range.0 + 0.05;
    }
    let first = best.first().map_or(0.0, |p| p.0);
    let last = best.last().map_or(1.0, |p| p.0).max(first + 1.0);
    line_chart(
        &Axes {
            title: "GA fitness by generation",
            x_label: "Generation",
            y_label: "Cross-validated accuracy",
            x_range: (first, last),
            y_range,
            integer_x: true,
        },
        &[
            Series {
                label: "best",
                color: "#d62728",
                points: best,
            },
            Series {
                label: "mean",
                color: "#1f77b4",
                points: mean,
            },
        ],
        false,
    )
}

fn write_report(out: &OutDir, stem: &str, report: &EvalReport) -> Outcome {
    out.write(&format!("{stem}.report.json"), report.to_json() + "\n")?;
    out.write(&format!("{stem}.table.csv"), report.table_csv())?;
    out.write(&format!("{stem}.roc.svg"), roc_svg(report))
}

fn warn_unconverged(report: &EvalReport) {
    if !report.unconverged_folds.is_empty() {
        eprintln!(
            "warning: solver hit its update budget in folds {:?}",
            report.unconverged_folds
        );
    }
}

pub fn cv(args: RunArgs<EvalOpts, NoGa>) -> Outcome {
    let (data_opts, eval, _, dry_run) = args.resolve().usage()?;
    let method = eval.method.unwrap_or(Method::SvmAnova);
    if method == Method::Gsvma {
        return Err(usage("method gsvma is run by the `gsvma` command"));
    }
    init_threads(eval.threads)?;
    let input = load(&data_opts)?;
    let data = &input.data;
    let policy = policy(&data_opts);
    let seed = eval.seed.unwrap_or(0);
    let plan = fold_plan(
        data,
        eval.folds.unwrap_or(10),
        eval.fold_seed.unwrap_or(seed),
    )?;
    let grid = match &eval.c_grid {
        Some(g) if g.is_empty() => return Err(usage("--c-grid is empty")),
        Some(g) => g.clone(),
        None => vec![eval.c.unwrap_or(1.0)],
    };
    let configs = grid
        .iter()
        .map(|&c| svm_config(method, &eval, data.n_columns(), c))
        .collect::<Outcome<Vec<_>>>()?;
    describe(&input);
    if dry_run {
        println!("dry run: nothing written");
        return Ok(());
    }

    let mask = vec![true; data.n_columns()];
    let mut reports = Vec::with_capacity(configs.len());
    for config in &configs {
        let mut report = cross_validate(data, &mask, &plan, config, policy).compute()?;
        report.method = method.display().to_string();
        warn_unconverged(&report);
        reports.push(report);
    }
    let out = OutDir::create(&data_opts)?;
    let key = method.key();
    let mut best = 0;
    if reports.len() > 1 {
        let mut sweep = String::from("C,ACC,AUC\n");
        for (i, (c, report)) in grid.iter().zip(&reports).enumerate() {
            sweep.push_str(&format!(
                "{c},{:.6},{:.6}\n",
                report.micro.accuracy, report.auc
            ));
            out.write(&format!("{key}.c{c}.report.json"), report.to_json() + "\n")?;
            if report.micro.accuracy > reports[best].micro.accuracy {
                best = i;
            }
        }
        out.write(&format!("{key}.c-grid.csv"), sweep)?;
    }
    let report = &reports[best];
    write_report(&out, key, report)?;
    println!(
        "{}: accuracy {:.4}, AUC {:.4} (C = {}, fold seed {})",
        report.method, report.micro.accuracy, report.auc, grid[best], plan.seed
    );
    Ok(())
}

pub fn gsvma(args: RunArgs<EvalOpts, GaOpts>) -> Outcome {
    let (data_opts, eval, ga, dry_run) = args.resolve().usage()?;
    if eval.c_grid.is_some() {
        return Err(usage("--c-grid applies to the cv command only"));
    }
    let method = eval.method.unwrap_or(Method::Gsvma);
    init_threads(eval.threads)?;
    let input = load(&data_opts)?;
    let data = &input.data;
    let policy = policy(&data_opts);
    let seed = eval.seed.unwrap_or(0);
    let folds = eval.folds.unwrap_or(10);
    let defaults = GaConfig::<f64>::default();
    let config = GaConfig {
        population_size: ga.population.unwrap_or(defaults.population_size),
        generations: ga.generations.unwrap_or(defaults.generations),
        crossover_p: ga.crossover_p.unwrap_or(defaults.crossover_p),
        mutation_p: ga.mutation_p.unwrap_or(defaults.mutation_p),
        elitism: ga.elitism.unwrap_or(defaults.elitism),
        seed,
        inner_cv_folds: folds,
        fold_seed: ga.ga_fold_seed.unwrap_or(seed.wrapping_add(1)),
        svm: svm_config(method, &eval, data.n_columns(), eval.c.unwrap_or(1.0))?,
        normalize: policy,
        threads: eval.threads,
        ..defaults
    };
    config.validate().usage()?;
    let preset = match &ga.ga_mask {
        Some(name) => Some(preset_mask(name, data).map_err(usage)?),
        None => None,
    };
    let final_plan = fold_plan(data, folds, eval.fold_seed.unwrap_or(seed))?;
    describe(&input);
    if dry_run {
        println!("dry run: nothing written");
        return Ok(());
    }

    let out = OutDir::create(&data_opts)?;
    let mask = match preset {
        Some(mask) => mask,
        None => {
            let history = match run_ga(data, &config) {
                Ok((_, history)) => history,
                Err(GaError::Aborted { history, source }) => {
                    out.write("ga_history.json", history.to_json() + "\n")?;
                    return Err(Failure::Compute(anyhow!(
                        "GA aborted after {} generation(s), partial history written: {source}",
                        history.generations.len()
                    )));
                }
                Err(e @ GaError::InvalidConfig(_)) => return Err(Failure::Usage(e.into())),
                Err(e) => return Err(Failure::Compute(e.into())),
            };
            out.write("ga_history.json", history.to_json() + "\n")?;
            out.write("gsvma.fitness.svg", fitness_svg(&history))?;
            let best = history.generations.last().map_or(0.0, |g| g.best_fitness);
            println!(
                "GA: best fitness {best:.4} with {} columns after {} generation(s)",
                history.best_columns.len(),
                history.generations.len()
            );
            let mut mask = vec![false; data.n_columns()];
            for name in &history.best_columns {
                let j = data
                    .column_index(name)
                    .ok_or_else(|| Failure::Compute(anyhow!("unknown column {name}")))?;
                mask[j] = true;
            }
            mask
        }
    };

    let mut report = cross_validate(data, &mask, &final_plan, &config.svm, policy).compute()?;
    report.method = Method::Gsvma.display().to_string();
    warn_unconverged(&report);
    let mut selected = report.columns.join("\n");
    selected.push('\n');
    out.write("selected_features.txt", selected)?;
    write_report(&out, Method::Gsvma.key(), &report)?;
    println!(
        "{}: {} columns, accuracy {:.4}, AUC {:.4} (fold seed {})",
        report.method,
        report.columns.len(),
        report.micro.accuracy,
        report.auc,
        final_plan.seed
    );
    Ok(())
}

fn table_rank(method: &str) -> usize {
    TABLE_ORDER
        .iter()
        .position(|m| m.display() == method)
        .unwrap_or(TABLE_ORDER.len())
}

pub fn report(args: ReportArgs) -> Outcome {
    let mut reports = Vec::with_capacity(args.reports.len());
    for path in &args.reports {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))
            .usage()?;
        let report = EvalReport::from_json(&text)
            .with_context(|| path.display().to_string())
            .usage()?;
        reports.push(report);
    }
    reports.sort_by_key(|r| table_rank(&r.method));

    let rows: Vec<[String; 7]> = reports.iter().map(EvalReport::table_row).collect();
    let mut csv = TABLE_HEADER.join(",") + "\n";
    let mut md = format!("| {} |\n|{}\n", TABLE_HEADER.join(" | "), "---|".repeat(7));
    for row in &rows {
        csv.push_str(&row.join(","));
        csv.push('\n');
        md.push_str(&format!("| {} |\n", row.join(" | ")));
    }
    print!("{md}");
    if let Some(dir) = &args.out {
        let out = OutDir::create(&DataOpts {
            out: Some(dir.clone()),
            ..DataOpts::default()
        })?;
        out.write("comparison.csv", csv)?;
        out.write("comparison.md", md)?;
    }
    Ok(())
}

pub fn synth(args: SynthArgs) -> Outcome {
    let synth = synth_generate::<f64>(&SynthConfig {
        n: args.n,
        n_features: args.features,
        n_informative: args.informative,
        noise: args.noise,
        seed: args.seed,
    })
    .usage()?;
    let data = &synth.data;
    let names = data.column_names();
    let mut csv = names.join(",") + ",class\n";
    for (row, label) in data.matrix.rows().zip(&data.labels) {
        for v in row {
            csv.push_str(&format!("{v},"));
        }
        csv.push_str(if label.is_positive() {
            "pos\n"
        } else {
            "neg\n"
        });
    }
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let schema = RawSchema::numeric(
        &name_refs,
        TargetSpec {
            column: "class".into(),
            positive: "pos".into(),
            negative: "neg".into(),
        },
    );
    let planted: String = synth
        .informative
        .iter()
        .map(|&j| names[j].clone() + "\n")
        .collect();
    let out = OutDir::create(&DataOpts {
        out: Some(args.out.clone()),
        ..DataOpts::default()
    })?;
    out.write("synth.csv", csv)?;
    out.write("synth.schema.toml", schema.to_toml())?;
    out.write("planted.txt", &planted)?;
    println!(
        "wrote {} samples with {} columns to {} (informative: {})",
        data.n_samples(),
        names.len(),
        args.out.display(),
        planted.trim_end().replace('\n', ", ")
    );
    Ok(())
}

pub fn verify(args: VerifyArgs) -> Outcome {
    let bytes = fs::read(&args.dataset)
        .with_context(|| format!("cannot read {}", args.dataset.display()))
        .usage()?;
    let digest = sha256_hex(&bytes);
    println!("{digest}  {}", args.dataset.display());
    match args.expect {
        Some(expected) if !expected.trim().eq_ignore_ascii_case(&digest) => {
            Err(Failure::Compute(anyhow!(
                "checksum mismatch for {}: expected {}",
                display(&args.dataset),
                expected.trim()
            )))
        }
        _ => Ok(()),
    }
}

fn display(path: &Path) -> String {
    path.display().to_string()
}
