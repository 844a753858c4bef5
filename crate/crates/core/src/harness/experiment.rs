use std::time::Instant;

use super::config::{DataSource, ExperimentConfig};
use super::model::{Model, TrainOptions, Trained};
use super::report::{RepetitionRecord, Report};
use crate::classifier::{fit_ridge, LabelMatrix};
use crate::data::{gen_synthetic, load_image_dir, occlude_blocks, split_train_test, Dataset};
use crate::graph::normalize_columns;
use crate::solver::{init_dictionary, lrr_solve, rpca, SolverConfig};
use crate::{Error, Matrix, Result};

/// Loads the dataset for repetition `rep`. Synthetic sources draw fresh
/// data per repetition; image folders are loaded once and re-split.
pub fn load_source(source: &DataSource, rep: usize) -> Result<Dataset> {
    match source {
        DataSource::Synthetic(spec) => {
            let mut spec = spec.clone();
            spec.seed = spec.seed.wrapping_add(rep as u64);
            gen_synthetic(&spec)
        }
        DataSource::ImageDir { path, rate, occlusion } => {
            let mut ds = load_image_dir(path, *rate)?;
            if let Some(o) = occlusion {
                occlude_blocks(&mut ds, o.block_frac, o.fraction, o.seed)?;
            }
            Ok(ds)
        }
    }
}

/// Percentage of `pred` equal to `truth`.
pub fn accuracy_pct(pred: &[usize], truth: &[usize]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    100.0 * hits as f64 / truth.len() as f64
}

/// 1-nearest-neighbour labels in Euclidean distance; ties go to the
/// earliest training column.
pub fn nearest_neighbor(train: &Matrix, train_labels: &[usize], test: &Matrix) -> Vec<usize> {
    test.column_iter()
        .map(|t| {
            let mut best = (f64::INFINITY, 0);
            for (i, c) in train.column_iter().enumerate() {
                let d = (c - t).norm_squared();
                if d < best.0 {
                    best = (d, train_labels[i]);
                }
            }
            best.1
        })
        .collect()
}

struct RepOutcome {
    record: RepetitionRecord,
    warnings: Vec<String>,
    meta: String,
}

fn train_options(cfg: &ExperimentConfig, seed: u64) -> TrainOptions {
    TrainOptions {
        dict_items_per_class: cfg.dict_items_per_class,
        eta: cfg.eta,
        normalize: cfg.normalize,
        rescale_weights: cfg.rescale_weights,
        seed,
    }
}

fn solver_for(cfg: &ExperimentConfig, seed: u64) -> SolverConfig {
    SolverConfig { seed, ..cfg.solver.clone() }
}

fn run_repetition(cfg: &ExperimentConfig, rep: usize, shared: Option<&Dataset>) -> Result<RepOutcome> {
    let seed = cfg.repetition_seed(rep);
    let owned;
    let ds = match shared {
        Some(ds) => ds,
        None => {
            owned = load_source(&cfg.source, rep)?;
            &owned
        }
    };
    let (train, test) = split_train_test(ds, cfg.per_class_train, seed)?;

    let Trained { model, fit, mut warnings, fit_seconds } =
        Model::train(&train, &solver_for(cfg, seed), &train_options(cfg, seed))?;
    let pred = model.predict(&test.x)?;
    // resubstitution goes through the same coding path as the test set
    let train_pred = model.predict(&train.x)?;
    let nn_pred = nearest_neighbor(&train.x, &train.labels, &test.x);
    for w in warnings.iter_mut() {
        *w = format!("repetition {rep}: {w}");
    }
    Ok(RepOutcome {
        record: RepetitionRecord {
            repetition: rep,
            seed,
            accuracy_pct: accuracy_pct(&pred, &test.labels),
            nn_accuracy_pct: accuracy_pct(&nn_pred, &test.labels),
            train_accuracy_pct: accuracy_pct(&train_pred, &train.labels),
            iterations: fit.iterations,
            converged: fit.converged,
            train_seconds: cfg.record_timing.then_some(fit_seconds),
        },
        warnings,
        meta: ds.meta.clone(),
    })
}

fn run_rpca_repetition(cfg: &ExperimentConfig, rep: usize, shared: Option<&Dataset>) -> Result<RepOutcome> {
    let seed = cfg.repetition_seed(rep);
    let owned;
    let ds = match shared {
        Some(ds) => ds,
        None => {
            owned = load_source(&cfg.source, rep)?;
            &owned
        }
    };
    let (train, test) = split_train_test(ds, cfg.per_class_train, seed)?;
    let prep = |x: &Matrix| -> Result<Matrix> {
        if cfg.normalize {
            Ok(normalize_columns(x, true)?.matrix)
        } else {
            Ok(x.clone())
        }
    };
    let x = prep(&train.x)?;
    let xt = prep(&test.x)?;
    let start = Instant::now();
    let solver = solver_for(cfg, seed);
    let beta = 1.0 / (x.nrows().max(x.ncols()) as f64).sqrt();
    let low_rank = rpca(&x, beta, &solver)?;
    let mut warnings = Vec::new();
    if !low_rank.converged {
        warnings.push(format!("repetition {rep}: rpca stopped at max_iter={}", low_rank.iterations));
    }
    let init = init_dictionary(&low_rank.a, &train.labels, cfg.dict_items_per_class, seed)?;
    let code_train = lrr_solve(&x, &init.atoms, &solver)?;
    let h = LabelMatrix::one_hot(&train.labels, train.class_names.clone())?;
    let clf = fit_ridge(&code_train.z, &h, cfg.eta)?;
    let elapsed = start.elapsed().as_secs_f64();
    let code_test = lrr_solve(&xt, &init.atoms, &solver)?;
    let pred = clf.predict_columns(&code_test.z)?;
    let nn_pred = nearest_neighbor(&train.x, &train.labels, &test.x);
    Ok(RepOutcome {
        record: RepetitionRecord {
            repetition: rep,
            seed,
            accuracy_pct: accuracy_pct(&pred, &test.labels),
            nn_accuracy_pct: accuracy_pct(&nn_pred, &test.labels),
            train_accuracy_pct: accuracy_pct(&clf.predict_columns(&code_train.z)?, &train.labels),
            iterations: low_rank.iterations,
            converged: low_rank.converged,
            train_seconds: cfg.record_timing.then_some(elapsed),
        },
        warnings,
        meta: ds.meta.clone(),
    })
}

/// Thread count requested through `LCLRR_THREADS`, if any.
pub fn requested_threads() -> Option<usize> {
    std::env::var("LCLRR_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&t| t > 0)
}

#[cfg(feature = "parallel")]
fn map_repetitions<F>(reps: usize, f: F) -> Vec<Result<RepOutcome>>
where
    F: Fn(usize) -> Result<RepOutcome> + Sync + Send,
{
    use rayon::prelude::*;
    let run = || (0..reps).into_par_iter().map(&f).collect();
    match requested_threads().map(|t| rayon::ThreadPoolBuilder::new().num_threads(t).build()) {
        Some(Ok(pool)) => pool.install(run),
        _ => run(),
    }
}

#[cfg(not(feature = "parallel"))]
fn map_repetitions<F>(reps: usize, f: F) -> Vec<Result<RepOutcome>>
where
    F: Fn(usize) -> Result<RepOutcome>,
{
    (0..reps).map(f).collect()
}

fn collect(method: &str, cfg: &ExperimentConfig, outcomes: Vec<Result<RepOutcome>>) -> Result<Report> {
    let mut records = Vec::with_capacity(outcomes.len());
    let mut warnings = Vec::new();
    let mut meta = String::new();
    for o in outcomes {
        let o = o?;
        records.push(o.record);
        warnings.extend(o.warnings);
        meta = o.meta;
    }
    Ok(Report::new(method, cfg, meta, records, warnings))
}

fn shared_dataset(cfg: &ExperimentConfig) -> Result<Option<Dataset>> {
    match &cfg.source {
        DataSource::Synthetic(_) => Ok(None),
        src => load_source(src, 0).map(Some),
    }
}

/// Repeated split / train / test of the joint method with a 1-NN baseline.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let shared = shared_dataset(cfg)?;
    let outcomes = map_repetitions(cfg.repetitions, |rep| run_repetition(cfg, rep, shared.as_ref()));
    collect("lclrrdl", cfg, outcomes)
}

/// The same protocol with a dictionary taken from the RPCA low-rank part of
/// the training data (β = 1/√max(d, n)) and LRR coding of both sets.
pub fn run_rpca_baseline(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let shared = shared_dataset(cfg)?;
    let outcomes = map_repetitions(cfg.repetitions, |rep| run_rpca_repetition(cfg, rep, shared.as_ref()));
    collect("rpca+lrr", cfg, outcomes)
}

/// Train a model on a whole dataset, as the `fit` command does.
pub fn fit_dataset(ds: &Dataset, cfg: &ExperimentConfig) -> Result<(Model, Vec<String>)> {
    cfg.validate()?;
    if ds.num_classes() < 2 {
        return Err(Error::InvalidInput("need at least 2 classes".into()));
    }
    let t = Model::train(ds, &solver_for(cfg, cfg.seed), &train_options(cfg, cfg.seed))?;
    Ok((t.model, t.warnings))
}
