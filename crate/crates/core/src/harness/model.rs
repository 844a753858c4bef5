//! A trained dictionary plus classifier, and its on-disk form.
//!
//! A model directory holds:
//!
//! ```text
//! model.json        class ids, eta, solver settings, convergence summary
//! dictionary.lrmx   d×m learned dictionary
//! classifier.lrmx   c×m ridge weights
//! residuals.csv     per-iteration residuals and μ of the training run
//! ```

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classifier::{fit_ridge, LabelMatrix, LinearClassifier};
use crate::data::{load_matrix, save_matrix, Dataset};
use crate::graph::{normalize_columns, pairwise_sq_dist};
use crate::solver::{init_dictionary, lclrrdl_fit, lrr_solve, FitResult, SolverConfig};
use crate::{Error, Matrix, Result};

const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelMeta {
    version: u32,
    class_ids: Vec<String>,
    eta: f64,
    normalize: bool,
    solver: SolverConfig,
    iterations: usize,
    converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub dictionary: Matrix,
    pub classifier: LinearClassifier,
    pub solver: SolverConfig,
    /// Whether inputs are unit-normalized before coding.
    pub normalize: bool,
    pub iterations: usize,
    pub converged: bool,
    /// `(feasibility, z_j_gap, z_l_gap, μ)` per training iteration.
    pub history: Vec<[f64; 4]>,
}

/// Training settings independent of where the data came from.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub dict_items_per_class: usize,
    pub eta: f64,
    pub normalize: bool,
    pub rescale_weights: bool,
    pub seed: u64,
}

fn prepare(x: &Matrix, normalize: bool) -> Result<(Matrix, Vec<String>)> {
    if normalize {
        let n = normalize_columns(x, true)?;
        let warnings = n.warnings();
        Ok((n.matrix, warnings))
    } else {
        Ok((x.clone(), Vec::new()))
    }
}

/// Output of [`Model::train`].
#[derive(Debug, Clone)]
pub struct Trained {
    pub model: Model,
    pub fit: FitResult,
    pub warnings: Vec<String>,
    /// Wall-clock time of the joint solve alone.
    pub fit_seconds: f64,
}

impl Model {
    /// Fits the joint solver on `train` and a ridge classifier on its
    /// representation.
    pub fn train(train: &Dataset, solver: &SolverConfig, opts: &TrainOptions) -> Result<Trained> {
        train.validate()?;
        if train.x.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidInput("training data is all zero".into()));
        }
        let (x, mut warnings) = prepare(&train.x, opts.normalize)?;
        let mut r = pairwise_sq_dist(&x)?;
        if opts.rescale_weights {
            r = r.rescaled();
        }
        let init = init_dictionary(&x, &train.labels, opts.dict_items_per_class, opts.seed)?;
        let start = Instant::now();
        let fit = lclrrdl_fit(&x, &r, &init, solver)?;
        let fit_seconds = start.elapsed().as_secs_f64();
        if !fit.converged {
            warnings.push(format!(
                "solver stopped at max_iter={} with residual {:.3e}",
                fit.iterations,
                fit.final_residuals().map_or(f64::NAN, |r| r.max())
            ));
        }
        let h = LabelMatrix::one_hot(&train.labels, train.class_names.clone())?;
        let classifier = fit_ridge(&fit.z, &h, opts.eta)?;
        let history = fit
            .residuals
            .iter()
            .zip(&fit.mu_history)
            .map(|(r, &mu)| [r.feasibility, r.z_j_gap, r.z_l_gap, mu])
            .collect();
        let model = Model {
            dictionary: fit.d.clone(),
            classifier,
            solver: solver.clone(),
            normalize: opts.normalize,
            iterations: fit.iterations,
            converged: fit.converged,
            history,
        };
        Ok(Trained { model, fit, warnings, fit_seconds })
    }

    pub fn class_ids(&self) -> &[String] {
        self.classifier.class_ids()
    }

    /// Codes the columns of `x` against the dictionary.
    pub fn encode(&self, x: &Matrix) -> Result<FitResult> {
        if x.nrows() != self.dictionary.nrows() {
            return Err(Error::InvalidInput(format!(
                "samples have dimension {}, model expects {}",
                x.nrows(),
                self.dictionary.nrows()
            )));
        }
        let (x, _) = prepare(x, self.normalize)?;
        lrr_solve(&x, &self.dictionary, &self.solver)
    }

    /// Predicted class index per column of `x`.
    pub fn predict(&self, x: &Matrix) -> Result<Vec<usize>> {
        let code = self.encode(x)?;
        self.classifier.predict_columns(&code.z)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let meta = ModelMeta {
            version: MODEL_VERSION,
            class_ids: self.class_ids().to_vec(),
            eta: self.classifier.eta(),
            normalize: self.normalize,
            solver: self.solver.clone(),
            iterations: self.iterations,
            converged: self.converged,
        };
        let json = serde_json::to_string_pretty(&meta).expect("model meta serializes");
        let path = dir.join("model.json");
        std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
        save_matrix(&self.dictionary, &dir.join("dictionary.lrmx"))?;
        save_matrix(self.classifier.weights(), &dir.join("classifier.lrmx"))?;
        let mut csv = String::from("iteration,feasibility,z_j_gap,z_l_gap,mu\n");
        for (k, h) in self.history.iter().enumerate() {
            let _ = writeln!(csv, "{},{:?},{:?},{:?},{:?}", k + 1, h[0], h[1], h[2], h[3]);
        }
        let path = dir.join("residuals.csv");
        std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))
    }

    pub fn load(dir: &Path) -> Result<Model> {
        let path = dir.join("model.json");
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let meta: ModelMeta = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        if meta.version != MODEL_VERSION {
            return Err(Error::InvalidInput(format!("unsupported model version {}", meta.version)));
        }
        let dictionary = load_matrix(&dir.join("dictionary.lrmx"))?;
        let w = load_matrix(&dir.join("classifier.lrmx"))?;
        if w.ncols() != dictionary.ncols() {
            return Err(Error::InvalidInput(format!(
                "classifier has {} features but dictionary has {} atoms",
                w.ncols(),
                dictionary.ncols()
            )));
        }
        let classifier = LinearClassifier::from_parts(w, meta.eta, meta.class_ids)?;
        let history = match std::fs::read_to_string(dir.join("residuals.csv")) {
            Ok(text) => parse_history(&text)?,
            Err(_) => Vec::new(),
        };
        Ok(Model {
            dictionary,
            classifier,
            solver: meta.solver,
            normalize: meta.normalize,
            iterations: meta.iterations,
            converged: meta.converged,
            history,
        })
    }
}

fn parse_history(text: &str) -> Result<Vec<[f64; 4]>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let vals: Vec<f64> = line
                .split(',')
                .skip(1)
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::InvalidInput(format!("bad residuals line '{line}'")))?;
            <[f64; 4]>::try_from(vals)
                .map_err(|_| Error::InvalidInput(format!("bad residuals line '{line}'")))
        })
        .collect()
}
