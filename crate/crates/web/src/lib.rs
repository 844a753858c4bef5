//! WebAssembly bindings for the demo page in `www/`.
//!
//! Every export takes plain numbers or a JSON string and returns a JSON
//! string. Failures come back as `{"error": "..."}` so the page never has
//! to catch exceptions.

use lclrr::classifier::{fit_ridge, LabelMatrix};
use lclrr::data::{gen_synthetic, split_train_test, SynthSpec};
use lclrr::graph::{normalize_columns, pairwise_sq_dist};
use lclrr::harness::{accuracy_pct, nearest_neighbor};
use lclrr::linalg::singular_values;
use lclrr::prox::{column_norms, svt, Threshold};
use lclrr::solver::{init_dictionary, lclrrdl_fit, lrr_solve, SolverConfig};
use lclrr::Matrix;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

fn respond<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e),
    }
}

fn error_json(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

#[derive(Serialize)]
pub struct SvtOutput {
    pub before: Vec<f64>,
    pub after: Vec<f64>,
    pub rank_before: usize,
    pub rank_after: usize,
    /// Row-major entries of the thresholded matrix.
    pub matrix: Vec<f64>,
}

fn rank(s: &[f64]) -> usize {
    s.iter().filter(|v| **v > 1e-9).count()
}

/// Singular value thresholding of a row-major `rows × cols` matrix.
pub fn svt_explore(values: &[f64], rows: usize, cols: usize, tau: f64) -> Result<SvtOutput, String> {
    if values.len() != rows * cols {
        return Err(format!("{} values for a {rows}x{cols} matrix", values.len()));
    }
    let m = Matrix::from_row_slice(rows, cols, values);
    let t = Threshold::new(tau).map_err(|e| e.to_string())?;
    let out = svt(&m, t).map_err(|e| e.to_string())?;
    let before = singular_values(&m).map_err(|e| e.to_string())?;
    let after = singular_values(&out).map_err(|e| e.to_string())?;
    Ok(SvtOutput {
        rank_before: rank(&before),
        rank_after: rank(&after),
        before,
        after,
        matrix: out.transpose().iter().copied().collect(),
    })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct DemoParams {
    pub classes: usize,
    pub dim: usize,
    pub subspace_dim: usize,
    pub per_class: usize,
    pub corruption: f64,
    pub magnitude: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub atoms_per_class: usize,
    pub train_per_class: usize,
    pub eta: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for DemoParams {
    fn default() -> Self {
        DemoParams {
            classes: 3,
            dim: 50,
            subspace_dim: 4,
            per_class: 30,
            corruption: 0.2,
            magnitude: 3.0,
            lambda: 1.0,
            alpha: 0.1,
            beta: 0.5,
            atoms_per_class: 5,
            train_per_class: 15,
            eta: 0.5,
            max_iter: 500,
            seed: 0,
        }
    }
}

impl DemoParams {
    fn spec(&self) -> SynthSpec {
        SynthSpec {
            num_classes: self.classes,
            ambient_dim: self.dim,
            subspace_dim: self.subspace_dim,
            samples_per_class: self.per_class,
            corruption_fraction: self.corruption,
            corruption_magnitude: self.magnitude,
            seed: self.seed,
        }
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig {
            lambda: self.lambda,
            alpha: self.alpha,
            beta: Some(self.beta),
            max_iter: self.max_iter,
            seed: self.seed,
            ..Default::default()
        }
    }
}

fn parse_params(json: &str) -> Result<DemoParams, String> {
    if json.trim().is_empty() {
        return Ok(DemoParams::default());
    }
    serde_json::from_str(json).map_err(|e| e.to_string())
}

#[derive(Serialize)]
pub struct FitOutput {
    pub iterations: usize,
    pub converged: bool,
    /// Largest residual per iteration.
    pub residuals: Vec<f64>,
    pub mu: Vec<f64>,
    /// ℓ2 norm of each column of the learned error.
    pub error_norms: Vec<f64>,
    pub corrupted: Vec<bool>,
}

/// Fits the joint solver on one synthetic draw.
pub fn synthetic_fit(p: &DemoParams) -> Result<FitOutput, String> {
    let ds = gen_synthetic(&p.spec()).map_err(|e| e.to_string())?;
    let x = normalize_columns(&ds.x, false).map_err(|e| e.to_string())?.matrix;
    let r = pairwise_sq_dist(&x).map_err(|e| e.to_string())?;
    let init = init_dictionary(&x, &ds.labels, p.atoms_per_class, p.seed).map_err(|e| e.to_string())?;
    let fit = lclrrdl_fit(&x, &r, &init, &p.solver()).map_err(|e| e.to_string())?;
    Ok(FitOutput {
        iterations: fit.iterations,
        converged: fit.converged,
        residuals: fit.residuals.iter().map(|r| r.max()).collect(),
        mu: fit.mu_history.clone(),
        error_norms: column_norms(&fit.e).iter().copied().collect(),
        corrupted: ds.corrupted_mask.unwrap_or_default(),
    })
}

#[derive(Serialize)]
pub struct ClassifyOutput {
    pub accuracy_pct: f64,
    pub nn_accuracy_pct: f64,
    /// `confusion[true][predicted]`
    pub confusion: Vec<Vec<usize>>,
    pub test_corrupted: Vec<bool>,
    pub test_correct: Vec<bool>,
}

/// Train on a random split of one synthetic draw and classify the rest.
pub fn classify(p: &DemoParams) -> Result<ClassifyOutput, String> {
    let ds = gen_synthetic(&p.spec()).map_err(|e| e.to_string())?;
    let (train, test) = split_train_test(&ds, p.train_per_class, p.seed).map_err(|e| e.to_string())?;
    let x = normalize_columns(&train.x, false).map_err(|e| e.to_string())?.matrix;
    let xt = normalize_columns(&test.x, false).map_err(|e| e.to_string())?.matrix;
    let r = pairwise_sq_dist(&x).map_err(|e| e.to_string())?;
    let init = init_dictionary(&x, &train.labels, p.atoms_per_class, p.seed).map_err(|e| e.to_string())?;
    let cfg = p.solver();
    let fit = lclrrdl_fit(&x, &r, &init, &cfg).map_err(|e| e.to_string())?;
    let h = LabelMatrix::one_hot(&train.labels, ds.class_names.clone()).map_err(|e| e.to_string())?;
    let clf = fit_ridge(&fit.z, &h, p.eta).map_err(|e| e.to_string())?;
    let code = lrr_solve(&xt, &fit.d, &cfg).map_err(|e| e.to_string())?;
    let pred = clf.predict_columns(&code.z).map_err(|e| e.to_string())?;
    let nn = nearest_neighbor(&train.x, &train.labels, &test.x);
    let k = ds.num_classes();
    let mut confusion = vec![vec![0; k]; k];
    for (&t, &q) in test.labels.iter().zip(&pred) {
        confusion[t][q] += 1;
    }
    Ok(ClassifyOutput {
        accuracy_pct: accuracy_pct(&pred, &test.labels),
        nn_accuracy_pct: accuracy_pct(&nn, &test.labels),
        confusion,
        test_corrupted: test.corrupted_mask.clone().unwrap_or_default(),
        test_correct: pred.iter().zip(&test.labels).map(|(a, b)| a == b).collect(),
    })
}

#[wasm_bindgen(js_name = svtExplore)]
pub fn svt_explore_js(values: Vec<f64>, rows: usize, cols: usize, tau: f64) -> String {
    respond(svt_explore(&values, rows, cols, tau))
}

#[wasm_bindgen(js_name = syntheticFit)]
pub fn synthetic_fit_js(params: &str) -> String {
    respond(parse_params(params).and_then(|p| synthetic_fit(&p)))
}

#[wasm_bindgen(js_name = classifyDemo)]
pub fn classify_js(params: &str) -> String {
    respond(parse_params(params).and_then(|p| classify(&p)))
}
