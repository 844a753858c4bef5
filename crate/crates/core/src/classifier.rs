//! Multivariate ridge-regression classifier on representation vectors.

use nalgebra::DVectorView;

use crate::linalg::{ensure_finite, solve_spd};
use crate::{Error, Matrix, Result};

/// One-hot `c × n` label matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMatrix {
    h: Matrix,
    class_ids: Vec<String>,
}

impl LabelMatrix {
    /// Builds `H` from per-sample class indices into `class_ids`.
    pub fn one_hot(labels: &[usize], class_ids: Vec<String>) -> Result<Self> {
        let c = class_ids.len();
        if c < 2 {
            return Err(Error::invalid(format!("need at least 2 classes, got {c}")));
        }
        let mut h = Matrix::zeros(c, labels.len());
        for (j, &l) in labels.iter().enumerate() {
            if l >= c {
                return Err(Error::invalid(format!(
                    "label {l} of sample {j} is out of range for {c} classes"
                )));
            }
            h[(l, j)] = 1.0;
        }
        Ok(LabelMatrix { h, class_ids })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.h
    }

    pub fn class_ids(&self) -> &[String] {
        &self.class_ids
    }
}

/// `W` (c × m) with its ridge weight and class names.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearClassifier {
    w: Matrix,
    eta: f64,
    class_ids: Vec<String>,
}

impl LinearClassifier {
    /// Reassembles a classifier, e.g. after loading `W` from disk.
    pub fn from_parts(w: Matrix, eta: f64, class_ids: Vec<String>) -> Result<Self> {
        ensure_finite(&w, "classifier weights")?;
        if w.nrows() != class_ids.len() {
            return Err(Error::invalid(format!("W has {} rows for {} classes", w.nrows(), class_ids.len())));
        }
        Ok(LinearClassifier { w, eta, class_ids })
    }

    pub fn weights(&self) -> &Matrix {
        &self.w
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn class_ids(&self) -> &[String] {
        &self.class_ids
    }

    pub fn num_features(&self) -> usize {
        self.w.ncols()
    }

    /// Class scores `W z`.
    pub fn scores(&self, z: DVectorView<'_, f64>) -> Result<Vec<f64>> {
        if z.len() != self.w.ncols() {
            return Err(Error::invalid(format!(
                "representation has {} entries, classifier expects {}",
                z.len(),
                self.w.ncols()
            )));
        }
        Ok((&self.w * z).iter().copied().collect())
    }

    /// Index of the largest score; ties go to the lowest index.
    pub fn predict_index(&self, z: DVectorView<'_, f64>) -> Result<usize> {
        let scores = self.scores(z)?;
        let mut best = 0;
        for (k, &s) in scores.iter().enumerate().skip(1) {
            if s > scores[best] {
                best = k;
            }
        }
        Ok(best)
    }

    pub fn predict(&self, z: DVectorView<'_, f64>) -> Result<&str> {
        Ok(&self.class_ids[self.predict_index(z)?])
    }

    /// Predicted class index for every column of `z`.
    pub fn predict_columns(&self, z: &Matrix) -> Result<Vec<usize>> {
        z.column_iter().map(|c| self.predict_index(c.as_view())).collect()
    }
}

/// `W = H Zᵀ (Z Zᵀ + ηI)⁻¹`, the minimizer of `‖H − WZ‖²_F + η‖W‖²_F`.
pub fn fit_ridge(z: &Matrix, labels: &LabelMatrix, eta: f64) -> Result<LinearClassifier> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::invalid(format!("eta must be > 0, got {eta}")));
    }
    ensure_finite(z, "representation")?;
    let h = labels.matrix();
    if h.ncols() != z.ncols() {
        return Err(Error::invalid(format!("{} labels for {} representation columns", h.ncols(), z.ncols())));
    }
    let m = z.nrows();
    let system = z * z.transpose() + Matrix::identity(m, m) * eta;
    // (ZZᵀ + ηI) Wᵀ = Z Hᵀ
    let wt = solve_spd(&system, &(z * h.transpose()), "ridge regression")?;
    LinearClassifier::from_parts(wt.transpose(), eta, labels.class_ids().to_vec())
}
