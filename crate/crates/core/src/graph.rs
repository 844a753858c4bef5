//! Locality weights: squared Euclidean distances between training samples.
//!
//! Small weights mark similar samples; the solver penalizes representation
//! coefficients in proportion to these weights.

use crate::linalg::ensure_finite;
use crate::{Error, Matrix, Result};

/// Result of [`normalize_columns`].
#[derive(Debug, Clone)]
pub struct Normalized {
    pub matrix: Matrix,
    /// Columns that were all zero and were left untouched.
    pub zero_columns: Vec<usize>,
}

impl Normalized {
    pub fn warnings(&self) -> Vec<String> {
        self.zero_columns
            .iter()
            .map(|j| format!("column {j} is all zero and was left unnormalized"))
            .collect()
    }
}

/// Scales every column to unit ℓ2 norm.
///
/// All-zero columns are an error unless `allow_zero` is set, in which case
/// they stay zero and are listed in [`Normalized::zero_columns`].
pub fn normalize_columns(x: &Matrix, allow_zero: bool) -> Result<Normalized> {
    ensure_finite(x, "data matrix")?;
    let mut out = x.clone();
    let mut zero_columns = Vec::new();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        let n = col.norm();
        if n == 0.0 {
            if !allow_zero {
                return Err(Error::invalid(format!("column {j} is all zero")));
            }
            zero_columns.push(j);
        } else {
            col /= n;
        }
    }
    Ok(Normalized { matrix: out, zero_columns })
}

/// Symmetric, non-negative `n × n` matrix of squared pairwise distances
/// with an exactly zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalityWeights(Matrix);

impl LocalityWeights {
    /// Wraps a matrix after checking the invariants.
    pub fn from_matrix(r: Matrix) -> Result<Self> {
        if !r.is_square() {
            return Err(Error::invalid("locality weights must be square"));
        }
        ensure_finite(&r, "locality weights")?;
        let n = r.nrows();
        for i in 0..n {
            if r[(i, i)] != 0.0 {
                return Err(Error::invalid(format!("R[{i},{i}] must be zero")));
            }
            for j in 0..n {
                if r[(i, j)] < 0.0 || r[(i, j)] != r[(j, i)] {
                    return Err(Error::invalid(format!(
                        "R must be symmetric and non-negative (entry {i},{j})"
                    )));
                }
            }
        }
        Ok(LocalityWeights(r))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }

    /// Divides every entry by the largest one, mapping weights into [0, 1].
    /// A zero matrix is returned unchanged.
    pub fn rescaled(&self) -> Self {
        let max = self.0.max();
        if max > 0.0 {
            LocalityWeights(&self.0 / max)
        } else {
            self.clone()
        }
    }

    /// Rows of `R` for the given sample indices, as an `|rows| × n` matrix.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Matrix> {
        let n = self.len();
        if let Some(&bad) = rows.iter().find(|&&r| r >= n) {
            return Err(Error::invalid(format!("row index {bad} out of range for {n} samples")));
        }
        Ok(Matrix::from_fn(rows.len(), n, |i, j| self.0[(rows[i], j)]))
    }
}

/// Builds `R_ij = ‖x_i − x_j‖²` over the columns of `x`.
///
/// Uses the Gram expansion and clamps rounding negatives to zero. Only the
/// upper triangle is computed; the lower triangle is mirrored so the result
/// is exactly symmetric.
pub fn pairwise_sq_dist(x: &Matrix) -> Result<LocalityWeights> {
    let n = x.ncols();
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 samples for pairwise distances, got {n}")));
    }
    ensure_finite(x, "data matrix")?;
    let gram = x.transpose() * x;
    let mut r = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..j {
            let d = (gram[(i, i)] + gram[(j, j)] - 2.0 * gram[(i, j)]).max(0.0);
            r[(i, j)] = d;
            r[(j, i)] = d;
        }
    }
    Ok(LocalityWeights(r))
}
