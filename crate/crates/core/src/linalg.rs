//! Small dense-algebra helpers shared by the solvers.

use nalgebra::Cholesky;

use crate::{Error, Matrix, Result};

/// Largest absolute entry; zero for an empty matrix.
pub fn inf_norm(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Frobenius norm.
pub fn fro_norm(m: &Matrix) -> f64 {
    m.norm()
}

/// Sum of singular values.
pub fn nuclear_norm(m: &Matrix) -> Result<f64> {
    Ok(singular_values(m)?.iter().sum())
}

/// Sum of column ℓ2 norms.
pub fn l21_norm(m: &Matrix) -> f64 {
    m.column_iter().map(|c| c.norm()).sum()
}

pub fn ensure_finite(m: &Matrix, what: &str) -> Result<()> {
    if let Some(pos) = m.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("{what} has a non-finite entry at linear index {pos}")));
    }
    Ok(())
}

pub fn ensure_shape(m: &Matrix, rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.shape() != (rows, cols) {
        return Err(Error::invalid(format!("{what} is {}x{}, expected {rows}x{cols}", m.nrows(), m.ncols())));
    }
    Ok(())
}

/// Economy SVD `M = U · diag(s) · Vᵀ` with singular values in descending
/// order.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v_t: Matrix,
}

impl ThinSvd {
    pub fn recompose(&self) -> Matrix {
        let scaled = Matrix::from_fn(self.u.nrows(), self.s.len(), |i, k| self.u[(i, k)] * self.s[k]);
        scaled * &self.v_t
    }
}

/// Economy SVD, computed with faer's bidiagonal divide-and-conquer.
pub fn thin_svd(m: &Matrix) -> Result<ThinSvd> {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Ok(ThinSvd { u: Matrix::zeros(r, 0), s: Vec::new(), v_t: Matrix::zeros(0, c) });
    }
    let fm = faer::Mat::<f64>::from_fn(r, c, |i, j| m[(i, j)]);
    let svd = fm.thin_svd().map_err(|e| {
        Error::Numerical(format!(
            "SVD failed on a {r}x{c} matrix ({e:?}; max |entry| = {:e}, fro = {:e})",
            inf_norm(m),
            fro_norm(m)
        ))
    })?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    Ok(ThinSvd {
        u: Matrix::from_fn(r, k, |i, j| u[(i, j)]),
        s: (0..k).map(|i| s[i]).collect(),
        v_t: Matrix::from_fn(k, c, |i, j| v[(j, i)]),
    })
}

/// Singular values in descending order.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    Ok(thin_svd(m)?.s)
}

/// Solves `a * x = b` for a symmetric positive definite `a`.
///
/// Falls back to LU when the Cholesky factorization breaks down from
/// rounding; reports a numerical error if both fail.
pub fn solve_spd(a: &Matrix, b: &Matrix, what: &str) -> Result<Matrix> {
    if let Some(chol) = Cholesky::new(a.clone()) {
        return Ok(chol.solve(b));
    }
    a.clone().lu().solve(b).ok_or_else(|| {
        Error::Numerical(format!("{what}: system matrix ({}x{}) is singular", a.nrows(), a.ncols()))
    })
}

/// Solves `x * a = b` for a symmetric positive definite `a`.
pub fn solve_spd_right(a: &Matrix, b: &Matrix, what: &str) -> Result<Matrix> {
    Ok(solve_spd(a, &b.transpose(), what)?.transpose())
}
