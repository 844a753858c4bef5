use nalgebra::Cholesky;

use super::updates::{update_e, update_j};
use super::{FitResult, Residuals, SolverConfig};
use crate::linalg::{ensure_finite, inf_norm};
use crate::{Error, Matrix, Result};

/// Low-rank representation of `x` over a fixed dictionary `d`:
///
/// ```text
/// min ‖Z‖* + β‖E‖₂₁  s.t.  X = DZ + E
/// ```
///
/// with `β = cfg.coding_weight()`. Uses the same inexact ALM schedule as the
/// joint solver. Since `D` never changes, `DᵀD + I` is factored once.
pub fn lrr_solve(x: &Matrix, d: &Matrix, cfg: &SolverConfig) -> Result<FitResult> {
    cfg.validate()?;
    ensure_finite(x, "data matrix")?;
    ensure_finite(d, "dictionary")?;
    let (dim, n) = x.shape();
    let m = d.ncols();
    if n == 0 || m == 0 || d.nrows() != dim {
        return Err(Error::invalid(format!(
            "cannot code {dim}x{n} data with a {}x{m} dictionary",
            d.nrows()
        )));
    }
    let beta = cfg.coding_weight();
    let dt = d.transpose();
    let chol = Cholesky::new(&dt * d + Matrix::identity(m, m))
        .ok_or_else(|| Error::Numerical("DᵀD + I is not positive definite".into()))?;

    let mut z = Matrix::zeros(m, n);
    let mut e = Matrix::zeros(dim, n);
    let mut y1 = Matrix::zeros(dim, n);
    let mut y2 = Matrix::zeros(m, n);
    let mut mu = cfg.mu0;

    let mut residuals = Vec::new();
    let mut mu_history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        mu_history.push(mu);
        let j = update_j(&z, &y2, mu)?;
        z = chol.solve(&(&dt * (x - &e) + &j + (&dt * &y1 - &y2) / mu));
        e = update_e(x, d, &z, &y1, beta, mu)?;

        let feas = x - d * &z - &e;
        let zj = &z - &j;
        y1 += &feas * mu;
        y2 += &zj * mu;
        mu = cfg.next_mu(mu);
        iterations += 1;

        let res = Residuals { feasibility: inf_norm(&feas), z_j_gap: inf_norm(&zj), z_l_gap: 0.0 };
        if !res.max().is_finite() {
            return Err(Error::Numerical(format!("LRR iterate diverged at iteration {iterations}")));
        }
        residuals.push(res);
        if res.below(cfg.eps) {
            converged = true;
            break;
        }
    }
    Ok(FitResult { z, d: d.clone(), e, iterations, residuals, mu_history, converged })
}
