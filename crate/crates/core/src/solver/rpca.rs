use super::SolverConfig;
use crate::linalg::{ensure_finite, inf_norm};
use crate::prox::{svt, weighted_l1_shrink, Threshold};
use crate::{Error, Matrix, Result};

/// Output of [`rpca`].
#[derive(Debug, Clone, PartialEq)]
pub struct RpcaResult {
    /// Low-rank component.
    pub a: Matrix,
    /// Sparse component.
    pub e: Matrix,
    pub iterations: usize,
    /// `‖X − A − E‖∞` per iteration.
    pub residuals: Vec<f64>,
    pub converged: bool,
}

/// Robust PCA by inexact ALM:
///
/// ```text
/// min ‖A‖* + β‖E‖₁  s.t.  X = A + E
/// ```
///
/// Uses `mu0`, `rho`, `mu_max`, `eps` and `max_iter` from `cfg`.
pub fn rpca(x: &Matrix, beta: f64, cfg: &SolverConfig) -> Result<RpcaResult> {
    cfg.validate()?;
    ensure_finite(x, "data matrix")?;
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid(format!("beta must be > 0, got {beta}")));
    }
    let (r, c) = x.shape();
    let ones = Matrix::from_element(r, c, 1.0);
    let mut a = Matrix::zeros(r, c);
    let mut e = Matrix::zeros(r, c);
    let mut y = Matrix::zeros(r, c);
    let mut mu = cfg.mu0;
    let mut residuals = Vec::new();
    let mut converged = false;

    while residuals.len() < cfg.max_iter {
        a = svt(&(x - &e + &y / mu), Threshold::new(1.0 / mu)?)?;
        e = weighted_l1_shrink(&(x - &a + &y / mu), &ones, Threshold::new(beta / mu)?)?;
        let feas = x - &a - &e;
        y += &feas * mu;
        mu = cfg.next_mu(mu);
        let res = inf_norm(&feas);
        residuals.push(res);
        if res < cfg.eps {
            converged = true;
            break;
        }
    }
    Ok(RpcaResult { a, e, iterations: residuals.len(), residuals, converged })
}
