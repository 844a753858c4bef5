//! Inexact augmented-Lagrangian solvers.
//!
//! The joint problem learns a dictionary `D`, a low-rank representation `Z`
//! and a column-sparse error `E` with `X = DZ + E`:
//!
//! ```text
//! min ‖J‖* + λ‖E‖₂₁ + α‖R ⊙ L‖₁ + γ/2 ‖D‖²_F
//! s.t. X = DZ + E,  Z = J,  Z = L
//! ```
//!
//! [`lclrrdl_fit`] runs the alternating scheme, [`lrr_solve`] codes new data
//! against a fixed dictionary and [`rpca`] is the robust PCA baseline.

mod alm;
mod init;
mod lrr;
mod rpca;
mod updates;

pub use alm::{lclrrdl_fit, lclrrdl_fit_with, FitOptions, Lclrrdl};
pub use init::{init_dictionary, DictionaryInit};
pub use lrr::lrr_solve;
pub use rpca::{rpca, RpcaResult};
pub use updates::{update_d, update_e, update_j, update_l, update_z, update_z_without_locality};

use serde::{Deserialize, Serialize};

use crate::linalg::{fro_norm, l21_norm, nuclear_norm};
use crate::{Error, Matrix, Result};

/// Hyper-parameters shared by all solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Weight of the ℓ21 error term.
    pub lambda: f64,
    /// Weight of the locality term; zero removes the `L` block entirely.
    pub alpha: f64,
    /// Frobenius regularizer on the dictionary.
    pub gamma: f64,
    /// Error weight for RPCA and for fixed-dictionary coding. `None` means
    /// "use `lambda`".
    pub beta: Option<f64>,
    pub mu0: f64,
    pub rho: f64,
    pub mu_max: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda: 1.0,
            alpha: 0.1,
            gamma: 1.0,
            beta: None,
            mu0: 1e-6,
            rho: 1.15,
            mu_max: 1e8,
            eps: 1e-6,
            max_iter: 500,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::invalid(msg.to_string()))
            }
        };
        check(self.lambda.is_finite() && self.lambda > 0.0, "lambda must be > 0")?;
        check(self.alpha.is_finite() && self.alpha >= 0.0, "alpha must be >= 0")?;
        check(self.gamma.is_finite() && self.gamma >= 0.0, "gamma must be >= 0")?;
        if let Some(b) = self.beta {
            check(b.is_finite() && b > 0.0, "beta must be > 0")?;
        }
        check(self.mu0.is_finite() && self.mu0 > 0.0, "mu0 must be > 0")?;
        check(self.rho.is_finite() && self.rho > 1.0, "rho must be > 1")?;
        check(self.mu0 < self.mu_max, "mu0 must be below mu_max")?;
        check(self.eps.is_finite() && self.eps > 0.0, "eps must be > 0")?;
        check(self.max_iter >= 1, "max_iter must be >= 1")?;
        Ok(())
    }

    /// Error weight used when coding against a fixed dictionary.
    pub fn coding_weight(&self) -> f64 {
        self.beta.unwrap_or(self.lambda)
    }

    /// `min(mu_max, rho · mu)`.
    pub fn next_mu(&self, mu: f64) -> f64 {
        self.mu_max.min(self.rho * mu)
    }
}

/// The full iterate of the joint solver.
///
/// Shapes: `X` is d×n, `D` d×m, `Z`, `J`, `L` m×n, `E` d×n, `Y1` d×n,
/// `Y2` and `Y3` m×n.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub z: Matrix,
    pub j: Matrix,
    pub l: Matrix,
    pub e: Matrix,
    pub d: Matrix,
    pub y1: Matrix,
    pub y2: Matrix,
    pub y3: Matrix,
    pub mu: f64,
    pub iter: usize,
}

impl SolverState {
    /// All-zero iterate around the initial dictionary `d0`.
    pub fn initial(n: usize, d0: Matrix, mu0: f64) -> Self {
        let (d, m) = d0.shape();
        SolverState {
            z: Matrix::zeros(m, n),
            j: Matrix::zeros(m, n),
            l: Matrix::zeros(m, n),
            e: Matrix::zeros(d, n),
            d: d0,
            y1: Matrix::zeros(d, n),
            y2: Matrix::zeros(m, n),
            y3: Matrix::zeros(m, n),
            mu: mu0,
            iter: 0,
        }
    }
}

/// Constraint violations after one outer iteration, in infinity norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `‖X − DZ − E‖∞`
    pub feasibility: f64,
    /// `‖Z − J‖∞`
    pub z_j_gap: f64,
    /// `‖Z − L‖∞`; zero when the locality block is inactive.
    pub z_l_gap: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.feasibility.max(self.z_j_gap).max(self.z_l_gap)
    }

    pub fn below(&self, eps: f64) -> bool {
        self.feasibility < eps && self.z_j_gap < eps && self.z_l_gap < eps
    }
}

/// Output of [`lclrrdl_fit`] and [`lrr_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// m×n representation.
    pub z: Matrix,
    /// d×m dictionary.
    pub d: Matrix,
    /// d×n error.
    pub e: Matrix,
    pub iterations: usize,
    /// One entry per outer iteration.
    pub residuals: Vec<Residuals>,
    /// Penalty used in each iteration (`mu_history[k]` is `μ^k`).
    pub mu_history: Vec<f64>,
    pub converged: bool,
}

impl FitResult {
    pub fn final_residuals(&self) -> Option<Residuals> {
        self.residuals.last().copied()
    }
}

/// Weights of the joint objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveWeights {
    pub lambda: f64,
    pub alpha: f64,
    pub gamma: f64,
}

impl From<&SolverConfig> for ObjectiveWeights {
    fn from(cfg: &SolverConfig) -> Self {
        ObjectiveWeights { lambda: cfg.lambda, alpha: cfg.alpha, gamma: cfg.gamma }
    }
}

/// Augmented Lagrangian of the split problem at `state`.
///
/// `weights` is the m×n locality weight block aligned with `L`.
pub fn augmented_lagrangian(
    x: &Matrix,
    state: &SolverState,
    weights: &Matrix,
    w: ObjectiveWeights,
) -> Result<f64> {
    let s = state;
    let feas = x - &s.d * &s.z - &s.e;
    let zj = &s.z - &s.j;
    let zl = &s.z - &s.l;
    let locality: f64 = weights.zip_map(&s.l, |r, l| (r * l).abs()).sum();
    Ok(nuclear_norm(&s.j)?
        + w.lambda * l21_norm(&s.e)
        + w.alpha * locality
        + 0.5 * w.gamma * fro_norm(&s.d).powi(2)
        + s.y1.dot(&feas)
        + s.y2.dot(&zj)
        + s.y3.dot(&zl)
        + 0.5 * s.mu * (feas.norm_squared() + zj.norm_squared() + zl.norm_squared()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let cfg = SolverConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.mu_max, 1e8);
        assert_eq!(cfg.eps, 1e-6);
        assert_eq!(cfg.rho, 1.15);
    }

    #[test]
    fn config_validation() {
        let bad = [
            SolverConfig { rho: 1.0, ..Default::default() },
            SolverConfig { mu0: 1e9, ..Default::default() },
            SolverConfig { eps: 0.0, ..Default::default() },
            SolverConfig { lambda: 0.0, ..Default::default() },
            SolverConfig { alpha: -1.0, ..Default::default() },
            SolverConfig { beta: Some(0.0), ..Default::default() },
            SolverConfig { max_iter: 0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn mu_schedule_caps() {
        let cfg = SolverConfig::default();
        assert_eq!(cfg.next_mu(1.0), 1.15);
        assert_eq!(cfg.next_mu(9e7), 1e8);
        assert_eq!(cfg.next_mu(1e8), 1e8);
    }

    #[test]
    fn coding_weight_defaults_to_lambda() {
        let mut cfg = SolverConfig { lambda: 0.3, ..Default::default() };
        assert_eq!(cfg.coding_weight(), 0.3);
        cfg.beta = Some(0.7);
        assert_eq!(cfg.coding_weight(), 0.7);
    }

    #[test]
    fn config_json_fills_defaults() {
        let cfg: SolverConfig = serde_json::from_str(r#"{"lambda": 0.5}"#).unwrap();
        assert_eq!(cfg.lambda, 0.5);
        assert_eq!(cfg.rho, 1.15);
        assert!(serde_json::from_str::<SolverConfig>(r#"{"lamda": 0.5}"#).is_err());
    }
}
