use super::updates::{update_d, update_e, update_j, update_l, update_z, update_z_without_locality};
use super::{DictionaryInit, FitResult, Residuals, SolverConfig, SolverState};
use crate::graph::LocalityWeights;
use crate::linalg::{ensure_finite, inf_norm};
use crate::{Error, Matrix, Result};

/// Switches that change which blocks the joint solver updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitOptions {
    /// When false the dictionary stays at its initial value.
    pub learn_dictionary: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { learn_dictionary: true }
    }
}

/// Stepwise driver for the joint problem.
///
/// Each [`step`](Lclrrdl::step) performs one outer iteration: J, Z, L, E, D
/// updates, multiplier ascent, then `μ ← min(μ_max, ρμ)`. With `alpha = 0`
/// the constraint `Z = L` carries no penalty, so the `L` block and `Y3`
/// are dropped and the Z update uses `(DᵀD + I)`.
#[derive(Debug, Clone)]
pub struct Lclrrdl<'a> {
    x: &'a Matrix,
    /// m×n locality weights aligned with `Z`; `None` when `alpha = 0`.
    weights: Option<Matrix>,
    cfg: SolverConfig,
    error_weight: f64,
    opts: FitOptions,
    state: SolverState,
}

impl<'a> Lclrrdl<'a> {
    pub fn new(
        x: &'a Matrix,
        r: &LocalityWeights,
        init: &DictionaryInit,
        cfg: &SolverConfig,
        opts: FitOptions,
    ) -> Result<Self> {
        cfg.validate()?;
        let n = x.ncols();
        if r.len() != n {
            return Err(Error::invalid(format!(
                "locality weights are {0}x{0} but X has {n} samples",
                r.len()
            )));
        }
        let weights = if cfg.alpha > 0.0 { Some(locality_block(r, init, n)?) } else { None };
        Self::with_weights(x, weights, init.atoms.clone(), cfg, cfg.lambda, opts)
    }

    pub(super) fn with_weights(
        x: &'a Matrix,
        weights: Option<Matrix>,
        d0: Matrix,
        cfg: &SolverConfig,
        error_weight: f64,
        opts: FitOptions,
    ) -> Result<Self> {
        cfg.validate()?;
        ensure_finite(x, "data matrix")?;
        ensure_finite(&d0, "initial dictionary")?;
        let (dim, n) = x.shape();
        if n == 0 || dim == 0 {
            return Err(Error::invalid("data matrix is empty"));
        }
        if d0.nrows() != dim || d0.ncols() == 0 {
            return Err(Error::invalid(format!(
                "dictionary is {}x{}, expected {dim} rows and at least one atom",
                d0.nrows(),
                d0.ncols()
            )));
        }
        if opts.learn_dictionary && d0.ncols() > n {
            return Err(Error::invalid(format!(
                "dictionary has {} atoms for {n} samples; need m <= n",
                d0.ncols()
            )));
        }
        Ok(Lclrrdl {
            x,
            weights,
            cfg: cfg.clone(),
            error_weight,
            opts,
            state: SolverState::initial(n, d0, cfg.mu0),
        })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn locality_weights(&self) -> Option<&Matrix> {
        self.weights.as_ref()
    }

    /// One outer iteration; returns the residuals at the new iterate.
    pub fn step(&mut self) -> Result<Residuals> {
        let x = self.x;
        let mu = self.state.mu;
        let s = &mut self.state;

        s.j = update_j(&s.z, &s.y2, mu)?;
        match &self.weights {
            Some(w) => {
                s.z = update_z(x, &s.d, &s.e, &s.j, &s.l, &s.y1, &s.y2, &s.y3, mu)?;
                s.l = update_l(&s.z, &s.y3, w, self.cfg.alpha, mu)?;
            }
            None => {
                s.z = update_z_without_locality(x, &s.d, &s.e, &s.j, &s.y1, &s.y2, mu)?;
            }
        }
        s.e = update_e(x, &s.d, &s.z, &s.y1, self.error_weight, mu)?;
        if self.opts.learn_dictionary {
            s.d = update_d(x, &s.z, &s.e, &s.y1, self.cfg.gamma, mu)?;
        }

        let feas = x - &s.d * &s.z - &s.e;
        let zj = &s.z - &s.j;
        s.y1 += &feas * mu;
        s.y2 += &zj * mu;
        let z_l_gap = if self.weights.is_some() {
            let zl = &s.z - &s.l;
            s.y3 += &zl * mu;
            inf_norm(&zl)
        } else {
            0.0
        };
        s.mu = self.cfg.next_mu(mu);
        s.iter += 1;

        let res = Residuals { feasibility: inf_norm(&feas), z_j_gap: inf_norm(&zj), z_l_gap };
        if !res.max().is_finite() {
            return Err(Error::Numerical(format!("iterate diverged at iteration {} (mu = {mu:e})", s.iter)));
        }
        Ok(res)
    }

    /// Iterates until all three residuals drop below `eps` or `max_iter`
    /// is reached. Hitting the cap is reported through
    /// [`FitResult::converged`], not as an error.
    pub fn run(mut self) -> Result<FitResult> {
        let mut residuals = Vec::new();
        let mut mu_history = Vec::new();
        let mut converged = false;
        while self.state.iter < self.cfg.max_iter {
            mu_history.push(self.state.mu);
            let res = self.step()?;
            residuals.push(res);
            if res.below(self.cfg.eps) {
                converged = true;
                break;
            }
        }
        let s = self.state;
        Ok(FitResult { z: s.z, d: s.d, e: s.e, iterations: s.iter, residuals, mu_history, converged })
    }
}

/// Rows of `R` matching the atoms of `init`, giving an m×n block.
fn locality_block(r: &LocalityWeights, init: &DictionaryInit, n: usize) -> Result<Matrix> {
    match &init.source_columns {
        Some(src) => {
            if src.len() != init.num_atoms() {
                return Err(Error::invalid("source_columns length differs from atom count"));
            }
            r.select_rows(src)
        }
        None if init.num_atoms() == n => Ok(r.matrix().clone()),
        None => Err(Error::invalid(format!(
            "dictionary has {} atoms but no source samples; locality weights need an \
             atom-to-sample mapping when m != n",
            init.num_atoms()
        ))),
    }
}

/// Learns dictionary, representation and error for `x`.
pub fn lclrrdl_fit(
    x: &Matrix,
    r: &LocalityWeights,
    init: &DictionaryInit,
    cfg: &SolverConfig,
) -> Result<FitResult> {
    lclrrdl_fit_with(x, r, init, cfg, FitOptions::default())
}

pub fn lclrrdl_fit_with(
    x: &Matrix,
    r: &LocalityWeights,
    init: &DictionaryInit,
    cfg: &SolverConfig,
    opts: FitOptions,
) -> Result<FitResult> {
    Lclrrdl::new(x, r, init, cfg, opts)?.run()
}
