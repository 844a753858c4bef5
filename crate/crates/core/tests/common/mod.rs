//! Independent reference computations for the integration tests.
//!
//! Nothing here calls the crate's own SVD or proximal operators.

#![allow(dead_code)]

use lclrr::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

pub fn uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(lo..hi))
}

/// Nuclear norm from the eigenvalues of `MᵀM` (or `MMᵀ`, whichever is
/// smaller), so it does not share code with the crate's SVD.
pub fn nuclear_norm_eig(m: &Matrix) -> f64 {
    let g = if m.nrows() < m.ncols() { m * m.transpose() } else { m.transpose() * m };
    g.symmetric_eigen().eigenvalues.iter().map(|l| l.max(0.0).sqrt()).sum()
}

/// Minimizes a unimodal function on `[a, b]` by golden-section search.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Minimizes `tau‖q‖₂ + ½‖q − m‖²` over one column by backtracking
/// gradient descent from `m`, then compares against the candidate `q = 0`.
/// Returns the minimizer found.
pub fn l21_column_oracle(m: &[f64], tau: f64) -> Vec<f64> {
    let obj = |q: &[f64]| {
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        tau * n + 0.5 * q.iter().zip(m).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
    };
    let mut q = m.to_vec();
    let mut step = 1.0;
    for _ in 0..5000 {
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n < 1e-14 {
            break;
        }
        let grad: Vec<f64> = q.iter().zip(m).map(|(a, b)| a - b + tau * a / n).collect();
        let gnorm = grad.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm < 1e-13 {
            break;
        }
        let f0 = obj(&q);
        loop {
            let cand: Vec<f64> = q.iter().zip(&grad).map(|(a, g)| a - step * g).collect();
            if obj(&cand) <= f0 - 0.5 * step * gnorm * gnorm || step < 1e-14 {
                q = cand;
                break;
            }
            step *= 0.5;
        }
        step = (step * 2.0).min(1.0);
    }
    let zero = vec![0.0; m.len()];
    if obj(&zero) < obj(&q) {
        zero
    } else {
        q
    }
}

/// Central finite-difference gradient of `f` at `x`.
pub fn fd_gradient(f: impl Fn(&Matrix) -> f64, x: &Matrix, h: f64) -> Matrix {
    let mut g = Matrix::zeros(x.nrows(), x.ncols());
    let mut probe = x.clone();
    for k in 0..x.len() {
        let orig = probe[k];
        probe[k] = orig + h;
        let up = f(&probe);
        probe[k] = orig - h;
        let down = f(&probe);
        probe[k] = orig;
        g[k] = (up - down) / (2.0 * h);
    }
    g
}

pub fn inf_norm(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// One line of the acceptance summary.
pub fn report(name: &str, pass: bool, detail: &str) {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}
