//! Per-variable closed-form updates of the joint solver.

use crate::linalg::{ensure_shape, singular_values, solve_spd, solve_spd_right};
use crate::prox::{l21_shrink, svt, weighted_l1_shrink, Threshold};
use crate::{Error, Matrix, Result};

fn check_mu(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("penalty mu must be > 0, got {mu}")))
    }
}

/// `J = svt(Z + Y2/μ, 1/μ)`.
pub fn update_j(z: &Matrix, y2: &Matrix, mu: f64) -> Result<Matrix> {
    check_mu(mu)?;
    ensure_shape(y2, z.nrows(), z.ncols(), "Y2")?;
    svt(&(z + y2 / mu), Threshold::new(1.0 / mu)?)
}

/// `Z = (DᵀD + 2I)⁻¹ [Dᵀ(X − E) + J + L + (DᵀY1 − Y2 − Y3)/μ]`.
#[allow(clippy::too_many_arguments)]
pub fn update_z(
    x: &Matrix,
    d: &Matrix,
    e: &Matrix,
    j: &Matrix,
    l: &Matrix,
    y1: &Matrix,
    y2: &Matrix,
    y3: &Matrix,
    mu: f64,
) -> Result<Matrix> {
    check_mu(mu)?;
    let (m, n) = (d.ncols(), x.ncols());
    ensure_shape(l, m, n, "L")?;
    ensure_shape(y3, m, n, "Y3")?;
    let rhs = z_rhs(x, d, e, j, y1, y2, mu)? + l - y3 / mu;
    let gram = d.transpose() * d + Matrix::identity(m, m) * 2.0;
    solve_spd(&gram, &rhs, "Z update")
}

/// Z update of the split problem without the locality block:
/// `Z = (DᵀD + I)⁻¹ [Dᵀ(X − E) + J + (DᵀY1 − Y2)/μ]`.
pub fn update_z_without_locality(
    x: &Matrix,
    d: &Matrix,
    e: &Matrix,
    j: &Matrix,
    y1: &Matrix,
    y2: &Matrix,
    mu: f64,
) -> Result<Matrix> {
    check_mu(mu)?;
    let m = d.ncols();
    let rhs = z_rhs(x, d, e, j, y1, y2, mu)?;
    let gram = d.transpose() * d + Matrix::identity(m, m);
    solve_spd(&gram, &rhs, "Z update")
}

fn z_rhs(
    x: &Matrix,
    d: &Matrix,
    e: &Matrix,
    j: &Matrix,
    y1: &Matrix,
    y2: &Matrix,
    mu: f64,
) -> Result<Matrix> {
    let (dim, m, n) = (x.nrows(), d.ncols(), x.ncols());
    ensure_shape(d, dim, m, "D")?;
    ensure_shape(e, dim, n, "E")?;
    ensure_shape(y1, dim, n, "Y1")?;
    ensure_shape(j, m, n, "J")?;
    ensure_shape(y2, m, n, "Y2")?;
    let dt = d.transpose();
    Ok(&dt * (x - e) + j + (&dt * y1 - y2) / mu)
}

/// `L = weighted_l1_shrink(Z + Y3/μ, R, α/μ)` with `R` the m×n weight block.
pub fn update_l(z: &Matrix, y3: &Matrix, weights: &Matrix, alpha: f64, mu: f64) -> Result<Matrix> {
    check_mu(mu)?;
    ensure_shape(y3, z.nrows(), z.ncols(), "Y3")?;
    weighted_l1_shrink(&(z + y3 / mu), weights, Threshold::new(alpha / mu)?)
}

/// `E = l21_shrink(X − DZ + Y1/μ, λ/μ)`.
pub fn update_e(x: &Matrix, d: &Matrix, z: &Matrix, y1: &Matrix, lambda: f64, mu: f64) -> Result<Matrix> {
    check_mu(mu)?;
    ensure_shape(d, x.nrows(), z.nrows(), "D")?;
    ensure_shape(z, d.ncols(), x.ncols(), "Z")?;
    ensure_shape(y1, x.nrows(), x.ncols(), "Y1")?;
    l21_shrink(&(x - d * z + y1 / mu), Threshold::new(lambda / mu)?)
}

/// `D = [Y1 Zᵀ/μ − (E − X) Zᵀ] · [(γ/μ)I + ZZᵀ]⁻¹`.
pub fn update_d(x: &Matrix, z: &Matrix, e: &Matrix, y1: &Matrix, gamma: f64, mu: f64) -> Result<Matrix> {
    check_mu(mu)?;
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::invalid(format!("gamma must be >= 0, got {gamma}")));
    }
    let (dim, n, m) = (x.nrows(), x.ncols(), z.nrows());
    ensure_shape(z, m, n, "Z")?;
    ensure_shape(e, dim, n, "E")?;
    ensure_shape(y1, dim, n, "Y1")?;
    if gamma == 0.0 {
        let s = singular_values(z)?;
        let rank = s.iter().filter(|v| **v > 1e-10 * s[0].max(f64::MIN_POSITIVE)).count();
        if rank < m {
            return Err(Error::Numerical(format!(
                "dictionary update is singular: Z has row rank {rank} < {m} and gamma = 0; use gamma > 0"
            )));
        }
    }
    let zt = z.transpose();
    let numer = (y1 / mu) * &zt - (e - x) * &zt;
    let system = z * &zt + Matrix::identity(m, m) * (gamma / mu);
    solve_spd_right(&system, &numer, "D update")
}
