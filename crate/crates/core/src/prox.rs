//! Closed-form proximal operators.
//!
//! Every operator here is the exact minimizer of a separable problem of the
//! form `t·g(x) + ½‖x − m‖²`:
//!
//! | operator               | penalty `g`                 |
//! |------------------------|-----------------------------|
//! | [`soft_threshold`]     | `|x|`                       |
//! | [`svt`]                | nuclear norm `‖X‖*`         |
//! | [`weighted_l1_shrink`] | `Σ R_ij |X_ij|`             |
//! | [`l21_shrink`]         | `Σ_j ‖x_j‖₂` (column-wise)  |
//!
//! Values within [`KINK_TOLERANCE`] of a threshold are sent to zero, so
//! the behaviour at the non-differentiable point is deterministic.

use nalgebra::DVector;

use crate::linalg::{ensure_finite, ensure_shape, thin_svd};
use crate::{Error, Matrix, Result};

/// Width of the band around a threshold that is resolved to zero.
pub const KINK_TOLERANCE: f64 = 1e-12;

/// A non-negative, finite shrinkage level.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Threshold(f64);

impl Threshold {
    pub const ZERO: Threshold = Threshold(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::invalid(format!("threshold must be finite and >= 0, got {value}")));
        }
        Ok(Threshold(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Threshold {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Threshold::new(value)
    }
}

/// Unchecked scalar shrinkage used inside the matrix operators.
#[inline]
pub(crate) fn shrink(x: f64, eps: f64) -> f64 {
    if eps == 0.0 {
        x
    } else if x - eps > KINK_TOLERANCE {
        x - eps
    } else if x + eps < -KINK_TOLERANCE {
        x + eps
    } else {
        0.0
    }
}

/// Scalar shrinkage operator `S_eps[x]`.
pub fn soft_threshold(x: f64, eps: Threshold) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("soft_threshold input is {x}")));
    }
    Ok(shrink(x, eps.0))
}

/// Singular value thresholding: `U · diag(max(σ − tau, 0)) · Vᵀ`.
///
/// This is the proximal operator of `tau‖·‖*`.
pub fn svt(m: &Matrix, tau: Threshold) -> Result<Matrix> {
    ensure_finite(m, "svt input")?;
    if tau.0 == 0.0 || m.is_empty() {
        return Ok(m.clone());
    }
    let svd = thin_svd(m)?;
    let mut out = Matrix::zeros(m.nrows(), m.ncols());
    for (k, &sigma) in svd.s.iter().enumerate() {
        let s = shrink(sigma, tau.0);
        if s > 0.0 {
            out.ger(s, &svd.u.column(k), &svd.v_t.row(k).transpose(), 1.0);
        }
    }
    Ok(out)
}

/// Elementwise shrinkage with per-entry thresholds `tau · R_ij`.
pub fn weighted_l1_shrink(m: &Matrix, weights: &Matrix, tau: Threshold) -> Result<Matrix> {
    ensure_shape(weights, m.nrows(), m.ncols(), "weight matrix")?;
    ensure_finite(m, "weighted_l1_shrink input")?;
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::invalid(format!("weights must be finite and non-negative, found {w}")));
    }
    Ok(m.zip_map(weights, |x, w| shrink(x, tau.0 * w)))
}

/// Column-wise group shrinkage, the proximal operator of `tau‖·‖₂₁`.
///
/// A column `q` with `‖q‖₂ > tau` becomes `(1 − tau/‖q‖₂)·q`; all other
/// columns are zeroed.
pub fn l21_shrink(q: &Matrix, tau: Threshold) -> Result<Matrix> {
    ensure_finite(q, "l21_shrink input")?;
    if tau.0 == 0.0 {
        return Ok(q.clone());
    }
    let mut out = Matrix::zeros(q.nrows(), q.ncols());
    for (j, col) in q.column_iter().enumerate() {
        let norm = col.norm();
        if norm - tau.0 > KINK_TOLERANCE {
            let scale = 1.0 - tau.0 / norm;
            out.set_column(j, &(col * scale));
        }
    }
    Ok(out)
}

/// Column ℓ2 norms as a vector.
pub fn column_norms(m: &Matrix) -> DVector<f64> {
    DVector::from_iterator(m.ncols(), m.column_iter().map(|c| c.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::singular_values;
    use proptest::prelude::*;

    fn t(v: f64) -> Threshold {
        Threshold::new(v).unwrap()
    }

    #[test]
    fn soft_threshold_branches() {
        assert_eq!(soft_threshold(2.5, t(1.0)).unwrap(), 1.5);
        assert_eq!(soft_threshold(-2.5, t(1.0)).unwrap(), -1.5);
        assert_eq!(soft_threshold(0.3, t(1.0)).unwrap(), 0.0);
        assert_eq!(soft_threshold(-0.7, t(0.0)).unwrap(), -0.7);
    }

    #[test]
    fn soft_threshold_kink_goes_to_zero() {
        assert_eq!(soft_threshold(1.0 + 5e-13, t(1.0)).unwrap(), 0.0);
        assert_eq!(soft_threshold(-1.0 - 5e-13, t(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(soft_threshold(f64::NAN, t(1.0)).is_err());
        assert!(soft_threshold(f64::INFINITY, t(1.0)).is_err());
        assert!(Threshold::new(-0.1).is_err());
        assert!(Threshold::new(f64::NAN).is_err());
        let m = Matrix::from_element(2, 2, f64::NAN);
        assert!(svt(&m, t(1.0)).is_err());
        assert!(l21_shrink(&m, t(1.0)).is_err());
    }

    #[test]
    fn svt_on_diagonal() {
        let m = Matrix::from_diagonal(&DVector::from_vec(vec![3.0, 1.0, 0.5]));
        let out = svt(&m, t(1.0)).unwrap();
        let expected = Matrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.0, 0.0]));
        assert!((out - expected).abs().max() < 1e-12);
    }

    #[test]
    fn svt_zero_threshold_is_identity() {
        let m = Matrix::from_fn(4, 3, |i, j| (i as f64 - 1.5) * (j as f64 + 0.25));
        assert_eq!(svt(&m, Threshold::ZERO).unwrap(), m);
    }

    #[test]
    fn weighted_shrink_examples() {
        let m = Matrix::from_element(1, 1, 2.0);
        let r = Matrix::from_element(1, 1, 1.0);
        assert_eq!(weighted_l1_shrink(&m, &r, t(0.5)).unwrap()[(0, 0)], 1.5);

        let m = Matrix::from_fn(3, 4, |i, j| i as f64 - j as f64 * 0.3);
        let zero = Matrix::zeros(3, 4);
        assert_eq!(weighted_l1_shrink(&m, &zero, t(7.0)).unwrap(), m);
    }

    #[test]
    fn weighted_shrink_shape_and_sign_checks() {
        let m = Matrix::zeros(2, 3);
        assert!(weighted_l1_shrink(&m, &Matrix::zeros(3, 2), t(1.0)).is_err());
        assert!(weighted_l1_shrink(&m, &Matrix::from_element(2, 3, -1.0), t(1.0)).is_err());
    }

    #[test]
    fn l21_examples() {
        // column of norm 2 shrinks to 0.75 of itself at tau = 0.5
        let q = Matrix::from_column_slice(2, 2, &[1.2, 1.6, 0.18, 0.24]);
        let out = l21_shrink(&q, t(0.5)).unwrap();
        assert!((out[(0, 0)] - 0.9).abs() < 1e-15);
        assert!((out[(1, 0)] - 1.2).abs() < 1e-15);
        // norm 0.3 column vanishes
        assert_eq!(out[(0, 1)], 0.0);
        assert_eq!(out[(1, 1)], 0.0);
        assert_eq!(l21_shrink(&q, Threshold::ZERO).unwrap(), q);
    }

    fn small_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-5.0f64..5.0, r * c).prop_map(move |v| Matrix::from_vec(r, c, v))
        })
    }

    proptest! {
        #[test]
        fn soft_threshold_is_odd_and_contractive(x in -10.0f64..10.0, y in -10.0f64..10.0, e in 0.0f64..5.0) {
            let eps = t(e);
            let sx = soft_threshold(x, eps).unwrap();
            let sy = soft_threshold(y, eps).unwrap();
            prop_assert_eq!(soft_threshold(-x, eps).unwrap(), -sx);
            prop_assert!((sx - sy).abs() <= (x - y).abs() + 1e-12);
            prop_assert!(sx.abs() <= x.abs());
        }

        #[test]
        fn svt_shrinks_singular_values(m in small_matrix(), tau in 0.0f64..4.0) {
            let out = svt(&m, t(tau)).unwrap();
            let before = singular_values(&m).unwrap();
            let after = singular_values(&out).unwrap();
            for (b, a) in before.iter().zip(after.iter()) {
                prop_assert!((a - (b - tau).max(0.0)).abs() < 1e-9);
            }
            let rank = |s: &[f64]| s.iter().filter(|v| **v > 1e-9).count();
            prop_assert!(rank(&after) <= rank(&before));
        }

        #[test]
        fn l21_scales_columns(m in small_matrix(), tau in 0.0f64..4.0) {
            let out = l21_shrink(&m, t(tau)).unwrap();
            for (qin, qout) in m.column_iter().zip(out.column_iter()) {
                let n = qin.norm();
                prop_assert!((qout.norm() - (n - tau).max(0.0)).abs() < 1e-9);
                // non-negative multiple of the input column
                prop_assert!(qin.dot(&qout) >= -1e-12);
                prop_assert!((qin.norm() * qout.norm() - qin.dot(&qout)).abs() < 1e-9);
            }
        }

        #[test]
        fn uniform_weights_reduce_to_plain_shrinkage(m in small_matrix(), w in 0.0f64..3.0, tau in 0.0f64..2.0) {
            let r = Matrix::from_element(m.nrows(), m.ncols(), w);
            let out = weighted_l1_shrink(&m, &r, t(tau)).unwrap();
            let plain = m.map(|x| soft_threshold(x, t(tau * w)).unwrap());
            prop_assert_eq!(out, plain);
        }
    }
}
