use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::{Error, Matrix, Result};

/// Parameters of a union-of-subspaces dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub num_classes: usize,
    pub ambient_dim: usize,
    pub subspace_dim: usize,
    pub samples_per_class: usize,
    /// Fraction of all columns that receive a gross corruption.
    pub corruption_fraction: f64,
    /// Norm of the random vector added to a corrupted (unit-norm) column.
    pub corruption_magnitude: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            num_classes: 3,
            ambient_dim: 50,
            subspace_dim: 4,
            samples_per_class: 30,
            corruption_fraction: 0.2,
            corruption_magnitude: 3.0,
            seed: 7,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_classes < 2 {
            return Err(Error::invalid("num_classes must be >= 2"));
        }
        if self.subspace_dim == 0 || self.subspace_dim >= self.ambient_dim {
            return Err(Error::invalid(format!(
                "need 0 < subspace_dim < ambient_dim, got {} and {}",
                self.subspace_dim, self.ambient_dim
            )));
        }
        if self.samples_per_class == 0 {
            return Err(Error::invalid("samples_per_class must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.corruption_fraction) {
            return Err(Error::invalid("corruption_fraction must lie in [0, 1]"));
        }
        if !(self.corruption_magnitude.is_finite() && self.corruption_magnitude > 0.0) {
            return Err(Error::invalid("corruption_magnitude must be > 0"));
        }
        Ok(())
    }

    pub fn num_samples(&self) -> usize {
        self.num_classes * self.samples_per_class
    }

    /// `⌈corruption_fraction · n⌉`.
    pub fn num_corrupted(&self) -> usize {
        let raw = self.corruption_fraction * self.num_samples() as f64;
        // absorb representation error such as 0.2 · 90 = 18.000000000000004
        (raw - 1e-9).ceil().max(0.0) as usize
    }
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Draws one random orthonormal basis per class, samples unit-norm columns
/// from each subspace with half-normal (non-negative) coefficients, then adds a random vector of norm
/// `corruption_magnitude` to `⌈fraction · n⌉` randomly chosen columns.
///
/// Columns are grouped by class in increasing class order.
pub fn gen_synthetic(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (d, r, per) = (spec.ambient_dim, spec.subspace_dim, spec.samples_per_class);
    let n = spec.num_samples();

    let mut x = Matrix::zeros(d, n);
    let mut labels = Vec::with_capacity(n);
    for c in 0..spec.num_classes {
        let basis = gaussian(&mut rng, d, r).qr().q();
        let coeffs = gaussian(&mut rng, r, per).abs();
        let mut block = basis * coeffs;
        for mut col in block.column_iter_mut() {
            let norm = col.norm();
            col /= norm;
        }
        x.columns_mut(c * per, per).copy_from(&block);
        labels.extend(std::iter::repeat_n(c, per));
    }

    let mut mask = vec![false; n];
    let mut picked: Vec<usize> = sample(&mut rng, n, spec.num_corrupted()).into_vec();
    picked.sort_unstable();
    for j in picked {
        let dir = gaussian(&mut rng, d, 1);
        let dir = &dir / dir.norm();
        let mut col = x.column_mut(j);
        col += dir.column(0) * spec.corruption_magnitude;
        mask[j] = true;
    }

    Ok(Dataset {
        x,
        labels,
        class_names: (0..spec.num_classes).map(|c| format!("class{c}")).collect(),
        corrupted_mask: Some(mask),
        image_shape: None,
        meta: format!(
            "synthetic k={} d={} r={} per_class={} corruption={}x{} seed={}",
            spec.num_classes, d, r, per, spec.corruption_fraction, spec.corruption_magnitude, spec.seed
        ),
    })
}
