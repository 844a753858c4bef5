//! Datasets: synthetic subspace unions, PGM image folders, train/test
//! splits and matrix files.

mod images;
mod matrix_io;
mod split;
mod synth;

pub use images::{
    downsample, load_image_dir, occlude_blocks, read_pgm, write_pgm, DownsampleRate, GrayImage,
};
pub use matrix_io::{
    load_matrix, read_binary, read_csv, save_matrix, save_matrix_as, write_binary, write_csv, MatrixFormat,
    MAGIC, VERSION,
};
pub use split::split_train_test;
pub use synth::{gen_synthetic, SynthSpec};

use crate::{Error, Matrix, Result};

/// Samples as columns of `x` with a class index per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Matrix,
    /// Index into `class_names` for every column.
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    /// Ground-truth corruption flags, when known.
    pub corrupted_mask: Option<Vec<bool>>,
    /// `(rows, cols)` of the source images, when columns are images.
    pub image_shape: Option<(usize, usize)>,
    pub meta: String,
}

impl Dataset {
    pub fn new(x: Matrix, labels: Vec<usize>, class_names: Vec<String>, meta: String) -> Result<Self> {
        let ds = Dataset { x, labels, class_names, corrupted_mask: None, image_shape: None, meta };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.x.ncols();
        if self.labels.len() != n {
            return Err(Error::InvalidInput(format!("{} labels for {n} samples", self.labels.len())));
        }
        if let Some(mask) = &self.corrupted_mask {
            if mask.len() != n {
                return Err(Error::InvalidInput("corruption mask length differs from n".into()));
            }
        }
        let counts = self.class_counts();
        if counts.len() != self.class_names.len() {
            return Err(Error::InvalidInput("label index outside class list".into()));
        }
        if let Some(k) = counts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidInput(format!("class '{}' has no samples", self.class_names[k])));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.x.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.x.ncols() == 0
    }

    pub fn dim(&self) -> usize {
        self.x.nrows()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Samples per class; longer than `class_names` if a label is out of range.
    pub fn class_counts(&self) -> Vec<usize> {
        let c = self.labels.iter().map(|l| l + 1).max().unwrap_or(0).max(self.class_names.len());
        let mut counts = vec![0; c];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Sub-dataset with the given columns, in the given order.
    pub fn select(&self, columns: &[usize]) -> Dataset {
        let x = self.x.select_columns(columns.iter());
        Dataset {
            x,
            labels: columns.iter().map(|&c| self.labels[c]).collect(),
            class_names: self.class_names.clone(),
            corrupted_mask: self.corrupted_mask.as_ref().map(|m| columns.iter().map(|&c| m[c]).collect()),
            image_shape: self.image_shape,
            meta: self.meta.clone(),
        }
    }
}
