//! Locality-constrained low-rank representation with joint dictionary
//! learning (LCLRR-DL) for classification under corrupted training and
//! test samples.
//!
//! The crate is organised bottom-up:
//!
//! * [`prox`] closed-form proximal operators (soft thresholding, singular
//!   value thresholding, weighted ℓ1 and ℓ21 shrinkage).
//! * [`graph`] the locality weight matrix built from pairwise squared
//!   distances between training samples.
//! * [`solver`] the inexact augmented-Lagrangian engine for the joint
//!   problem, the fixed-dictionary LRR coder and robust PCA.
//! * [`classifier`] the ridge-regression linear classifier.
//! * [`data`] synthetic union-of-subspaces data, PGM ingestion, splits and
//!   matrix serialization.
//! * [`harness`] end-to-end experiments and reports.
//!
//! All matrices are column-major `nalgebra::DMatrix<f64>`; every column of
//! a data matrix is one sample.

pub mod classifier;
pub mod data;
pub mod error;
pub mod graph;
pub mod harness;
pub mod linalg;
pub mod prox;
pub mod solver;

pub use error::{Error, Result};

/// Dense real matrix. Samples are stored as columns.
pub type Matrix = nalgebra::DMatrix<f64>;
