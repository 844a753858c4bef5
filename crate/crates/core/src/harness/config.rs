use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{DownsampleRate, SynthSpec};
use crate::solver::SolverConfig;
use crate::{Error, Result};

/// Block occlusion applied to image datasets before splitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Occlusion {
    /// Block edge as a fraction of the shorter image side.
    pub block_frac: f64,
    /// Fraction of images that receive a block.
    pub fraction: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    Synthetic(SynthSpec),
    ImageDir {
        path: PathBuf,
        rate: DownsampleRate,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        occlusion: Option<Occlusion>,
    },
}

impl DataSource {
    pub fn describe(&self) -> String {
        match self {
            DataSource::Synthetic(s) => format!(
                "synthetic k={} d={} r={} corr={}%x{}",
                s.num_classes,
                s.ambient_dim,
                s.subspace_dim,
                (s.corruption_fraction * 100.0).round(),
                s.corruption_magnitude
            ),
            DataSource::ImageDir { path, rate, occlusion } => {
                let name = path
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                match occlusion {
                    Some(o) => format!("{name} rate={rate} occl={}%", (o.fraction * 100.0).round()),
                    None => format!("{name} rate={rate}"),
                }
            }
        }
    }
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub source: DataSource,
    /// Training samples drawn per class (N_c).
    pub per_class_train: usize,
    /// Initial dictionary atoms per class.
    pub dict_items_per_class: usize,
    pub solver: SolverConfig,
    /// Ridge weight of the classifier.
    pub eta: f64,
    pub repetitions: usize,
    pub seed: u64,
    /// Scale every column to unit norm before solving.
    pub normalize: bool,
    /// Divide the locality weights by their maximum.
    pub rescale_weights: bool,
    /// Record wall-clock training time. Off by default so reports are
    /// byte-reproducible.
    pub record_timing: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            source: DataSource::Synthetic(SynthSpec::default()),
            per_class_train: 15,
            dict_items_per_class: 5,
            solver: SolverConfig::default(),
            eta: 0.5,
            repetitions: 5,
            seed: 0,
            normalize: true,
            rescale_weights: false,
            record_timing: false,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if let DataSource::Synthetic(spec) = &self.source {
            spec.validate()?;
        }
        if self.repetitions == 0 {
            return Err(Error::invalid("repetitions must be >= 1"));
        }
        if self.dict_items_per_class == 0 {
            return Err(Error::invalid("dict_items_per_class must be >= 1"));
        }
        if self.dict_items_per_class > self.per_class_train {
            return Err(Error::invalid(format!(
                "dict_items_per_class ({}) exceeds per_class_train ({})",
                self.dict_items_per_class, self.per_class_train
            )));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::invalid("eta must be > 0"));
        }
        Ok(())
    }

    /// Seed of repetition `rep`; repetition 0 uses `seed` itself.
    pub fn repetition_seed(&self, rep: usize) -> u64 {
        self.seed.wrapping_add((rep as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}
