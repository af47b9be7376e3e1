//! End-to-end stages behind the command-line tool: stego corpus
//! generation, batch feature extraction, and selection/training reports.

mod extract;
mod gen;
mod run;

pub use extract::{cmd_extract, cmd_extract_to_csv, Extracted};
pub use gen::{cmd_gen, list_covers, write_synthetic_covers, EmbedMethod, EmbedSpec};
pub use run::{cmd_run, stratified_split, MethodRow, Report, RunOutput, Timing};

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classify::ClassifierConfig;
use crate::error::{Error, Result};
use crate::features::{ExtractConfig, FeatureSet};
use crate::mbega::MbegaConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub train_frac: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            train_frac: 0.6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub covers: Option<PathBuf>,
    pub embed: EmbedSpec,
    /// When set, the features CSV must belong to this family.
    pub feature_set: Option<FeatureSet>,
    pub extract: ExtractConfig,
    pub mbega: MbegaConfig,
    pub classifier: ClassifierConfig,
    pub split: SplitConfig,
    /// Training repetitions per timing batch (five batches, fastest kept).
    pub timing_repeats: Option<usize>,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let f = self.split.train_frac;
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "split.train_frac {f} must lie in (0, 1)"
            )));
        }
        if self.timing_repeats == Some(0) {
            return Err(Error::InvalidConfig("timing_repeats must be >= 1".into()));
        }
        self.embed.validate()?;
        self.mbega.validate()?;
        self.classifier.validate()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
