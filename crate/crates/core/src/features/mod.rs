//! The four feature families and a common entry point over image files.

pub mod fridrich;
pub mod hos;
pub mod iqm;
mod stats;
pub mod wam;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use fridrich::{embed_jsteg, extract_fridrich, FRIDRICH_NAMES};
pub use hos::{extract_hos, HosParams};
pub use iqm::{extract_iqm, IqmParams, IQM_NAMES};
pub use stats::four_moments;
pub use wam::{extract_wam, WamParams};

use crate::dataset::FeatureVector;
use crate::error::{Error, Result};
use crate::imagedata::{parse_pgm, parse_ppm, GrayImage, RgbImage};
use crate::transforms::QTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    Wam,
    Iqm,
    Fridrich,
    Hos,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 4] = [
        FeatureSet::Wam,
        FeatureSet::Iqm,
        FeatureSet::Fridrich,
        FeatureSet::Hos,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureSet::Wam => "wam",
            FeatureSet::Iqm => "iqm",
            FeatureSet::Fridrich => "fridrich",
            FeatureSet::Hos => "hos",
        }
    }

    /// Guesses the set from a feature-name prefix.
    pub fn from_feature_name(name: &str) -> Option<FeatureSet> {
        [
            ("wam_", FeatureSet::Wam),
            ("iqm_", FeatureSet::Iqm),
            ("fr_", FeatureSet::Fridrich),
            ("hos_", FeatureSet::Hos),
        ]
        .into_iter()
        .find(|(p, _)| name.starts_with(p))
        .map(|(_, s)| s)
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureSet::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown feature set {s:?} (expected wam, iqm, fridrich or hos)"
                ))
            })
    }
}

/// Extractor parameters for every family.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractConfig {
    pub wam: WamParams,
    pub iqm: IqmParams,
    pub hos: HosParams,
    pub qtable: QTable,
}

/// A decoded PGM or PPM.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyImage {
    Gray(GrayImage),
    Rgb(RgbImage),
}

impl AnyImage {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        if bytes.starts_with(b"P6") {
            parse_ppm(&bytes).map(AnyImage::Rgb)
        } else {
            parse_pgm(&bytes).map(AnyImage::Gray)
        }
    }

    pub fn gray(&self) -> GrayImage {
        match self {
            AnyImage::Gray(g) => g.clone(),
            AnyImage::Rgb(c) => c.to_gray(),
        }
    }

    pub fn rgb(&self) -> RgbImage {
        match self {
            AnyImage::Gray(g) => g.to_rgb(),
            AnyImage::Rgb(c) => c.clone(),
        }
    }
}

pub fn extract(img: &AnyImage, set: FeatureSet, cfg: &ExtractConfig) -> Result<FeatureVector> {
    match set {
        FeatureSet::Wam => extract_wam(&img.gray(), &cfg.wam),
        FeatureSet::Iqm => extract_iqm(&img.rgb(), &cfg.iqm),
        FeatureSet::Fridrich => extract_fridrich(&img.gray(), &cfg.qtable),
        FeatureSet::Hos => extract_hos(&img.gray(), &cfg.hos),
    }
}
