use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::features::{extract, AnyImage, ExtractConfig, FeatureSet};
use crate::imagedata::DatasetManifest;

#[derive(Debug, Clone, PartialEq)]
pub struct Extracted {
    pub dataset: Dataset,
    /// Degenerate-input notes, tagged with the image path.
    pub warnings: Vec<(PathBuf, String)>,
}

/// Extracts `set` from every manifest image in parallel; rows keep manifest
/// order. The first failing image (in manifest order) aborts the batch.
pub fn cmd_extract(manifest: &DatasetManifest, set: FeatureSet, cfg: &ExtractConfig) -> Result<Extracted> {
    manifest.validate()?;
    if manifest.entries.is_empty() {
        return Err(Error::Manifest("manifest has no entries".into()));
    }
    let rows = manifest
        .entries
        .par_iter()
        .map(|e| {
            AnyImage::load(&e.path)
                .and_then(|img| extract(&img, set, cfg))
                .map_err(|source| Error::Extraction {
                    path: e.path.clone(),
                    source: Box::new(source),
                })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let warnings = manifest
        .entries
        .iter()
        .zip(&rows)
        .flat_map(|(e, fv)| fv.warnings.iter().map(|w| (e.path.clone(), w.clone())))
        .collect();
    let labels = manifest.entries.iter().map(|e| e.label).collect();
    Ok(Extracted {
        dataset: Dataset::from_rows(&rows, labels)?,
        warnings,
    })
}

/// Loads a manifest, extracts, and writes the CSV only if every image succeeded.
pub fn cmd_extract_to_csv(
    manifest_path: impl AsRef<Path>,
    set: FeatureSet,
    cfg: &ExtractConfig,
    out_csv: impl AsRef<Path>,
) -> Result<Extracted> {
    let manifest = DatasetManifest::load(manifest_path)?;
    let out = cmd_extract(&manifest, set, cfg)?;
    out.dataset.write_csv(out_csv)?;
    Ok(out)
}
