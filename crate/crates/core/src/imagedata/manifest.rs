use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One image in a labeled corpus (`label` 0 = cover, 1 = stego).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub label: u8,
    pub method: String,
    /// Bits per pixel for LSB/JSteg methods, noise strength for `additive`.
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Result<Self> {
        let m = Self { entries };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for (row, e) in self.entries.iter().enumerate() {
            if !seen.insert(&e.path) {
                return Err(Error::Manifest(format!(
                    "row {}: duplicate path {}",
                    row + 1,
                    e.path.display()
                )));
            }
            match e.label {
                0 if e.method != "clean" => {
                    return Err(Error::Manifest(format!(
                        "row {}: label 0 requires method \"clean\", found {:?}",
                        row + 1,
                        e.method
                    )))
                }
                0 | 1 => {}
                l => {
                    return Err(Error::Manifest(format!(
                        "row {}: label {l} is not 0 or 1",
                        row + 1
                    )))
                }
            }
            let rate_ok = if e.method == "additive" {
                e.rate >= 0.0 && e.rate.is_finite()
            } else {
                (0.0..=1.0).contains(&e.rate)
            };
            if !rate_ok {
                return Err(Error::Manifest(format!(
                    "row {}: rate {} out of range for method {}",
                    row + 1,
                    e.rate,
                    e.method
                )));
            }
        }
        Ok(())
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for e in &self.entries {
            w.serialize(e)?;
        }
        if self.entries.is_empty() {
            w.write_record(["path", "label", "method", "rate"])?;
        }
        w.into_inner()
            .map_err(|e| Error::Manifest(format!("flush failed: {e}")))
    }

    pub fn from_csv_reader(reader: impl std::io::Read) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["path", "label", "method", "rate"] {
            return Err(Error::Manifest(format!(
                "expected header path,label,method,rate, found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let entries = r.deserialize().collect::<Result<Vec<ManifestEntry>, _>>()?;
        Self::new(entries)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_bytes()?).map_err(|e| Error::io(path, e))
    }

    /// Reads a manifest; relative image paths are resolved against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut m = Self::from_csv_reader(file)?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        for e in &mut m.entries {
            if e.path.is_relative() {
                e.path = base.join(&e.path);
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(path: &str, label: u8, method: &str, rate: f64) -> ManifestEntry {
        ManifestEntry {
            path: path.into(),
            label,
            method: method.into(),
            rate,
        }
    }

    #[test]
    fn csv_roundtrip() {
        let m = DatasetManifest::new(vec![
            entry("a.pgm", 0, "clean", 0.0),
            entry("a_lsbm.pgm", 1, "lsbm", 0.5),
        ])
        .unwrap();
        let bytes = m.to_csv_bytes().unwrap();
        assert!(bytes.starts_with(b"path,label,method,rate\n"));
        assert_eq!(DatasetManifest::from_csv_reader(&bytes[..]).unwrap(), m);
    }

    #[test]
    fn invariants_enforced() {
        assert!(DatasetManifest::new(vec![
            entry("a.pgm", 0, "clean", 0.0),
            entry("a.pgm", 1, "lsbm", 0.5)
        ])
        .is_err());
        assert!(DatasetManifest::new(vec![entry("a.pgm", 0, "lsbm", 0.5)]).is_err());
        assert!(DatasetManifest::new(vec![entry("a.pgm", 1, "lsbm", 1.5)]).is_err());
        assert!(DatasetManifest::new(vec![entry("a.pgm", 2, "lsbm", 0.5)]).is_err());
        assert!(DatasetManifest::new(vec![entry("a.pgm", 1, "additive", 3.0)]).is_ok());
    }
}
