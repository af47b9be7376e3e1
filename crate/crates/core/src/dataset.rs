//! Named feature vectors, labeled datasets and the features CSV format.
//!
//! The CSV header is `label,<feature names...>`; values are written in
//! Rust's shortest round-trip decimal form so parsing restores them exactly.

use std::path::Path;

use ndarray::{Array2, Axis};

use crate::error::{Error, Result};

/// Named real-valued features of one image.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    /// Degenerate-input notes (e.g. a predictor band with too few rows).
    pub warnings: Vec<String>,
}

impl FeatureVector {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            names: Vec::with_capacity(n),
            values: Vec::with_capacity(n),
            warnings: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        self.names.push(name.into());
        self.values.push(value);
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }
}

/// `N x L` design matrix with binary labels (0 = cover, 1 = stego).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Vec<u8>,
    pub names: Vec<String>,
}

impl Dataset {
    pub fn new(x: Array2<f64>, y: Vec<u8>, names: Vec<String>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::InvalidDataset(format!(
                "{} rows but {} labels",
                x.nrows(),
                y.len()
            )));
        }
        if x.ncols() != names.len() {
            return Err(Error::InvalidDataset(format!(
                "{} columns but {} names",
                x.ncols(),
                names.len()
            )));
        }
        if let Some(l) = y.iter().find(|&&l| l > 1) {
            return Err(Error::InvalidDataset(format!("label {l} is not 0 or 1")));
        }
        if let Some(((r, c), v)) = x.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite value {v} at row {r}, column {}",
                names[c]
            )));
        }
        Ok(Self { x, y, names })
    }

    pub fn from_rows(rows: &[FeatureVector], labels: Vec<u8>) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidDataset("no rows".into()))?;
        let names = first.names.clone();
        let mut x = Array2::zeros((rows.len(), names.len()));
        for (i, fv) in rows.iter().enumerate() {
            if fv.names != names {
                return Err(Error::InvalidDataset(format!(
                    "row {i} has a different feature schema"
                )));
            }
            for (j, &v) in fv.values.iter().enumerate() {
                x[[i, j]] = v;
            }
        }
        Self::new(x, labels, names)
    }

    pub fn n_samples(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.y.iter().filter(|&&l| l == 1).count();
        [self.y.len() - ones, ones]
    }

    /// Requirements for feature selection: N >= 10, L >= 2, both classes.
    pub fn validate_for_selection(&self) -> Result<()> {
        if self.n_samples() < 10 {
            return Err(Error::InvalidDataset(format!(
                "{} samples, need at least 10",
                self.n_samples()
            )));
        }
        if self.n_features() < 2 {
            return Err(Error::InvalidDataset(format!(
                "{} features, need at least 2",
                self.n_features()
            )));
        }
        if self.class_counts().contains(&0) {
            return Err(Error::InvalidDataset("only one class present".into()));
        }
        Ok(())
    }

    pub fn select_columns(&self, cols: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select(Axis(1), cols),
            y: self.y.clone(),
            names: cols.iter().map(|&c| self.names[c].clone()).collect(),
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select(Axis(0), rows),
            y: rows.iter().map(|&r| self.y[r]).collect(),
            names: self.names.clone(),
        }
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["label".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        let mut record = Vec::with_capacity(header.len());
        for (row, &label) in self.x.rows().into_iter().zip(&self.y) {
            record.clear();
            record.push(label.to_string());
            record.extend(row.iter().map(|v| format!("{v:?}")));
            w.write_record(&record)?;
        }
        w.into_inner()
            .map_err(|e| Error::InvalidDataset(format!("flush failed: {e}")))
    }

    pub fn from_csv_reader(reader: impl std::io::Read) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        if header.get(0) != Some("label") {
            return Err(Error::InvalidDataset(
                "features CSV must start with a `label` column".into(),
            ));
        }
        let names: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
        let mut y = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let parse_err = |what: &str| {
                Error::InvalidDataset(format!("row {}: cannot parse {what}", i + 1))
            };
            y.push(rec[0].parse::<u8>().map_err(|_| parse_err("label"))?);
            for (j, field) in rec.iter().skip(1).enumerate() {
                values.push(field.parse::<f64>().map_err(|_| parse_err(&names[j]))?);
            }
        }
        let x = Array2::from_shape_vec((y.len(), names.len()), values)
            .map_err(|e| Error::InvalidDataset(e.to_string()))?;
        Self::new(x, y, names)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_bytes()?).map_err(|e| Error::io(path, e))
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_shapes() {
        let x = Array2::zeros((3, 2));
        assert!(Dataset::new(x.clone(), vec![0, 1], vec!["a".into(), "b".into()]).is_err());
        assert!(Dataset::new(x.clone(), vec![0, 1, 2], vec!["a".into(), "b".into()]).is_err());
        let mut bad = x;
        bad[[1, 1]] = f64::NAN;
        assert!(Dataset::new(bad, vec![0, 1, 0], vec!["a".into(), "b".into()]).is_err());
    }

    #[test]
    fn selection_requirements() {
        let names = vec!["a".into(), "b".into()];
        let d = Dataset::new(Array2::zeros((10, 2)), vec![0; 10], names.clone()).unwrap();
        assert!(d.validate_for_selection().is_err());
        let mut y = vec![0; 10];
        y[3] = 1;
        let d = Dataset::new(Array2::zeros((10, 2)), y, names).unwrap();
        assert!(d.validate_for_selection().is_ok());
    }

    proptest! {
        #[test]
        fn csv_roundtrip_is_exact(
            vals in proptest::collection::vec(
                prop_oneof![any::<f64>().prop_filter("finite", |v| v.is_finite()), -1e6f64..1e6],
                12,
            ),
            labels in proptest::collection::vec(0u8..2, 4),
        ) {
            let x = Array2::from_shape_vec((4, 3), vals).unwrap();
            let d = Dataset::new(x, labels, vec!["f1".into(), "f2".into(), "f3".into()]).unwrap();
            let bytes = d.to_csv_bytes().unwrap();
            let back = Dataset::from_csv_reader(&bytes[..]).unwrap();
            prop_assert_eq!(&back, &d);
            prop_assert_eq!(back.to_csv_bytes().unwrap(), bytes);
        }
    }
}
