//! Linear classifiers (Fisher discriminant, Pegasos linear SVM) and
//! their evaluation.

mod eval;
mod fld;
mod svm;

pub use eval::{cross_validate, evaluate, evaluate_split, stratified_folds, EvalReport};
pub(crate) use eval::fold_confusions;
pub use fld::train_fld;
pub use svm::train_svm_linear;

use ndarray::{Array1, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    #[default]
    Fld,
    Svm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    pub kind: ClassifierKind,
    pub svm_lambda: f64,
    /// Passes over the training set; total SGD steps = epochs * N.
    pub svm_epochs: usize,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            kind: ClassifierKind::Fld,
            svm_lambda: 1e-4,
            svm_epochs: 20,
            seed: 0,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.svm_lambda > 0.0 && self.svm_lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "svm_lambda {} must be positive",
                self.svm_lambda
            )));
        }
        if self.svm_epochs == 0 {
            return Err(Error::InvalidConfig("svm_epochs must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-feature z-scoring fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: ArrayView2<f64>) -> Self {
        let n = x.nrows() as f64;
        let mean: Vec<f64> = x.mean_axis(Axis(0)).map(|m| m.to_vec()).unwrap_or_default();
        let std = x
            .axis_iter(Axis(1))
            .zip(&mean)
            .map(|(col, &m)| {
                let var = col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
                var.sqrt().max(1e-12)
            })
            .collect();
        Self { mean, std }
    }

    pub fn apply(&self, x: ArrayView1<f64>) -> Array1<f64> {
        Array1::from_iter(
            x.iter()
                .zip(self.mean.iter().zip(&self.std))
                .map(|(v, (m, s))| (v - m) / s),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ClassifierKind,
    /// Weights in standardized feature space.
    pub w: Vec<f64>,
    pub b: f64,
    pub standardizer: Standardizer,
}

impl TrainedModel {
    pub fn score(&self, x: ArrayView1<f64>) -> Result<f64> {
        if x.len() != self.w.len() {
            return Err(Error::ShapeMismatch(format!(
                "model has {} features, sample has {}",
                self.w.len(),
                x.len()
            )));
        }
        let z = self.standardizer.apply(x);
        Ok(z.iter().zip(&self.w).map(|(a, b)| a * b).sum::<f64>() + self.b)
    }

    /// Label 1 iff the score is strictly positive.
    pub fn predict(&self, x: ArrayView1<f64>) -> Result<u8> {
        Ok(u8::from(self.score(x)? > 0.0))
    }
}

pub fn predict(model: &TrainedModel, x: ArrayView1<f64>) -> Result<u8> {
    model.predict(x)
}

pub(crate) fn check_training_data(x: ArrayView2<f64>, y: &[u8], min_per_class: usize) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows vs {} labels",
            x.nrows(),
            y.len()
        )));
    }
    if x.ncols() == 0 {
        return Err(Error::InvalidParameter("no features to train on".into()));
    }
    let ones = y.iter().filter(|&&l| l == 1).count();
    let zeros = y.iter().filter(|&&l| l == 0).count();
    if ones + zeros != y.len() {
        return Err(Error::InvalidDataset("labels must be 0 or 1".into()));
    }
    if ones == 0 || zeros == 0 {
        return Err(Error::SingleClass);
    }
    if ones.min(zeros) < min_per_class {
        return Err(Error::ClassTooSmall {
            class: u8::from(ones < zeros),
            count: ones.min(zeros),
            k: min_per_class,
        });
    }
    Ok(())
}

pub fn train(x: ArrayView2<f64>, y: &[u8], cfg: &ClassifierConfig) -> Result<TrainedModel> {
    match cfg.kind {
        ClassifierKind::Fld => train_fld(x, y),
        ClassifierKind::Svm => train_svm_linear(x, y, cfg.svm_lambda, cfg.svm_epochs, cfg.seed),
    }
}
