use ndarray::{ArrayView2, Axis};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{train, ClassifierConfig, TrainedModel};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::seeded;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub tpr_cover: f64,
    pub tpr_stego: f64,
    /// `confusion[actual][predicted]`.
    pub confusion: [[usize; 2]; 2],
}

impl EvalReport {
    pub fn from_confusion(confusion: [[usize; 2]; 2]) -> Self {
        let total: usize = confusion.iter().flatten().sum();
        let rate = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        Self {
            accuracy: rate(confusion[0][0] + confusion[1][1], total),
            tpr_cover: rate(confusion[0][0], confusion[0][0] + confusion[0][1]),
            tpr_stego: rate(confusion[1][1], confusion[1][0] + confusion[1][1]),
            confusion,
        }
    }

    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }
}

pub fn evaluate(model: &TrainedModel, x: ArrayView2<f64>, y: &[u8]) -> Result<EvalReport> {
    if x.nrows() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} rows vs {} labels",
            x.nrows(),
            y.len()
        )));
    }
    let mut confusion = [[0usize; 2]; 2];
    for (row, &l) in x.rows().into_iter().zip(y) {
        confusion[l as usize][model.predict(row)? as usize] += 1;
    }
    Ok(EvalReport::from_confusion(confusion))
}

/// Fold index per sample: each class is shuffled independently and dealt
/// round-robin, continuing the deal from one class to the next.
pub fn stratified_folds(y: &[u8], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need k >= 2 folds, got {k}")));
    }
    for class in 0..2u8 {
        let count = y.iter().filter(|&&l| l == class).count();
        if count < k {
            return Err(Error::ClassTooSmall { class, count, k });
        }
    }
    let mut rng = seeded(seed);
    let mut folds = vec![0usize; y.len()];
    let mut next = 0usize;
    for class in 0..2u8 {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            folds[i] = next % k;
            next += 1;
        }
    }
    Ok(folds)
}

/// Per-fold confusion matrices for a fixed fold assignment.
pub(crate) fn fold_confusions(
    x: ArrayView2<f64>,
    y: &[u8],
    folds: &[usize],
    k: usize,
    cfg: &ClassifierConfig,
) -> Result<Vec<[[usize; 2]; 2]>> {
    (0..k)
        .map(|f| {
            let (train_idx, test_idx): (Vec<usize>, Vec<usize>) =
                (0..y.len()).partition(|&i| folds[i] != f);
            let xt = x.select(Axis(0), &train_idx);
            let yt: Vec<u8> = train_idx.iter().map(|&i| y[i]).collect();
            let model = train(xt.view(), &yt, cfg)?;
            let xe = x.select(Axis(0), &test_idx);
            let ye: Vec<u8> = test_idx.iter().map(|&i| y[i]).collect();
            Ok(evaluate(&model, xe.view(), &ye)?.confusion)
        })
        .collect()
}

/// Stratified k-fold cross-validation with predictions pooled over folds.
pub fn cross_validate(
    data: &Dataset,
    k: usize,
    cfg: &ClassifierConfig,
    seed: u64,
) -> Result<EvalReport> {
    let folds = stratified_folds(&data.y, k, seed)?;
    let mut pooled = [[0usize; 2]; 2];
    for c in fold_confusions(data.x.view(), &data.y, &folds, k, cfg)? {
        for a in 0..2 {
            for p in 0..2 {
                pooled[a][p] += c[a][p];
            }
        }
    }
    Ok(EvalReport::from_confusion(pooled))
}

/// Train on `train` only and report on `test`.
pub fn evaluate_split(train_set: &Dataset, test_set: &Dataset, cfg: &ClassifierConfig) -> Result<EvalReport> {
    if train_set.names != test_set.names {
        return Err(Error::ShapeMismatch(
            "train and test feature names differ".into(),
        ));
    }
    let model = train(train_set.x.view(), &train_set.y, cfg)?;
    evaluate(&model, test_set.x.view(), &test_set.y)
}
