use std::sync::atomic::{AtomicUsize, Ordering};

use ndarray::Axis;

use super::chromosome::Chromosome;
use crate::classify::{fold_confusions, stratified_folds, ClassifierConfig, EvalReport};
use crate::dataset::Dataset;
use crate::error::Result;

/// Wrapper fitness: mean per-fold accuracy over fixed stratified folds.
#[derive(Debug)]
pub struct FitnessEvaluator<'a> {
    data: &'a Dataset,
    folds: Vec<usize>,
    k: usize,
    classifier: ClassifierConfig,
    evaluations: AtomicUsize,
}

impl<'a> FitnessEvaluator<'a> {
    pub fn new(data: &'a Dataset, k: usize, classifier: ClassifierConfig, fold_seed: u64) -> Result<Self> {
        let folds = stratified_folds(&data.y, k, fold_seed)?;
        Ok(Self {
            data,
            folds,
            k,
            classifier,
            evaluations: AtomicUsize::new(0),
        })
    }

    /// Number of fresh evaluations performed so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations.load(Ordering::Relaxed)
    }

    pub fn score(&self, mask: &[bool]) -> Result<f64> {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let cols: Vec<usize> = (0..mask.len()).filter(|&j| mask[j]).collect();
        if cols.is_empty() {
            return Ok(0.0);
        }
        let x = self.data.x.select(Axis(1), &cols);
        let per_fold = fold_confusions(x.view(), &self.data.y, &self.folds, self.k, &self.classifier)?;
        Ok(per_fold
            .into_iter()
            .map(|c| EvalReport::from_confusion(c).accuracy)
            .sum::<f64>()
            / self.k as f64)
    }

    /// Evaluates `c` unless it already carries a fitness.
    pub fn evaluate(&self, c: &mut Chromosome) -> Result<f64> {
        if let Some(f) = c.fitness {
            return Ok(f);
        }
        let f = self.score(&c.mask)?;
        c.fitness = Some(f);
        Ok(f)
    }
}
