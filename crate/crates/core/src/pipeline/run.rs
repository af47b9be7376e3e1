use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::PipelineConfig;
use crate::classify::{evaluate, train, ClassifierConfig, EvalReport, TrainedModel};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::mbega::{run_mbega, SelectionResult};
use crate::rng::seeded;

/// Test-set accuracy for one embedding method (or `clean`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRow {
    pub method: String,
    pub n_test: usize,
    pub accuracy_before: f64,
    pub accuracy_after: f64,
}

/// Deterministic run summary. Percentages are `100 (before - after) / before`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub feature_set: Option<FeatureSet>,
    pub n_train: usize,
    pub n_test: usize,
    pub n_features_before: usize,
    pub n_features_after: usize,
    pub pct_feature_reduction: f64,
    pub accuracy_before: f64,
    pub accuracy_after: f64,
    /// `100 (accuracy_after - accuracy_before)`.
    pub accuracy_change_points: f64,
    pub eval_before: EvalReport,
    pub eval_after: EvalReport,
    pub per_method: Vec<MethodRow>,
    pub selection: SelectionResult,
}

/// Wall-clock classifier training times; varies between runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub train_time_before_ms: f64,
    pub train_time_after_ms: f64,
    pub pct_time_reduction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: Report,
    pub timing: Timing,
}

pub(crate) fn pct_reduction(before: f64, after: f64) -> f64 {
    if before == 0.0 {
        0.0
    } else {
        100.0 * (before - after) / before
    }
}

/// Stratified split: each class is shuffled and `round(frac * n_c)` of it
/// goes to training. Both index lists are returned sorted.
pub fn stratified_split(y: &[u8], train_frac: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut rng = seeded(seed);
    let (mut train_idx, mut test_idx) = (Vec::new(), Vec::new());
    for class in 0..2u8 {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(&mut rng);
        let k = (train_frac * idx.len() as f64).round() as usize;
        if k == 0 || k == idx.len() {
            return Err(Error::InvalidDataset(format!(
                "degenerate split: class {class} has {} samples, {k} would go to training",
                idx.len()
            )));
        }
        train_idx.extend_from_slice(&idx[..k]);
        test_idx.extend_from_slice(&idx[k..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((train_idx, test_idx))
}

/// Milliseconds per training call: fastest of five batches of `repeats`.
fn time_training(data: &Dataset, cfg: &ClassifierConfig, repeats: usize) -> Result<(TrainedModel, f64)> {
    let model = train(data.x.view(), &data.y, cfg)?;
    let mut best = f64::INFINITY;
    for _ in 0..5 {
        let start = Instant::now();
        for _ in 0..repeats {
            std::hint::black_box(train(data.x.view(), &data.y, cfg)?);
        }
        best = best.min(start.elapsed().as_secs_f64() * 1e3 / repeats as f64);
    }
    Ok((model, best))
}

fn infer_feature_set(names: &[String]) -> Option<FeatureSet> {
    let first = FeatureSet::from_feature_name(names.first()?)?;
    names
        .iter()
        .all(|n| FeatureSet::from_feature_name(n) == Some(first))
        .then_some(first)
}

/// Baseline on all features versus MBEGA-selected features, both trained on
/// the same stratified training split and scored on the held-out rows.
/// `methods` labels each row (defaults to `clean` / `stego` by label).
pub fn cmd_run(data: &Dataset, methods: Option<&[String]>, cfg: &PipelineConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let feature_set = infer_feature_set(&data.names);
    if let Some(want) = cfg.feature_set {
        if feature_set != Some(want) {
            return Err(Error::InvalidConfig(format!(
                "config expects {want} features but the CSV columns are not all {want}"
            )));
        }
    }
    let methods: Vec<String> = match methods {
        Some(m) if m.len() != data.n_samples() => {
            return Err(Error::ShapeMismatch(format!(
                "{} method labels for {} rows",
                m.len(),
                data.n_samples()
            )))
        }
        Some(m) => m.to_vec(),
        None => data
            .y
            .iter()
            .map(|&l| if l == 0 { "clean" } else { "stego" }.to_string())
            .collect(),
    };

    let (train_idx, test_idx) = stratified_split(&data.y, cfg.split.train_frac, cfg.split.seed)?;
    let train_set = data.select_rows(&train_idx);
    let test_set = data.select_rows(&test_idx);
    train_set.validate_for_selection()?;

    let selection = run_mbega(&train_set, &cfg.mbega)?;
    let cols = selection.selected_indices();
    if cols.is_empty() {
        return Err(Error::InvalidDataset("selection kept no features".into()));
    }
    let train_sel = train_set.select_columns(&cols);
    let test_sel = test_set.select_columns(&cols);

    let repeats = cfg.timing_repeats.unwrap_or(20);
    let (m_before, t_before) = time_training(&train_set, &cfg.classifier, repeats)?;
    let (m_after, t_after) = time_training(&train_sel, &cfg.classifier, repeats)?;
    let eval_before = evaluate(&m_before, test_set.x.view(), &test_set.y)?;
    let eval_after = evaluate(&m_after, test_sel.x.view(), &test_sel.y)?;

    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (pos, &row) in test_idx.iter().enumerate() {
        groups.entry(methods[row].as_str()).or_default().push(pos);
    }
    let per_method = groups
        .into_iter()
        .map(|(method, rows)| {
            let sub = |d: &Dataset| d.select_rows(&rows);
            let (b, a) = (sub(&test_set), sub(&test_sel));
            Ok(MethodRow {
                method: method.to_string(),
                n_test: rows.len(),
                accuracy_before: evaluate(&m_before, b.x.view(), &b.y)?.accuracy,
                accuracy_after: evaluate(&m_after, a.x.view(), &a.y)?.accuracy,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (nb, na) = (data.n_features(), cols.len());
    let report = Report {
        feature_set,
        n_train: train_idx.len(),
        n_test: test_idx.len(),
        n_features_before: nb,
        n_features_after: na,
        pct_feature_reduction: pct_reduction(nb as f64, na as f64),
        accuracy_before: eval_before.accuracy,
        accuracy_after: eval_after.accuracy,
        accuracy_change_points: 100.0 * (eval_after.accuracy - eval_before.accuracy),
        eval_before,
        eval_after,
        per_method,
        selection,
    };
    let timing = Timing {
        train_time_before_ms: t_before,
        train_time_after_ms: t_after,
        pct_time_reduction: pct_reduction(t_before, t_after),
    };
    Ok(RunOutput { report, timing })
}
