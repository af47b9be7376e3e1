use ndarray::ArrayView2;
use rand::Rng;

use super::{check_training_data, ClassifierKind, Standardizer, TrainedModel};
use crate::error::{Error, Result};
use crate::rng::seeded;

/// Linear soft-margin SVM trained with Pegasos (step `1/(lambda t)`, ball
/// projection). The bias is learned as the weight of a constant feature.
pub fn train_svm_linear(
    x: ArrayView2<f64>,
    y: &[u8],
    lambda: f64,
    epochs: usize,
    seed: u64,
) -> Result<TrainedModel> {
    check_training_data(x, y, 1)?;
    if !(lambda > 0.0 && lambda.is_finite()) || epochs == 0 {
        return Err(Error::InvalidParameter(format!(
            "svm lambda {lambda} / epochs {epochs}"
        )));
    }
    let standardizer = Standardizer::fit(x);
    let n = x.nrows();
    let d = x.ncols();
    let z: Vec<Vec<f64>> = x
        .rows()
        .into_iter()
        .map(|r| {
            let mut v = standardizer.apply(r).to_vec();
            v.push(1.0);
            v
        })
        .collect();
    let sign: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();

    let mut rng = seeded(seed);
    let mut w = vec![0.0; d + 1];
    let radius = 1.0 / lambda.sqrt();
    for t in 1..=epochs * n {
        let i = rng.random_range(0..n);
        let eta = 1.0 / (lambda * t as f64);
        let margin = sign[i] * w.iter().zip(&z[i]).map(|(a, b)| a * b).sum::<f64>();
        let shrink = 1.0 - eta * lambda;
        w.iter_mut().for_each(|v| *v *= shrink);
        if margin < 1.0 {
            for (v, zi) in w.iter_mut().zip(&z[i]) {
                *v += eta * sign[i] * zi;
            }
        }
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > radius {
            let f = radius / norm;
            w.iter_mut().for_each(|v| *v *= f);
        }
    }
    let b = w.pop().expect("bias weight");
    Ok(TrainedModel {
        kind: ClassifierKind::Svm,
        w,
        b,
        standardizer,
    })
}
