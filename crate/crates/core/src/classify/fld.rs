use nalgebra::{DMatrix, DVector};
use ndarray::ArrayView2;

use super::{check_training_data, ClassifierKind, Standardizer, TrainedModel};
use crate::error::Result;

/// Fisher linear discriminant on z-scored features:
/// `w = (S_w + lambda I)^-1 (mu1 - mu0)`, `b = -w.(mu0 + mu1)/2`,
/// with `lambda = 1e-6 trace(S_w) / d`.
pub fn train_fld(x: ArrayView2<f64>, y: &[u8]) -> Result<TrainedModel> {
    check_training_data(x, y, 1)?;
    let standardizer = Standardizer::fit(x);
    let d = x.ncols();
    let z: Vec<Vec<f64>> = x
        .rows()
        .into_iter()
        .map(|r| standardizer.apply(r).to_vec())
        .collect();

    let mut mu = [vec![0.0; d], vec![0.0; d]];
    let mut count = [0usize; 2];
    for (zi, &l) in z.iter().zip(y) {
        count[l as usize] += 1;
        for (m, v) in mu[l as usize].iter_mut().zip(zi) {
            *m += v;
        }
    }
    for c in 0..2 {
        mu[c].iter_mut().for_each(|m| *m /= count[c] as f64);
    }

    let mut sw = DMatrix::<f64>::zeros(d, d);
    let mut diff = DVector::<f64>::zeros(d);
    for (zi, &l) in z.iter().zip(y) {
        for (k, (v, m)) in zi.iter().zip(&mu[l as usize]).enumerate() {
            diff[k] = v - m;
        }
        sw.ger(1.0, &diff, &diff, 1.0);
    }
    let trace = sw.trace();
    let lambda = if trace > 0.0 {
        1e-6 * trace / d as f64
    } else {
        1e-12
    };
    for i in 0..d {
        sw[(i, i)] += lambda;
    }
    let delta = DVector::from_iterator(d, mu[1].iter().zip(&mu[0]).map(|(a, b)| a - b));
    let w = match sw.clone().cholesky() {
        Some(ch) => ch.solve(&delta),
        None => sw
            .lu()
            .solve(&delta)
            .unwrap_or_else(|| DVector::zeros(d)),
    };
    let b = -w
        .iter()
        .zip(mu[0].iter().zip(&mu[1]))
        .map(|(wi, (a, c))| wi * (a + c) / 2.0)
        .sum::<f64>();
    Ok(TrainedModel {
        kind: ClassifierKind::Fld,
        w: w.iter().copied().collect(),
        b,
        standardizer,
    })
}
