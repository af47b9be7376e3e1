mod common;

use common::{assert_rel, mirror, noise_image, textured_image};
use ndarray::Array2;
use stegsel::features::{extract_wam, WamParams};
use stegsel::transforms::dwt1;

fn oracle_band(s: &Array2<f64>, sigma0: f64) -> Vec<f64> {
    let (rows, cols) = s.dim();
    let mut residual = Vec::with_capacity(rows * cols);
    for y in 0..rows {
        for x in 0..cols {
            let mut best = f64::INFINITY;
            for n in [3isize, 5, 7, 9] {
                let r = n / 2;
                let mut acc = 0.0;
                for dy in -r..=r {
                    for dx in -r..=r {
                        let v = s[[mirror(y as isize + dy, rows), mirror(x as isize + dx, cols)]];
                        acc += v * v;
                    }
                }
                best = best.min(acc / (n * n) as f64);
            }
            let v = (best - sigma0).max(0.0);
            residual.push(sigma0 * s[[y, x]] / (sigma0 + v));
        }
    }
    let mean = residual.iter().sum::<f64>() / residual.len() as f64;
    (1..=9)
        .map(|m| residual.iter().map(|r| (r - mean).abs().powi(m)).sum::<f64>() / residual.len() as f64)
        .collect()
}

fn check(img: &stegsel::imagedata::GrayImage) {
    let fv = extract_wam(img, &WamParams::default()).unwrap();
    let b = dwt1(img).unwrap();
    let want: Vec<f64> = [&b.h, &b.v, &b.d]
        .into_iter()
        .flat_map(|band| oracle_band(band, 0.5))
        .collect();
    assert_eq!(fv.len(), 27);
    for (k, (got, exp)) in fv.values.iter().zip(&want).enumerate() {
        assert_rel(*got, *exp, 1e-10, &fv.names[k]);
    }
    assert_eq!(fv.names[0], "wam_H_m1");
    assert_eq!(fv.names[9], "wam_V_m1");
    assert_eq!(fv.names[26], "wam_D_m9");
}

#[test]
fn seeded_noise_matches_straight_line_oracle() {
    check(&noise_image(64, 64, 2024));
}

#[test]
fn textured_non_square_matches_oracle() {
    check(&textured_image(80, 48, 7));
}
