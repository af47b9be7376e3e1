#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use stegsel::imagedata::{GrayImage, RgbImage};

pub fn rng(seed: u64) -> Xoshiro256StarStar {
    Xoshiro256StarStar::seed_from_u64(seed)
}

pub fn noise_image(w: usize, h: usize, seed: u64) -> GrayImage {
    let mut r = rng(seed);
    GrayImage::from_fn(w, h, |_, _| r.random())
}

/// Smooth ramp plus small noise: nonzero but structured coefficients.
pub fn textured_image(w: usize, h: usize, seed: u64) -> GrayImage {
    let mut r = rng(seed);
    GrayImage::from_fn(w, h, |x, y| {
        let base = 40.0 + 0.6 * x as f64 + 0.3 * y as f64 + 25.0 * ((x as f64) / 5.0).sin();
        (base + r.random_range(-6.0..6.0)).round().clamp(0.0, 255.0) as u8
    })
}

pub fn noise_rgb(w: usize, h: usize, seed: u64) -> RgbImage {
    let mut r = rng(seed);
    RgbImage::from_fn(w, h, |_, _| [r.random(), r.random(), r.random()])
}

/// Numpy-style 'symmetric' padding index.
pub fn mirror(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

pub fn assert_rel(actual: f64, expected: f64, tol: f64, what: &str) {
    let scale = expected.abs().max(1e-300);
    let ok = (actual - expected).abs() <= tol * scale || (actual - expected).abs() <= tol * 1e-12;
    assert!(ok, "{what}: {actual} vs {expected} (rel tol {tol})");
}

/// Population mean, variance, skewness and kurtosis, written out directly.
pub fn moments4(v: &[f64]) -> [f64; 4] {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let m2 = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = v.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    let m4 = v.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let sd = m2.sqrt();
    if sd < 1e-12 {
        [mean, m2, 0.0, 0.0]
    } else {
        [mean, m2, m3 / sd.powi(3), m4 / (m2 * m2)]
    }
}
