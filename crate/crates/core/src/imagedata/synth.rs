use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use super::GrayImage;
use crate::rng::seeded;

/// Seeded natural-looking cover: a gradient, a few low-frequency
/// sinusoids and Gaussian blobs, plus mild sensor noise.
pub fn synthetic_cover(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut rng = seeded(seed);
    let base = rng.random_range(60.0..190.0);
    let gx = rng.random_range(-40.0..40.0);
    let gy = rng.random_range(-40.0..40.0);
    let waves: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(5.0..25.0),
                rng.random_range(0.5..6.0),
                rng.random_range(0.0..2.0 * PI),
                rng.random_range(0.0..2.0 * PI),
            )
        })
        .collect();
    let blobs: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.random_range(0.0..1.0),
                rng.random_range(0.0..1.0),
                rng.random_range(0.05..0.25),
                rng.random_range(-50.0..50.0),
            )
        })
        .collect();
    let sigma = rng.random_range(0.2..0.65);
    let (w, h) = (width as f64, height as f64);
    GrayImage::from_fn(width, height, |x, y| {
        let u = x as f64 / w;
        let v = y as f64 / h;
        let mut val = base + gx * (u - 0.5) + gy * (v - 0.5);
        for &(amp, freq, theta, phase) in &waves {
            let t = u * theta.cos() + v * theta.sin();
            val += amp * (2.0 * PI * freq * t + phase).sin();
        }
        for &(cx, cy, r, amp) in &blobs {
            let d2 = (u - cx).powi(2) + (v - cy).powi(2);
            val += amp * (-d2 / (2.0 * r * r)).exp();
        }
        let n: f64 = rng.sample(StandardNormal);
        (val + sigma * n).round().clamp(0.0, 255.0) as u8
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_varied() {
        let a = synthetic_cover(64, 48, 3);
        assert_eq!(a, synthetic_cover(64, 48, 3));
        assert_ne!(a, synthetic_cover(64, 48, 4));
        assert_eq!((a.width(), a.height()), (64, 48));
        let distinct: std::collections::HashSet<u8> = a.pixels().iter().copied().collect();
        assert!(distinct.len() > 20);
    }
}
