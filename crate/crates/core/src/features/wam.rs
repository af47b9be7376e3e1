//! Wavelet absolute moments: central absolute moments of quasi-Wiener
//! residuals of the three first-level detail bands.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::stats::reflect;
use crate::dataset::FeatureVector;
use crate::error::{Error, Result};
use crate::imagedata::GrayImage;
use crate::transforms::dwt1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WamParams {
    /// Stego noise variance; 0.5 for LSB matching at full rate.
    pub sigma0_sq: f64,
    pub windows: Vec<usize>,
    pub max_moment: usize,
}

impl Default for WamParams {
    fn default() -> Self {
        Self {
            sigma0_sq: 0.5,
            windows: vec![3, 5, 7, 9],
            max_moment: 9,
        }
    }
}

impl WamParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma0_sq > 0.0 && self.sigma0_sq.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma0_sq {} must be positive",
                self.sigma0_sq
            )));
        }
        if self.windows.is_empty() || self.windows.iter().any(|&w| w < 3 || w % 2 == 0) {
            return Err(Error::InvalidParameter(format!(
                "windows {:?} must be odd and >= 3",
                self.windows
            )));
        }
        if self.max_moment < 1 {
            return Err(Error::InvalidParameter("max_moment must be >= 1".into()));
        }
        Ok(())
    }

    fn largest_window(&self) -> usize {
        self.windows.iter().copied().max().unwrap_or(0)
    }
}

/// Filtered subband `sigma0^2 S / (sigma0^2 + v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField {
    pub values: Array2<f64>,
}

/// MAP local variance: `max(0, min_N vN - sigma0^2)` where `vN` is the mean
/// of `S^2` over the `N x N` window, with mirrored borders.
pub fn local_variance(band: &Array2<f64>, params: &WamParams) -> Result<Array2<f64>> {
    params.validate()?;
    let (rows, cols) = band.dim();
    let big = params.largest_window();
    if rows < big || cols < big {
        return Err(Error::ImageTooSmall(format!(
            "band {cols}x{rows} smaller than the {big}x{big} window"
        )));
    }
    let pad = big / 2;
    let (pr, pc) = (rows + 2 * pad, cols + 2 * pad);
    // summed-area table of the padded squares, one extra leading row/col
    let mut sat = Array2::<f64>::zeros((pr + 1, pc + 1));
    for r in 0..pr {
        let sr = reflect(r as isize - pad as isize, rows);
        let mut run = 0.0;
        for c in 0..pc {
            let sc = reflect(c as isize - pad as isize, cols);
            let s = band[[sr, sc]];
            run += s * s;
            sat[[r + 1, c + 1]] = sat[[r, c + 1]] + run;
        }
    }
    let window_sum = |r: usize, c: usize, half: usize| {
        // padded coordinates of the window centered at band (r, c)
        let (r0, c0) = (r + pad - half, c + pad - half);
        let (r1, c1) = (r + pad + half + 1, c + pad + half + 1);
        sat[[r1, c1]] - sat[[r0, c1]] - sat[[r1, c0]] + sat[[r0, c0]]
    };
    let mut out = Array2::zeros((rows, cols));
    for r in 0..rows {
        for c in 0..cols {
            let min_v = params
                .windows
                .iter()
                .map(|&n| window_sum(r, c, n / 2) / (n * n) as f64)
                .fold(f64::INFINITY, f64::min);
            out[[r, c]] = (min_v - params.sigma0_sq).max(0.0);
        }
    }
    Ok(out)
}

pub fn wiener_residual(band: &Array2<f64>, v: &Array2<f64>, sigma0_sq: f64) -> Result<ResidualField> {
    if band.dim() != v.dim() {
        return Err(Error::ShapeMismatch(format!(
            "band {:?} vs variance {:?}",
            band.dim(),
            v.dim()
        )));
    }
    let values = ndarray::Zip::from(band)
        .and(v)
        .map_collect(|&s, &vi| sigma0_sq * s / (sigma0_sq + vi));
    Ok(ResidualField { values })
}

/// `A_m = mean |R - mean(R)|^m` for `m = 1..=max_moment`.
pub fn abs_central_moments(field: &ResidualField, max_moment: usize) -> Result<Vec<f64>> {
    let n = field.values.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty residual field".into()));
    }
    let mean = field.values.sum() / n as f64;
    let mut acc = vec![0.0; max_moment];
    for &r in &field.values {
        let d = (r - mean).abs();
        let mut p = 1.0;
        for a in acc.iter_mut() {
            p *= d;
            *a += p;
        }
    }
    Ok(acc.into_iter().map(|a| a / n as f64).collect())
}

/// The 27 WAM features, ordered H(m=1..9), V(m=1..9), D(m=1..9).
pub fn extract_wam(img: &GrayImage, params: &WamParams) -> Result<FeatureVector> {
    params.validate()?;
    if img.width() < 32 || img.height() < 32 {
        return Err(Error::ImageTooSmall(format!(
            "WAM needs at least 32x32, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    let bands = dwt1(img)?;
    let mut fv = FeatureVector::with_capacity(3 * params.max_moment);
    for (tag, band) in [("H", &bands.h), ("V", &bands.v), ("D", &bands.d)] {
        let v = local_variance(band, params)?;
        let r = wiener_residual(band, &v, params.sigma0_sq)?;
        for (m, a) in abs_central_moments(&r, params.max_moment)?.into_iter().enumerate() {
            fv.push(format!("wam_{tag}_m{}", m + 1), a);
        }
    }
    Ok(fv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    fn field(v: &[f64]) -> ResidualField {
        ResidualField {
            values: Array2::from_shape_vec((1, v.len()), v.to_vec()).unwrap(),
        }
    }

    #[test]
    fn local_variance_examples() {
        let p = WamParams::default();
        let zero = Array2::zeros((9, 9));
        assert!(local_variance(&zero, &p).unwrap().iter().all(|&v| v == 0.0));

        let c = Array2::from_elem((12, 10), 1.5);
        assert!(local_variance(&c, &p)
            .unwrap()
            .iter()
            .all(|&v| (v - (2.25 - 0.5)).abs() < 1e-12));
        let small = Array2::from_elem((12, 10), 0.5);
        assert!(local_variance(&small, &p).unwrap().iter().all(|&v| v == 0.0));

        let mut spike = Array2::zeros((9, 9));
        spike[[4, 4]] = 3.0;
        // min(9/9, 9/25, 9/49, 9/81) = 0.111 < 0.5
        assert_eq!(local_variance(&spike, &p).unwrap()[[4, 4]], 0.0);

        assert!(local_variance(&Array2::zeros((8, 9)), &p).is_err());
    }

    #[test]
    fn local_variance_matches_direct_window_sums() {
        let mut rng = seeded(3);
        let band = Array2::from_shape_fn((11, 13), |_| rng.random_range(-4.0..4.0));
        let p = WamParams::default();
        let fast = local_variance(&band, &p).unwrap();
        for r in 0..11 {
            for c in 0..13 {
                let mut best = f64::INFINITY;
                for &n in &p.windows {
                    let h = (n / 2) as isize;
                    let mut s = 0.0;
                    for dr in -h..=h {
                        for dc in -h..=h {
                            let rr = reflect(r as isize + dr, 11);
                            let cc = reflect(c as isize + dc, 13);
                            s += band[[rr, cc]].powi(2);
                        }
                    }
                    best = best.min(s / (n * n) as f64);
                }
                assert!((fast[[r, c]] - (best - 0.5).max(0.0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reflect_is_symmetric_padding() {
        let got: Vec<usize> = (-3..8).map(|i| reflect(i, 5)).collect();
        assert_eq!(got, vec![2, 1, 0, 0, 1, 2, 3, 4, 4, 3, 2]);
    }

    #[test]
    fn residual_examples() {
        let s = Array2::from_elem((2, 2), 2.0);
        let z = Array2::zeros((2, 2));
        assert_eq!(wiener_residual(&s, &z, 0.5).unwrap().values, s);
        assert!(wiener_residual(&z, &s, 0.5)
            .unwrap()
            .values
            .iter()
            .all(|&v| v == 0.0));
        let v = Array2::from_elem((2, 2), 0.5);
        assert!(wiener_residual(&s, &v, 0.5)
            .unwrap()
            .values
            .iter()
            .all(|&r| (r - 1.0).abs() < 1e-15));
        assert!(wiener_residual(&s, &Array2::zeros((2, 3)), 0.5).is_err());
    }

    #[test]
    fn moment_examples() {
        assert_eq!(abs_central_moments(&field(&[0.0; 4]), 9).unwrap(), vec![0.0; 9]);
        assert_eq!(abs_central_moments(&field(&[-1.0, 1.0]), 9).unwrap(), vec![1.0; 9]);
        assert_eq!(abs_central_moments(&field(&[0.0, 2.0]), 9).unwrap(), vec![1.0; 9]);
        assert!(abs_central_moments(&field(&[]), 9).is_err());
    }

    #[test]
    fn constant_image_has_zero_features() {
        let fv = extract_wam(&GrayImage::filled(64, 64, 200), &WamParams::default()).unwrap();
        assert_eq!(fv.len(), 27);
        assert!(fv.values.iter().all(|&v| v.abs() < 1e-12));
        assert_eq!(fv.names[0], "wam_H_m1");
        assert_eq!(fv.names[26], "wam_D_m9");
        assert!(extract_wam(&GrayImage::filled(31, 64, 0), &WamParams::default()).is_err());
    }

    #[test]
    fn params_validation() {
        let mut p = WamParams::default();
        p.windows = vec![3, 4];
        assert!(p.validate().is_err());
        p = WamParams {
            sigma0_sq: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    fn noise_image(seed: u64) -> GrayImage {
        let mut rng = seeded(seed);
        GrayImage::from_fn(48, 40, |x, y| {
            (100.0 + 40.0 * ((x + y) as f64 / 20.0).sin() + rng.random_range(-8.0..8.0)) as u8
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn invariants_hold(seed in any::<u64>(), shift in 0u8..50) {
            let img = noise_image(seed);
            let p = WamParams::default();
            let fv = extract_wam(&img, &p).unwrap();
            prop_assert_eq!(fv.len(), 27);
            prop_assert!(fv.values.iter().all(|v| v.is_finite() && *v >= 0.0));
            // Lyapunov: A_m^(1/m) nondecreasing in m
            for band in fv.values.chunks(9) {
                for m in 1..9 {
                    let lo = band[m - 1].powf(1.0 / m as f64);
                    let hi = band[m].powf(1.0 / (m + 1) as f64);
                    prop_assert!(hi >= lo - 1e-12 * lo.max(1.0), "m={} {} {}", m, lo, hi);
                }
            }
            // gain bound |R| <= |S|
            let bands = dwt1(&img).unwrap();
            for band in [&bands.h, &bands.v, &bands.d] {
                let v = local_variance(band, &p).unwrap();
                let r = wiener_residual(band, &v, p.sigma0_sq).unwrap();
                for (a, b) in r.values.iter().zip(band.iter()) {
                    prop_assert!(a.abs() <= b.abs() + 1e-15);
                }
            }
            // brightness shift only changes the approximation band
            let shifted = GrayImage::from_fn(48, 40, |x, y| img.get(x, y).saturating_add(shift));
            if img.pixels().iter().all(|&p| u16::from(p) + u16::from(shift) <= 255) {
                let fs = extract_wam(&shifted, &p).unwrap();
                for (a, b) in fv.values.iter().zip(&fs.values) {
                    prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0));
                }
            }
        }
    }
}
