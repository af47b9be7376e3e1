//! Image quality metrics between an image and its Gaussian-blurred copy.
//!
//! Nineteen metrics: pixel-difference (Minkowsky, max, sorted max),
//! correlation (Czekanowski, structural content, cross correlation,
//! fidelity), angular, full-image and block-median spectral distances,
//! and HVS-weighted errors.

use std::f64::consts::PI;

use ndarray::{s, Array2};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::stats::reflect;
use crate::dataset::FeatureVector;
use crate::error::{Error, Result};
use crate::imagedata::RgbImage;
use crate::transforms::{dft2_plane, idft2_real, Spectrum};

const EPS: f64 = 1e-12;

pub const IQM_NAMES: [&str; 19] = [
    "iqm_minkowsky1",
    "iqm_minkowsky2",
    "iqm_max_diff",
    "iqm_sorted_max_diff",
    "iqm_czekanowski",
    "iqm_structural_content",
    "iqm_cross_correlation",
    "iqm_image_fidelity",
    "iqm_angle_mean",
    "iqm_angle_std",
    "iqm_spectral_mag",
    "iqm_spectral_phase",
    "iqm_weighted_spectral",
    "iqm_median_block_mag",
    "iqm_median_block_phase",
    "iqm_median_block_weighted",
    "iqm_hvs_nae",
    "iqm_hvs_nmse",
    "iqm_hvs_l2",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IqmParams {
    pub gaussian_sigma: f64,
    pub block_size: usize,
    /// Radial frequency assigned to the Nyquist corner in the HVS model.
    pub hvs_scale: f64,
    pub weight_lambda: f64,
    pub sorted_top_frac: f64,
}

impl Default for IqmParams {
    fn default() -> Self {
        Self {
            gaussian_sigma: 0.75,
            block_size: 32,
            hvs_scale: 30.0,
            weight_lambda: 2.5e-5,
            sorted_top_frac: 0.01,
        }
    }
}

impl IqmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gaussian_sigma >= 0.3 && self.gaussian_sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gaussian_sigma {} must be >= 0.3",
                self.gaussian_sigma
            )));
        }
        if self.block_size == 0 {
            return Err(Error::InvalidParameter("block_size must be positive".into()));
        }
        if !(self.hvs_scale > 0.0 && self.weight_lambda > 0.0) {
            return Err(Error::InvalidParameter(
                "hvs_scale and weight_lambda must be positive".into(),
            ));
        }
        if !(self.sorted_top_frac > 0.0 && self.sorted_top_frac <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sorted_top_frac {} outside (0, 1]",
                self.sorted_top_frac
            )));
        }
        Ok(())
    }
}

/// Real-valued three-channel image, planes indexed `[y, x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorPlanes {
    pub planes: [Array2<f64>; 3],
}

impl ColorPlanes {
    pub fn from_rgb(img: &RgbImage) -> Self {
        let plane = |c: usize| {
            Array2::from_shape_fn((img.height(), img.width()), |(y, x)| {
                f64::from(img.get(x, y)[c])
            })
        };
        Self {
            planes: [plane(0), plane(1), plane(2)],
        }
    }

    pub fn dim(&self) -> (usize, usize) {
        self.planes[0].dim()
    }

    pub fn luma(&self) -> Array2<f64> {
        let [r, g, b] = &self.planes;
        0.299 * r + 0.587 * g + 0.114 * b
    }
}

pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / sum).collect()
}

fn blur_plane(p: &Array2<f64>, kernel: &[f64]) -> Array2<f64> {
    let (rows, cols) = p.dim();
    let r = (kernel.len() / 2) as isize;
    let mut tmp = Array2::<f64>::zeros((rows, cols));
    for y in 0..rows {
        for x in 0..cols {
            tmp[[y, x]] = kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * p[[y, reflect(x as isize + k as isize - r, cols)]])
                .sum();
        }
    }
    let mut out = Array2::<f64>::zeros((rows, cols));
    for y in 0..rows {
        for x in 0..cols {
            out[[y, x]] = kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * tmp[[reflect(y as isize + k as isize - r, rows), x]])
                .sum();
        }
    }
    out
}

/// Separable Gaussian blur per channel, mirrored borders, not re-quantized.
pub fn gaussian_filter(img: &RgbImage, sigma: f64) -> Result<ColorPlanes> {
    gaussian_filter_planes(&ColorPlanes::from_rgb(img), sigma)
}

pub fn gaussian_filter_planes(img: &ColorPlanes, sigma: f64) -> Result<ColorPlanes> {
    if !(sigma >= 0.3 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gaussian sigma {sigma} below 0.3"
        )));
    }
    let k = gaussian_kernel(sigma);
    Ok(ColorPlanes {
        planes: [
            blur_plane(&img.planes[0], &k),
            blur_plane(&img.planes[1], &k),
            blur_plane(&img.planes[2], &k),
        ],
    })
}

fn wrap_phase(d: f64) -> f64 {
    let mut d = (d + PI).rem_euclid(2.0 * PI) - PI;
    if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// (magnitude, phase, weighted) spectral distances between two planes.
fn spectral_distances(c: &Array2<f64>, s: &Array2<f64>, lambda: f64) -> [f64; 3] {
    let sc = Spectrum::from_complex(&dft2_plane(c));
    let ss = Spectrum::from_complex(&dft2_plane(s));
    let n = c.len() as f64;
    let (mut mag, mut phase, mut weighted) = (0.0, 0.0, 0.0);
    for (((mc, ms), pc), ps) in sc
        .magnitude
        .iter()
        .zip(&ss.magnitude)
        .zip(&sc.phase)
        .zip(&ss.phase)
    {
        let dm = (mc - ms).powi(2);
        let dp = wrap_phase(pc - ps).powi(2);
        mag += dm;
        phase += dp;
        weighted += lambda * dm + (1.0 - lambda) * dp;
    }
    [mag / n, phase / n, weighted / n]
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Contrast sensitivity weight at radial frequency `rho`.
pub fn hvs_weight(rho: f64) -> f64 {
    2.6 * (0.0192 + 0.114 * rho) * (-(0.114 * rho).powf(1.1)).exp()
}

/// Luma plane filtered by the HVS contrast-sensitivity function.
pub fn hvs_filter(plane: &Array2<f64>, hvs_scale: f64) -> Array2<f64> {
    let (rows, cols) = plane.dim();
    let mut f = dft2_plane(plane);
    let corner = (0.5f64 * 0.5 + 0.5 * 0.5).sqrt();
    for ((u, v), c) in f.indexed_iter_mut() {
        let fy = u.min(rows - u) as f64 / rows as f64;
        let fx = v.min(cols - v) as f64 / cols as f64;
        let rho = hvs_scale * (fx * fx + fy * fy).sqrt() / corner;
        *c *= Complex64::new(hvs_weight(rho), 0.0);
    }
    idft2_real(&f)
}

struct Ratio<'a> {
    fv: &'a mut FeatureVector,
}

impl Ratio<'_> {
    fn of(&mut self, num: f64, den: f64, what: &str) -> f64 {
        if den < EPS {
            self.fv.warn(format!("{what}: zero denominator, defined as 0"));
            0.0
        } else {
            num / den
        }
    }
}

/// The 19 metrics between `reference` (C) and `test` (S).
pub fn iqm_between(reference: &ColorPlanes, test: &ColorPlanes, params: &IqmParams) -> Result<FeatureVector> {
    params.validate()?;
    if reference.dim() != test.dim() {
        return Err(Error::ShapeMismatch(format!(
            "reference {:?} vs test {:?}",
            reference.dim(),
            test.dim()
        )));
    }
    let (rows, cols) = reference.dim();
    let n = (rows * cols) as f64;
    let k = 3.0;
    let mut fv = FeatureVector::with_capacity(19);
    let mut values = Vec::with_capacity(19);

    let c = &reference.planes;
    let t = &test.planes;

    // 1-3: Minkowsky and max difference
    let mut mink1 = 0.0;
    let mut mink2 = 0.0;
    let mut max_diff = 0.0f64;
    for ch in 0..3 {
        let (mut a1, mut a2) = (0.0, 0.0);
        for (x, y) in c[ch].iter().zip(&t[ch]) {
            let d = (x - y).abs();
            a1 += d;
            a2 += d * d;
            max_diff = max_diff.max(d);
        }
        mink1 += a1 / n;
        mink2 += (a2 / n).sqrt();
    }
    values.push(mink1 / k);
    values.push(mink2 / k);
    values.push(max_diff);

    // 4: sorted max difference on the channel-averaged absolute difference
    let mut avg: Vec<f64> = (0..rows * cols)
        .map(|i| {
            let (y, x) = (i / cols, i % cols);
            (0..3).map(|ch| (c[ch][[y, x]] - t[ch][[y, x]]).abs()).sum::<f64>() / k
        })
        .collect();
    avg.sort_by(|a, b| b.total_cmp(a));
    let top = ((params.sorted_top_frac * n).ceil() as usize).clamp(1, avg.len());
    values.push(avg[..top].iter().sum::<f64>() / top as f64);

    // 5: Czekanowski
    let mut czek = 0.0;
    let mut czek_degenerate = false;
    for y in 0..rows {
        for x in 0..cols {
            let (mut mins, mut sums) = (0.0, 0.0);
            for ch in 0..3 {
                let (a, b) = (c[ch][[y, x]], t[ch][[y, x]]);
                mins += a.min(b);
                sums += a + b;
            }
            if sums < EPS {
                czek_degenerate = true;
            } else {
                czek += 1.0 - 2.0 * mins / sums;
            }
        }
    }
    if czek_degenerate {
        fv.warn("czekanowski: zero-intensity pixels contribute 0");
    }
    values.push(czek / n);

    // 6-8: structural content (channel-pooled), cross correlation, fidelity
    let mut ratio = Ratio { fv: &mut fv };
    let sum_cc: f64 = c.iter().flat_map(|p| p.iter()).map(|v| v * v).sum();
    let sum_ss: f64 = t.iter().flat_map(|p| p.iter()).map(|v| v * v).sum();
    values.push(ratio.of(sum_cc, sum_ss, "structural_content"));
    let (mut cc, mut fid) = (0.0, 0.0);
    for ch in 0..3 {
        let c2: f64 = c[ch].iter().map(|v| v * v).sum();
        let cs: f64 = c[ch].iter().zip(&t[ch]).map(|(a, b)| a * b).sum();
        let d2: f64 = c[ch].iter().zip(&t[ch]).map(|(a, b)| (a - b).powi(2)).sum();
        cc += ratio.of(cs, c2, "cross_correlation");
        fid += 1.0 - ratio.of(d2, c2, "image_fidelity");
    }
    values.push(cc / k);
    values.push(fid / k);

    // 9-10: angle between color vectors
    let mut angles = Vec::with_capacity(rows * cols);
    for y in 0..rows {
        for x in 0..cols {
            let a = [c[0][[y, x]], c[1][[y, x]], c[2][[y, x]]];
            let b = [t[0][[y, x]], t[1][[y, x]], t[2][[y, x]]];
            let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            let ang = if na == 0.0 || nb == 0.0 {
                0.0
            } else {
                // atan2(|a x b|, a.b) equals acos of the cosine but stays exact near 0
                let dot: f64 = a.iter().zip(&b).map(|(p, q)| p * q).sum();
                let cross = [
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ];
                cross.iter().map(|v| v * v).sum::<f64>().sqrt().atan2(dot)
            };
            angles.push(ang);
        }
    }
    let amean = angles.iter().sum::<f64>() / n;
    let astd = (angles.iter().map(|a| (a - amean).powi(2)).sum::<f64>() / n).sqrt();
    values.push(amean);
    values.push(astd);

    // 11-13: full-image spectral distances on luma
    let lc = reference.luma();
    let ls = test.luma();
    values.extend(spectral_distances(&lc, &ls, params.weight_lambda));

    // 14-16: block medians
    let bs = params.block_size;
    let mut per_block: [Vec<f64>; 3] = Default::default();
    for by in 0..rows / bs {
        for bx in 0..cols / bs {
            let window = s![by * bs..(by + 1) * bs, bx * bs..(bx + 1) * bs];
            let d = spectral_distances(
                &lc.slice(window).to_owned(),
                &ls.slice(window).to_owned(),
                params.weight_lambda,
            );
            for (acc, v) in per_block.iter_mut().zip(d) {
                acc.push(v);
            }
        }
    }
    for acc in per_block {
        values.push(median(acc));
    }

    // 17-19: HVS-weighted errors
    let hc = hvs_filter(&lc, params.hvs_scale);
    let hs = hvs_filter(&ls, params.hvs_scale);
    let abs_c: f64 = hc.iter().map(|v| v.abs()).sum();
    let sq_c: f64 = hc.iter().map(|v| v * v).sum();
    let abs_d: f64 = hc.iter().zip(&hs).map(|(a, b)| (a - b).abs()).sum();
    let sq_d: f64 = hc.iter().zip(&hs).map(|(a, b)| (a - b).powi(2)).sum();
    let mut ratio = Ratio { fv: &mut fv };
    values.push(ratio.of(abs_d, abs_c, "hvs_nae"));
    values.push(ratio.of(sq_d, sq_c, "hvs_nmse"));
    values.push((sq_d / n).sqrt());

    for (name, v) in IQM_NAMES.iter().zip(values) {
        fv.push(*name, v);
    }
    Ok(fv)
}

/// Metrics between `test` and its blurred copy.
pub fn extract_iqm(test: &RgbImage, params: &IqmParams) -> Result<FeatureVector> {
    params.validate()?;
    if test.width() < 64 || test.height() < 64 {
        return Err(Error::ImageTooSmall(format!(
            "IQM needs at least 64x64, got {}x{}",
            test.width(),
            test.height()
        )));
    }
    let s = ColorPlanes::from_rgb(test);
    let c = gaussian_filter_planes(&s, params.gaussian_sigma)?;
    iqm_between(&c, &s, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use proptest::prelude::*;
    use rand::Rng;

    fn noise_rgb(w: usize, h: usize, seed: u64) -> RgbImage {
        let mut rng = seeded(seed);
        RgbImage::from_fn(w, h, |x, y| {
            let base = (60 + (x + 2 * y) % 120) as u8;
            [
                base.saturating_add(rng.random_range(0..30)),
                base.saturating_add(rng.random_range(0..30)),
                base / 2 + rng.random_range(0..20),
            ]
        })
    }

    #[test]
    fn kernel_properties() {
        let k = gaussian_kernel(0.75);
        assert_eq!(k.len(), 7);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let z: f64 = (-3..=3).map(|i: i32| (-(i * i) as f64 / 1.125).exp()).sum();
        assert!((k[3] - 1.0 / z).abs() < 1e-15);
        assert!((k[4] - (-1.0f64 / 1.125).exp() / z).abs() < 1e-15);
    }

    #[test]
    fn blur_examples() {
        let flat = RgbImage::from_fn(20, 20, |_, _| [9, 80, 200]);
        let f = gaussian_filter(&flat, 1.2).unwrap();
        for (ch, &v) in [9.0, 80.0, 200.0].iter().enumerate() {
            assert!(f.planes[ch].iter().all(|p| (p - v).abs() < 1e-9));
        }
        let imp = RgbImage::from_fn(21, 21, |x, y| if (x, y) == (10, 10) { [255, 0, 0] } else { [0; 3] });
        let f = gaussian_filter(&imp, 0.75).unwrap();
        let k = gaussian_kernel(0.75);
        for dy in 0..7 {
            for dx in 0..7 {
                let got = f.planes[0][[7 + dy, 7 + dx]];
                assert!((got - 255.0 * k[dy] * k[dx]).abs() < 1e-9);
            }
        }
        assert!(gaussian_filter(&imp, 0.2).is_err());
    }

    #[test]
    fn identity_pair() {
        let img = ColorPlanes::from_rgb(&noise_rgb(64, 64, 1));
        let fv = iqm_between(&img, &img, &IqmParams::default()).unwrap();
        assert_eq!(fv.len(), 19);
        let get = |n: &str| fv.get(&format!("iqm_{n}")).unwrap();
        for zero in [
            "minkowsky1",
            "minkowsky2",
            "max_diff",
            "sorted_max_diff",
            "czekanowski",
            "angle_mean",
            "angle_std",
            "spectral_mag",
            "spectral_phase",
            "weighted_spectral",
            "median_block_mag",
            "median_block_phase",
            "median_block_weighted",
            "hvs_nae",
            "hvs_nmse",
            "hvs_l2",
        ] {
            assert!(get(zero).abs() < 1e-12, "{zero} = {}", get(zero));
        }
        for one in ["structural_content", "cross_correlation", "image_fidelity"] {
            assert!((get(one) - 1.0).abs() < 1e-12, "{one}");
        }
    }

    #[test]
    fn black_image_is_flagged_not_nan() {
        let black = RgbImage::from_fn(64, 64, |_, _| [0; 3]);
        let fv = extract_iqm(&black, &IqmParams::default()).unwrap();
        assert_eq!(fv.len(), 19);
        assert!(fv.values.iter().all(|v| v.is_finite()));
        assert!(!fv.warnings.is_empty());
        assert_eq!(fv.get("iqm_structural_content"), Some(0.0));
        assert!(extract_iqm(&noise_rgb(63, 64, 0), &IqmParams::default()).is_err());
    }

    #[test]
    fn median_and_wrap() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!((wrap_phase(1.5 * PI) + 0.5 * PI).abs() < 1e-12);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-12);
        assert_eq!(wrap_phase(0.25), 0.25);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn metric_invariants(seed in any::<u64>()) {
            let params = IqmParams::default();
            let s = ColorPlanes::from_rgb(&noise_rgb(64, 64, seed));
            let c = gaussian_filter_planes(&s, params.gaussian_sigma).unwrap();
            let ab = iqm_between(&c, &s, &params).unwrap();
            let ba = iqm_between(&s, &c, &params).unwrap();
            prop_assert_eq!(ab.len(), 19);
            prop_assert!(ab.values.iter().all(|v| v.is_finite()));
            for name in ["iqm_minkowsky1", "iqm_minkowsky2", "iqm_max_diff", "iqm_sorted_max_diff",
                         "iqm_czekanowski", "iqm_angle_mean", "iqm_spectral_mag",
                         "iqm_spectral_phase", "iqm_hvs_nae", "iqm_hvs_l2"] {
                prop_assert!(ab.get(name).unwrap() >= 0.0);
            }
            for name in ["iqm_minkowsky1", "iqm_minkowsky2", "iqm_max_diff"] {
                prop_assert!((ab.get(name).unwrap() - ba.get(name).unwrap()).abs() < 1e-12);
            }
            let sc = ab.get("iqm_structural_content").unwrap() * ba.get("iqm_structural_content").unwrap();
            prop_assert!((sc - 1.0).abs() < 1e-9);
        }
    }
}
