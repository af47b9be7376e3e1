//! Calibrated DCT features: L1 distances between functionals of an image's
//! quantized block DCT and those of its 4-pixel-cropped recompression.

use rand::Rng;

use crate::dataset::FeatureVector;
use crate::error::{Error, Result};
use crate::imagedata::GrayImage;
use crate::rng::seeded;
use crate::transforms::{block_dct_quant, decode, DctCoeffs, QTable};

/// Histogram support `-8..=8`; values outside are clipped to the ends.
const HIST_RADIUS: i32 = 8;
const HIST_BINS: usize = (2 * HIST_RADIUS + 1) as usize;
/// 0-based (row, col) of modes (2,1), (1,2), (1,3), (2,2), (3,1).
const INDIVIDUAL_MODES: [(usize, usize); 5] = [(1, 0), (0, 1), (0, 2), (1, 1), (2, 0)];
const DUAL_VALUES: std::ops::RangeInclusive<i32> = -5..=5;

pub const FRIDRICH_NAMES: [&str; 23] = [
    "fr_ghist",
    "fr_h21",
    "fr_h12",
    "fr_h13",
    "fr_h22",
    "fr_h31",
    "fr_dual_m5",
    "fr_dual_m4",
    "fr_dual_m3",
    "fr_dual_m2",
    "fr_dual_m1",
    "fr_dual_0",
    "fr_dual_p1",
    "fr_dual_p2",
    "fr_dual_p3",
    "fr_dual_p4",
    "fr_dual_p5",
    "fr_var",
    "fr_b1",
    "fr_b2",
    "fr_n00",
    "fr_n01",
    "fr_n11",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSet {
    pub global_hist: Vec<f64>,
    pub indiv_hists: [Vec<f64>; 5],
    /// `dual_hists[k][i][j]`: share of value `k - 5` at mode `(i, j)`.
    pub dual_hists: Vec<[[f64; 8]; 8]>,
    pub variation: f64,
    pub blockiness: (f64, f64),
    /// (N00, N01, N11)
    pub cooccur: (f64, f64, f64),
}

/// Crops 4 pixels from the top and left edges.
pub fn calibrate(img: &GrayImage) -> Result<GrayImage> {
    calibrate_by(img, 4, 4)
}

fn calibrate_by(img: &GrayImage, dx: usize, dy: usize) -> Result<GrayImage> {
    if img.width() < 24 || img.height() < 24 {
        return Err(Error::ImageTooSmall(format!(
            "calibration needs at least 24x24, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    img.crop(dx, dy)
}

fn normalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
}

fn bin(v: i32) -> usize {
    (v.clamp(-HIST_RADIUS, HIST_RADIUS) + HIST_RADIUS) as usize
}

fn blockiness(img: &GrayImage, alpha: i32) -> f64 {
    let (w, h) = (img.width(), img.height());
    let px = |x: usize, y: usize| f64::from(img.get(x, y));
    let mut sum = 0.0;
    // horizontal boundaries: rows 8i-1 and 8i (0-based)
    let row_bounds = (h - 1) / 8;
    for i in 1..=row_bounds {
        for x in 0..w {
            sum += (px(x, 8 * i - 1) - px(x, 8 * i)).abs().powi(alpha);
        }
    }
    let col_bounds = (w - 1) / 8;
    for j in 1..=col_bounds {
        for y in 0..h {
            sum += (px(8 * j - 1, y) - px(8 * j, y)).abs().powi(alpha);
        }
    }
    let count = w * row_bounds + h * col_bounds;
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

pub fn functionals(coeffs: &DctCoeffs, decoded: &GrayImage) -> Result<FunctionalSet> {
    if coeffs.blocks.is_empty() {
        return Err(Error::InvalidParameter("no DCT blocks".into()));
    }
    if decoded.width() != coeffs.blocks_w * 8 || decoded.height() != coeffs.blocks_h * 8 {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} blocks vs {}x{} decoded image",
            coeffs.blocks_w,
            coeffs.blocks_h,
            decoded.width(),
            decoded.height()
        )));
    }

    let mut global_hist = vec![0.0; HIST_BINS];
    let mut indiv_hists: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; HIST_BINS]);
    let mut dual_hists = vec![[[0.0; 8]; 8]; DUAL_VALUES.count()];
    for b in &coeffs.blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                global_hist[bin(c)] += 1.0;
                if DUAL_VALUES.contains(&c) {
                    dual_hists[(c - DUAL_VALUES.start()) as usize][i][j] += 1.0;
                }
            }
        }
        for (h, &(i, j)) in indiv_hists.iter_mut().zip(&INDIVIDUAL_MODES) {
            h[bin(b[i][j])] += 1.0;
        }
    }
    normalize(&mut global_hist);
    indiv_hists.iter_mut().for_each(|h| normalize(h));
    for g in &mut dual_hists {
        let s: f64 = g.iter().flatten().sum();
        if s > 0.0 {
            g.iter_mut().flatten().for_each(|x| *x /= s);
        }
    }

    let (bh, bw) = (coeffs.blocks_h, coeffs.blocks_w);
    let mode_abs_diff = |a: &[[i32; 8]; 8], b: &[[i32; 8]; 8]| -> f64 {
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| f64::from((x - y).abs()))
            .sum()
    };
    let mut var_sum = 0.0;
    let mut pairs = 0usize;
    // N00, N01, N11 counts over horizontally adjacent blocks, same mode
    let mut co = [0.0f64; 3];
    let mut co_pairs = 0usize;
    for by in 0..bh {
        for bx in 0..bw {
            let here = coeffs.block(by, bx);
            if bx + 1 < bw {
                let right = coeffs.block(by, bx + 1);
                var_sum += mode_abs_diff(here, right);
                pairs += 1;
                for (s, t) in here.iter().flatten().zip(right.iter().flatten()) {
                    match (s.abs(), t.abs()) {
                        (0, 0) => co[0] += 1.0,
                        (0, 1) | (1, 0) => co[1] += 1.0,
                        (1, 1) => co[2] += 1.0,
                        _ => {}
                    }
                }
                co_pairs += 64;
            }
            if by + 1 < bh {
                var_sum += mode_abs_diff(here, coeffs.block(by + 1, bx));
                pairs += 1;
            }
        }
    }
    let variation = if pairs == 0 {
        0.0
    } else {
        var_sum / (pairs * 64) as f64
    };
    let cooccur = if co_pairs == 0 {
        (0.0, 0.0, 0.0)
    } else {
        let n = co_pairs as f64;
        (co[0] / n, co[1] / n, co[2] / n)
    };

    Ok(FunctionalSet {
        global_hist,
        indiv_hists,
        dual_hists,
        variation,
        blockiness: (blockiness(decoded, 1), blockiness(decoded, 2)),
        cooccur,
    })
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// The 23 per-functional L1 distances in table order.
pub fn functional_distances(f1: &FunctionalSet, f2: &FunctionalSet) -> Vec<f64> {
    let mut out = Vec::with_capacity(23);
    out.push(l1(&f1.global_hist, &f2.global_hist));
    for (a, b) in f1.indiv_hists.iter().zip(&f2.indiv_hists) {
        out.push(l1(a, b));
    }
    for (a, b) in f1.dual_hists.iter().zip(&f2.dual_hists) {
        out.push(l1(a.as_flattened(), b.as_flattened()));
    }
    out.push((f1.variation - f2.variation).abs());
    out.push((f1.blockiness.0 - f2.blockiness.0).abs());
    out.push((f1.blockiness.1 - f2.blockiness.1).abs());
    out.push((f1.cooccur.0 - f2.cooccur.0).abs());
    out.push((f1.cooccur.1 - f2.cooccur.1).abs());
    out.push((f1.cooccur.2 - f2.cooccur.2).abs());
    out
}

fn to_features(f1: &FunctionalSet, f2: &FunctionalSet) -> FeatureVector {
    let mut fv = FeatureVector::with_capacity(23);
    for (name, v) in FRIDRICH_NAMES.iter().zip(functional_distances(f1, f2)) {
        fv.push(*name, v);
    }
    fv
}

/// Features of a pixel image: J1 is its quantized block DCT, J2 that of
/// the calibrated crop.
pub fn extract_fridrich(img: &GrayImage, qtable: &QTable) -> Result<FeatureVector> {
    extract_fridrich_with_offset(img, qtable, 4, 4)
}

/// As [`extract_fridrich`] with an explicit calibration crop; `(0, 0)`
/// makes J2 identical to J1.
pub fn extract_fridrich_with_offset(
    img: &GrayImage,
    qtable: &QTable,
    dx: usize,
    dy: usize,
) -> Result<FeatureVector> {
    let j1 = block_dct_quant(img, qtable)?;
    let j2 = block_dct_quant(&calibrate_by(img, dx, dy)?, qtable)?;
    Ok(to_features(
        &functionals(&j1, &decode(&j1))?,
        &functionals(&j2, &decode(&j2))?,
    ))
}

/// Features of an already-quantized image: J2 is recompressed from the
/// cropped decoding of J1.
pub fn extract_fridrich_from_coeffs(j1: &DctCoeffs) -> Result<FeatureVector> {
    let pixels = decode(j1);
    let j2 = block_dct_quant(&calibrate(&pixels)?, &j1.qtable)?;
    Ok(to_features(
        &functionals(j1, &pixels)?,
        &functionals(&j2, &decode(&j2))?,
    ))
}

/// JSteg-style embedding: the two's-complement LSB of a seeded selection of
/// AC coefficients outside {0, 1} is set to a message bit.
pub fn embed_jsteg(coeffs: &DctCoeffs, rate: f64, seed: u64) -> Result<DctCoeffs> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidParameter(format!(
            "embedding rate {rate} outside [0, 1]"
        )));
    }
    let usable: Vec<(usize, usize, usize)> = coeffs
        .blocks
        .iter()
        .enumerate()
        .flat_map(|(b, blk)| {
            (0..64).filter_map(move |m| {
                let (i, j) = (m / 8, m % 8);
                let v = blk[i][j];
                (m != 0 && v != 0 && v != 1).then_some((b, i, j))
            })
        })
        .collect();
    let mut rng = seeded(seed);
    let sel = crate::imagedata::select_indices(&mut rng, usable.len(), rate);
    let mut out = coeffs.clone();
    for k in sel {
        let (b, i, j) = usable[k];
        let bit = rng.random::<bool>() as i32;
        out.blocks[b][i][j] = jsteg_set_lsb(out.blocks[b][i][j], bit);
    }
    Ok(out)
}

pub(crate) fn jsteg_set_lsb(v: i32, bit: i32) -> i32 {
    (v & !1) | bit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::Block;

    fn coeffs_from(blocks: Vec<Block>, bh: usize, bw: usize) -> DctCoeffs {
        DctCoeffs {
            blocks_h: bh,
            blocks_w: bw,
            blocks,
            qtable: QTable::default(),
        }
    }

    #[test]
    fn calibrate_examples() {
        let img = GrayImage::from_fn(64, 64, |x, y| (x * 3 + y) as u8);
        let c = calibrate(&img).unwrap();
        assert_eq!((c.width(), c.height()), (60, 60));
        assert_eq!(c.get(0, 0), img.get(4, 4));
        let cc = calibrate(&c).unwrap();
        assert_ne!((cc.width(), cc.height()), (c.width(), c.height()));
        assert!(calibrate(&GrayImage::filled(23, 30, 0)).is_err());
    }

    #[test]
    fn zero_coefficients() {
        let c = coeffs_from(vec![[[0; 8]; 8]; 6], 2, 3);
        let f = functionals(&c, &GrayImage::filled(24, 16, 128)).unwrap();
        let mut expected = vec![0.0; 17];
        expected[8] = 1.0;
        assert_eq!(f.global_hist, expected);
        assert_eq!(f.variation, 0.0);
        assert_eq!(f.cooccur, (1.0, 0.0, 0.0));
        assert_eq!(f.blockiness, (0.0, 0.0));
        // every dual histogram but g^0 is empty; g^0 is uniform over modes
        assert!(f.dual_hists[5].iter().flatten().all(|&v| (v - 1.0 / 64.0).abs() < 1e-15));
        assert!(f.dual_hists[0].iter().flatten().all(|&v| v == 0.0));
        assert!(functionals(&c, &GrayImage::filled(16, 16, 0)).is_err());
    }

    #[test]
    fn identical_blocks_have_zero_variation() {
        let mut b = [[0; 8]; 8];
        b[0][0] = 40;
        b[2][3] = -7;
        let c = coeffs_from(vec![b, b], 1, 2);
        let f = functionals(&c, &decode(&c)).unwrap();
        assert_eq!(f.variation, 0.0);
    }

    #[test]
    fn blockiness_of_step_edges() {
        // columns alternate 10 / 20 per 8-pixel block: every vertical boundary jumps by 10
        let img = GrayImage::from_fn(24, 16, |x, _| if (x / 8) % 2 == 0 { 10 } else { 20 });
        // 2 column boundaries * 16 rows jump 10; 1 row boundary * 24 cols are flat
        let b1 = blockiness(&img, 1);
        let b2 = blockiness(&img, 2);
        assert!((b1 - 320.0 / 56.0).abs() < 1e-12);
        assert!((b2 - 3200.0 / 56.0).abs() < 1e-12);
    }

    #[test]
    fn identity_calibration_gives_zero() {
        let img = GrayImage::from_fn(64, 64, |x, y| ((x * 13 + y * 7) % 200) as u8);
        let fv = extract_fridrich_with_offset(&img, &QTable::default(), 0, 0).unwrap();
        assert_eq!(fv.len(), 23);
        assert!(fv.values.iter().all(|&v| v == 0.0));
        let fv = extract_fridrich(&img, &QTable::default()).unwrap();
        assert_eq!(fv.names, FRIDRICH_NAMES);
        assert!(fv.values.iter().all(|&v| v.is_finite() && v >= 0.0));
    }

    #[test]
    fn jsteg_lsb_convention() {
        for v in -8..=8 {
            for bit in 0..=1 {
                let out = jsteg_set_lsb(v, bit);
                assert_eq!(out.rem_euclid(2), bit, "v={v}");
                assert!((out - v).abs() <= 1);
                if v.rem_euclid(2) == bit {
                    assert_eq!(out, v);
                }
                if v != 0 && v != 1 {
                    assert!(out != 0 && out != 1, "v={v} bit={bit}");
                }
            }
        }
        assert_eq!(jsteg_set_lsb(-5, 0), -6);
        assert_eq!(jsteg_set_lsb(-6, 1), -5);
        assert_eq!(jsteg_set_lsb(4, 1), 5);
    }

    #[test]
    fn jsteg_respects_usability() {
        let img = GrayImage::from_fn(64, 64, |x, y| ((x * 31 + y * 17) % 256) as u8);
        let c = block_dct_quant(&img, &QTable::with_quality(90).unwrap()).unwrap();
        assert_eq!(embed_jsteg(&c, 0.0, 3).unwrap(), c);
        let s = embed_jsteg(&c, 1.0, 3).unwrap();
        let mut changed = 0;
        for (a, b) in c.blocks.iter().zip(&s.blocks) {
            assert_eq!(a[0][0], b[0][0]);
            for (x, y) in a.iter().flatten().zip(b.iter().flatten()) {
                if *x == 0 || *x == 1 {
                    assert_eq!(x, y);
                }
                if x != y {
                    changed += 1;
                }
            }
        }
        assert!(changed > 0);
        assert!(embed_jsteg(&c, 1.1, 3).is_err());
    }
}
