//! One-level orthonormal Daubechies-4 (8-tap) DWT with periodic extension,
//! and the recursive subband pyramid built from it.

use ndarray::{Array2, ArrayView1, Axis};

use crate::error::{Error, Result};
use crate::imagedata::GrayImage;

/// db4 analysis low-pass taps.
pub const DB4_LOW: [f64; 8] = [
    -0.010_597_401_784_997_278,
    0.032_883_011_666_982_945,
    0.030_841_381_835_986_965,
    -0.187_034_811_718_881_14,
    -0.027_983_769_416_983_85,
    0.630_880_767_929_590_4,
    0.714_846_570_552_541_5,
    0.230_377_813_308_855_23,
];

/// Quadrature mirror of [`DB4_LOW`]: `g[j] = (-1)^(j+1) h[7-j]`.
pub const DB4_HIGH: [f64; 8] = [
    -0.230_377_813_308_855_23,
    0.714_846_570_552_541_5,
    -0.630_880_767_929_590_4,
    -0.027_983_769_416_983_85,
    0.187_034_811_718_881_14,
    0.030_841_381_835_986_965,
    -0.032_883_011_666_982_945,
    -0.010_597_401_784_997_278,
];

/// First-level detail and approximation bands, each `ceil(h/2) x ceil(w/2)`.
///
/// `h` holds horizontal detail (high-pass along x), `v` vertical detail
/// (high-pass along y) and `d` the diagonal band.
#[derive(Debug, Clone, PartialEq)]
pub struct Subbands {
    pub l: Array2<f64>,
    pub h: Array2<f64>,
    pub v: Array2<f64>,
    pub d: Array2<f64>,
}

impl Subbands {
    pub fn dim(&self) -> (usize, usize) {
        self.l.dim()
    }
}

/// Levels `1..=n`, each computed from the previous level's approximation band.
#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid {
    pub levels: Vec<Subbands>,
}

impl Pyramid {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Level `i` (1-based).
    pub fn level(&self, i: usize) -> &Subbands {
        &self.levels[i - 1]
    }
}

fn analyze_1d(x: ArrayView1<f64>, lo: &mut [f64], hi: &mut [f64]) {
    let n = x.len();
    // odd lengths: repeat the last sample so the periodic signal has even length
    let m = n + n % 2;
    let at = |i: usize| {
        let i = i % m;
        if i < n {
            x[i]
        } else {
            x[n - 1]
        }
    };
    for k in 0..m / 2 {
        let (mut a, mut d) = (0.0, 0.0);
        for j in 0..8 {
            let s = at(2 * k + j);
            a += DB4_LOW[j] * s;
            d += DB4_HIGH[j] * s;
        }
        lo[k] = a;
        hi[k] = d;
    }
}

/// Splits `input` along `axis` into (low, high) halves.
fn analyze_axis(input: &Array2<f64>, axis: Axis) -> (Array2<f64>, Array2<f64>) {
    let (rows, cols) = input.dim();
    let shape = if axis == Axis(1) {
        (rows, cols.div_ceil(2))
    } else {
        (rows.div_ceil(2), cols)
    };
    let mut lo = Array2::zeros(shape);
    let mut hi = Array2::zeros(shape);
    let half = if axis == Axis(1) { shape.1 } else { shape.0 };
    let mut bl = vec![0.0; half];
    let mut bh = vec![0.0; half];
    for (i, lane) in input.lanes(axis).into_iter().enumerate() {
        analyze_1d(lane, &mut bl, &mut bh);
        for k in 0..half {
            let idx = if axis == Axis(1) { (i, k) } else { (k, i) };
            lo[idx] = bl[k];
            hi[idx] = bh[k];
        }
    }
    (lo, hi)
}

/// One-level 2-D decomposition of a real plane (rows = y, columns = x).
pub fn dwt1_plane(plane: &Array2<f64>) -> Result<Subbands> {
    let (rows, cols) = plane.dim();
    if rows < 8 || cols < 8 {
        return Err(Error::ImageTooSmall(format!(
            "DWT needs at least 8x8, got {cols}x{rows}"
        )));
    }
    let (lo_x, hi_x) = analyze_axis(plane, Axis(1));
    let (l, v) = analyze_axis(&lo_x, Axis(0));
    let (h, d) = analyze_axis(&hi_x, Axis(0));
    Ok(Subbands { l, h, v, d })
}

pub fn dwt1(img: &GrayImage) -> Result<Subbands> {
    dwt1_plane(&img.to_plane())
}

fn synthesize_axis(lo: &Array2<f64>, hi: &Array2<f64>, axis: Axis) -> Array2<f64> {
    let (rows, cols) = lo.dim();
    let shape = if axis == Axis(1) {
        (rows, cols * 2)
    } else {
        (rows * 2, cols)
    };
    let n = if axis == Axis(1) { shape.1 } else { shape.0 };
    let mut out = Array2::zeros(shape);
    for (i, (a, d)) in lo.lanes(axis).into_iter().zip(hi.lanes(axis)).enumerate() {
        let mut buf = vec![0.0; n];
        for k in 0..n / 2 {
            for j in 0..8 {
                buf[(2 * k + j) % n] += a[k] * DB4_LOW[j] + d[k] * DB4_HIGH[j];
            }
        }
        for (m, val) in buf.into_iter().enumerate() {
            let idx = if axis == Axis(1) { (i, m) } else { (m, i) };
            out[idx] = val;
        }
    }
    out
}

/// Inverse of [`dwt1_plane`] for even-sized inputs.
pub fn idwt1_plane(bands: &Subbands) -> Array2<f64> {
    let lo_x = synthesize_axis(&bands.l, &bands.v, Axis(0));
    let hi_x = synthesize_axis(&bands.h, &bands.d, Axis(0));
    synthesize_axis(&lo_x, &hi_x, Axis(1))
}

pub fn pyramid_plane(plane: &Array2<f64>, n: usize) -> Result<Pyramid> {
    if n == 0 {
        return Err(Error::InvalidParameter("pyramid depth must be >= 1".into()));
    }
    let (mut rows, mut cols) = plane.dim();
    for level in 1..=n {
        if rows < 8 || cols < 8 {
            return Err(Error::ImageTooSmall(format!(
                "{}x{} input cannot support {n} pyramid levels (level {level} input is {cols}x{rows})",
                plane.dim().1,
                plane.dim().0
            )));
        }
        rows = rows.div_ceil(2);
        cols = cols.div_ceil(2);
    }
    let mut levels: Vec<Subbands> = Vec::with_capacity(n);
    let mut current = dwt1_plane(plane)?;
    for _ in 1..n {
        let next = dwt1_plane(&current.l)?;
        levels.push(current);
        current = next;
    }
    levels.push(current);
    Ok(Pyramid { levels })
}

pub fn pyramid(img: &GrayImage, n: usize) -> Result<Pyramid> {
    pyramid_plane(&img.to_plane(), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    fn noise_plane(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
        let mut rng = seeded(seed);
        Array2::from_shape_fn((rows, cols), |_| rng.random_range(0.0..255.0))
    }

    #[test]
    fn taps_are_orthonormal() {
        let sum_lo: f64 = DB4_LOW.iter().sum();
        let sum_hi: f64 = DB4_HIGH.iter().sum();
        let norm_lo: f64 = DB4_LOW.iter().map(|t| t * t).sum();
        let norm_hi: f64 = DB4_HIGH.iter().map(|t| t * t).sum();
        assert!((sum_lo - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(sum_hi.abs() < 1e-12);
        assert!((norm_lo - 1.0).abs() < 1e-12);
        assert!((norm_hi - 1.0).abs() < 1e-12);
        for j in 0..8 {
            let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
            assert_eq!(DB4_HIGH[j], sign * DB4_LOW[7 - j]);
        }
        // even-shift orthogonality of the low-pass filter
        for s in 1..4 {
            let dot: f64 = (0..8 - 2 * s).map(|j| DB4_LOW[j] * DB4_LOW[j + 2 * s]).sum();
            assert!(dot.abs() < 1e-12, "shift {s}: {dot}");
        }
    }

    #[test]
    fn constant_input() {
        let img = GrayImage::filled(32, 24, 77);
        let b = dwt1(&img).unwrap();
        assert_eq!(b.dim(), (12, 16));
        for band in [&b.h, &b.v, &b.d] {
            assert!(band.iter().all(|v| v.abs() <= 1e-9));
        }
        assert!(b.l.iter().all(|v| (v - 154.0).abs() <= 1e-9));
    }

    #[test]
    fn energy_and_reconstruction() {
        let x = noise_plane(40, 64, 5);
        let b = dwt1_plane(&x).unwrap();
        let e_in: f64 = x.iter().map(|v| v * v).sum();
        let e_out: f64 = [&b.l, &b.h, &b.v, &b.d]
            .iter()
            .flat_map(|m| m.iter())
            .map(|v| v * v)
            .sum();
        assert!(((e_out - e_in) / e_in).abs() < 1e-9);
        let back = idwt1_plane(&b);
        let err = (&back - &x).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(err < 1e-8, "max err {err}");
    }

    #[test]
    fn impulse_maps_to_tap_products() {
        let img = GrayImage::from_fn(32, 32, |x, y| if (x, y) == (8, 8) { 1 } else { 0 });
        let b = dwt1(&img).unwrap();
        // direct correlation oracle: band[ky][kx] = sum_{x,y} fy[y-2ky] fx[x-2kx] img[y][x]
        let tap = |f: &[f64; 8], pos: usize, k: usize| -> f64 {
            let j = (pos + 32 - 2 * k) % 32;
            if j < 8 {
                f[j]
            } else {
                0.0
            }
        };
        for ky in 0..16 {
            for kx in 0..16 {
                let l = tap(&DB4_LOW, 8, ky) * tap(&DB4_LOW, 8, kx);
                let h = tap(&DB4_LOW, 8, ky) * tap(&DB4_HIGH, 8, kx);
                let v = tap(&DB4_HIGH, 8, ky) * tap(&DB4_LOW, 8, kx);
                let d = tap(&DB4_HIGH, 8, ky) * tap(&DB4_HIGH, 8, kx);
                assert!((b.l[[ky, kx]] - l).abs() < 1e-15);
                assert!((b.h[[ky, kx]] - h).abs() < 1e-15);
                assert!((b.v[[ky, kx]] - v).abs() < 1e-15);
                assert!((b.d[[ky, kx]] - d).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn too_small() {
        assert!(dwt1(&GrayImage::filled(7, 16, 0)).is_err());
        assert!(pyramid(&GrayImage::filled(32, 32, 0), 4).is_err());
        assert!(pyramid(&GrayImage::filled(64, 64, 0), 4).is_ok());
    }

    #[test]
    fn odd_sizes_use_ceil() {
        let x = noise_plane(17, 21, 2);
        let b = dwt1_plane(&x).unwrap();
        assert_eq!(b.dim(), (9, 11));
        assert!(b.l.iter().chain(b.d.iter()).all(|v| v.is_finite()));
    }

    #[test]
    fn pyramid_levels() {
        let img = GrayImage::from_fn(256, 256, |x, y| ((x * 7 + y * 3) % 251) as u8);
        let p = pyramid(&img, 4).unwrap();
        assert_eq!(p.depth(), 4);
        assert_eq!(p.level(4).dim(), (16, 16));
        assert_eq!(p.level(1), &dwt1(&img).unwrap());
        assert_eq!(p.level(2), &dwt1_plane(&p.level(1).l).unwrap());

        let one = pyramid(&img, 1).unwrap();
        assert_eq!(one.levels, vec![dwt1(&img).unwrap()]);

        let flat = pyramid(&GrayImage::filled(128, 128, 90), 4).unwrap();
        for lv in &flat.levels {
            for band in [&lv.h, &lv.v, &lv.d] {
                assert!(band.iter().all(|v| v.abs() <= 1e-9));
            }
        }
    }
}
