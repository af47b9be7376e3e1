//! Quantized 8x8 block DCT, the coefficient domain of the calibrated
//! DCT features.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagedata::GrayImage;

pub type Block = [[i32; 8]; 8];

/// ITU-T T.81 Annex K luminance quantization table (quality 50 baseline).
pub const ANNEX_K_LUMINANCE: [[u16; 8]; 8] = [
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QTable([[u16; 8]; 8]);

impl QTable {
    pub fn new(entries: [[u16; 8]; 8]) -> Result<Self> {
        if entries.iter().flatten().any(|&q| q < 1) {
            return Err(Error::InvalidParameter(
                "quantization table entries must be >= 1".into(),
            ));
        }
        Ok(Self(entries))
    }

    pub fn uniform(q: u16) -> Result<Self> {
        Self::new([[q; 8]; 8])
    }

    /// Annex K luminance table scaled with the IJG linear quality formula.
    pub fn with_quality(quality: u8) -> Result<Self> {
        if !(1..=100).contains(&quality) {
            return Err(Error::InvalidParameter(format!(
                "JPEG quality {quality} outside 1..=100"
            )));
        }
        let q = u32::from(quality);
        let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
        let mut t = [[0u16; 8]; 8];
        for (row, base) in t.iter_mut().zip(ANNEX_K_LUMINANCE.iter()) {
            for (e, &b) in row.iter_mut().zip(base.iter()) {
                *e = ((u32::from(b) * scale + 50) / 100).clamp(1, 255) as u16;
            }
        }
        Self::new(t)
    }

    pub fn get(&self, u: usize, v: usize) -> u16 {
        self.0[u][v]
    }

    pub fn entries(&self) -> &[[u16; 8]; 8] {
        &self.0
    }
}

impl Default for QTable {
    fn default() -> Self {
        Self::with_quality(75).expect("quality 75 is valid")
    }
}

/// Quantized coefficients for a `blocks_h x blocks_w` grid, blocks stored
/// row-major; `block[u][v]` is vertical frequency `u`, horizontal `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct DctCoeffs {
    pub blocks_h: usize,
    pub blocks_w: usize,
    pub blocks: Vec<Block>,
    pub qtable: QTable,
}

impl DctCoeffs {
    pub fn block(&self, by: usize, bx: usize) -> &Block {
        &self.blocks[by * self.blocks_w + bx]
    }
}

fn cos_table() -> &'static [[f64; 8]; 8] {
    static TABLE: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [[0.0; 8]; 8];
        for (u, row) in t.iter_mut().enumerate() {
            let c = if u == 0 { (0.125f64).sqrt() } else { 0.5 };
            for (x, e) in row.iter_mut().enumerate() {
                *e = c * ((2 * x + 1) as f64 * u as f64 * PI / 16.0).cos();
            }
        }
        t
    })
}

/// Orthonormal 2-D DCT-II of one block: `out[u][v]`, `input[y][x]`.
pub fn fdct8(input: &[[f64; 8]; 8]) -> [[f64; 8]; 8] {
    let c = cos_table();
    let mut tmp = [[0.0; 8]; 8];
    for y in 0..8 {
        for v in 0..8 {
            tmp[y][v] = (0..8).map(|x| c[v][x] * input[y][x]).sum();
        }
    }
    let mut out = [[0.0; 8]; 8];
    for u in 0..8 {
        for v in 0..8 {
            out[u][v] = (0..8).map(|y| c[u][y] * tmp[y][v]).sum();
        }
    }
    out
}

/// Inverse of [`fdct8`].
pub fn idct8(coeffs: &[[f64; 8]; 8]) -> [[f64; 8]; 8] {
    let c = cos_table();
    let mut tmp = [[0.0; 8]; 8];
    for u in 0..8 {
        for x in 0..8 {
            tmp[u][x] = (0..8).map(|v| c[v][x] * coeffs[u][v]).sum();
        }
    }
    let mut out = [[0.0; 8]; 8];
    for y in 0..8 {
        for x in 0..8 {
            out[y][x] = (0..8).map(|u| c[u][y] * tmp[u][x]).sum();
        }
    }
    out
}

/// Rounds half away from zero, treating values within 1e-9 of a half as
/// exact halves. Several modes have rational coefficients, so true ties
/// occur and must not depend on floating-point noise.
fn round_half_away(x: f64) -> f64 {
    let a = x.abs();
    if (a.fract() - 0.5).abs() < 1e-9 {
        x.signum() * (a.trunc() + 1.0)
    } else {
        x.round()
    }
}

/// Level shift, block DCT and quantization with round half away from zero.
/// Rows and columns past the last full 8x8 block are ignored.
pub fn block_dct_quant(img: &GrayImage, qtable: &QTable) -> Result<DctCoeffs> {
    let blocks_w = img.width() / 8;
    let blocks_h = img.height() / 8;
    if blocks_w == 0 || blocks_h == 0 {
        return Err(Error::ImageTooSmall(format!(
            "block DCT needs at least 8x8, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    let mut blocks = Vec::with_capacity(blocks_w * blocks_h);
    for by in 0..blocks_h {
        for bx in 0..blocks_w {
            let mut px = [[0.0; 8]; 8];
            for (y, row) in px.iter_mut().enumerate() {
                for (x, e) in row.iter_mut().enumerate() {
                    *e = f64::from(img.get(bx * 8 + x, by * 8 + y)) - 128.0;
                }
            }
            let f = fdct8(&px);
            let mut q = [[0i32; 8]; 8];
            for u in 0..8 {
                for v in 0..8 {
                    q[u][v] = round_half_away(f[u][v] / f64::from(qtable.get(u, v))) as i32;
                }
            }
            blocks.push(q);
        }
    }
    Ok(DctCoeffs {
        blocks_h,
        blocks_w,
        blocks,
        qtable: *qtable,
    })
}

/// Dequantize, inverse DCT, undo the level shift, round and clamp to 8 bits.
pub fn decode(coeffs: &DctCoeffs) -> GrayImage {
    let mut pixels = vec![0u8; coeffs.blocks_w * 8 * coeffs.blocks_h * 8];
    let width = coeffs.blocks_w * 8;
    for by in 0..coeffs.blocks_h {
        for bx in 0..coeffs.blocks_w {
            let q = coeffs.block(by, bx);
            let mut f = [[0.0; 8]; 8];
            for u in 0..8 {
                for v in 0..8 {
                    f[u][v] = f64::from(q[u][v]) * f64::from(coeffs.qtable.get(u, v));
                }
            }
            let px = idct8(&f);
            for y in 0..8 {
                for x in 0..8 {
                    pixels[(by * 8 + y) * width + bx * 8 + x] =
                        round_half_away(px[y][x] + 128.0).clamp(0.0, 255.0) as u8;
                }
            }
        }
    }
    GrayImage::new(width, coeffs.blocks_h * 8, pixels).expect("decoded dimensions")
}
