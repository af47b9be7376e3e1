//! Built-in embedders used to produce stego samples.
//!
//! Draw order is fixed: a Fisher-Yates shuffle of all pixel indices, then
//! for each selected pixel one message bit and (LSB matching only, on
//! mismatch) one direction bit.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::GrayImage;
use crate::error::{Error, Result};
use crate::rng::{seeded, StegRng};

fn check_rate(rate: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidParameter(format!(
            "embedding rate {rate} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Seeded selection of `round(rate * n)` distinct indices out of `n`.
pub(crate) fn select_indices(rng: &mut StegRng, n: usize, rate: f64) -> Vec<usize> {
    let k = (rate * n as f64).round() as usize;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx.truncate(k.min(n));
    idx
}

/// LSB matching (±1 embedding).
pub fn embed_lsb_match(img: &GrayImage, rate: f64, seed: u64) -> Result<GrayImage> {
    check_rate(rate)?;
    let mut rng = seeded(seed);
    let mut out = img.clone();
    let sel = select_indices(&mut rng, img.len(), rate);
    let px = out.pixels_mut();
    for i in sel {
        let bit = rng.random::<bool>() as u8;
        let p = px[i];
        if p & 1 == bit {
            continue;
        }
        let up = rng.random::<bool>();
        px[i] = match p {
            0 => 1,
            255 => 254,
            _ if up => p + 1,
            _ => p - 1,
        };
    }
    Ok(out)
}

/// LSB replacement: selected pixels get bit 0 overwritten by the message bit.
pub fn embed_lsb_replace(img: &GrayImage, rate: f64, seed: u64) -> Result<GrayImage> {
    check_rate(rate)?;
    let mut rng = seeded(seed);
    let mut out = img.clone();
    let sel = select_indices(&mut rng, img.len(), rate);
    let px = out.pixels_mut();
    for i in sel {
        let bit = rng.random::<bool>() as u8;
        px[i] = (px[i] & !1) | bit;
    }
    Ok(out)
}

/// Additive Gaussian spread-spectrum style noise of strength `alpha`.
pub fn embed_additive(img: &GrayImage, alpha: f64, seed: u64) -> Result<GrayImage> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "additive strength {alpha} must be finite and >= 0"
        )));
    }
    let mut rng = seeded(seed);
    let mut out = img.clone();
    for p in out.pixels_mut() {
        let n: f64 = rng.sample(StandardNormal);
        *p = (f64::from(*p) + alpha * n).round().clamp(0.0, 255.0) as u8;
    }
    Ok(out)
}
