//! Unnormalized 2-D DFT of real planes.

use std::f64::consts::PI;

use ndarray::{Array2, Axis};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::imagedata::GrayImage;

/// Magnitude and principal-value phase (in `(-pi, pi]`) of a 2-D DFT.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub magnitude: Array2<f64>,
    pub phase: Array2<f64>,
}

impl Spectrum {
    /// Bins with magnitude at or below `1e-10` of the peak are treated as
    /// exact zeros and get phase 0.
    pub fn from_complex(f: &Array2<Complex64>) -> Self {
        let magnitude = f.mapv(|c| c.norm());
        let peak = magnitude.iter().fold(0.0f64, |m, &v| m.max(v));
        let cut = peak * 1e-10;
        let phase = ndarray::Zip::from(f)
            .and(&magnitude)
            .map_collect(|c, &m| {
                if m <= cut {
                    0.0
                } else {
                    let p = c.im.atan2(c.re);
                    if p <= -PI {
                        p + 2.0 * PI
                    } else {
                        p
                    }
                }
            });
        Self { magnitude, phase }
    }
}

fn fft_axis(data: &mut Array2<Complex64>, axis: Axis, inverse: bool) {
    let n = data.len_of(axis);
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for mut lane in data.lanes_mut(axis) {
        for (b, v) in buf.iter_mut().zip(lane.iter()) {
            *b = *v;
        }
        fft.process(&mut buf);
        for (v, b) in lane.iter_mut().zip(buf.iter()) {
            *v = *b;
        }
    }
}

/// Forward 2-D DFT, `F[u][v] = sum_{y,x} p[y][x] e^{-2 pi i (u y / h + v x / w)}`.
pub fn dft2_plane(plane: &Array2<f64>) -> Array2<Complex64> {
    let mut data = plane.mapv(|v| Complex64::new(v, 0.0));
    fft_axis(&mut data, Axis(1), false);
    fft_axis(&mut data, Axis(0), false);
    data
}

/// Real part of the inverse DFT, normalized by `1/(w h)`.
pub fn idft2_real(spec: &Array2<Complex64>) -> Array2<f64> {
    let mut data = spec.clone();
    fft_axis(&mut data, Axis(1), true);
    fft_axis(&mut data, Axis(0), true);
    let n = data.len() as f64;
    data.mapv(|c| c.re / n)
}

pub fn dft2(img: &GrayImage) -> Spectrum {
    Spectrum::from_complex(&dft2_plane(&img.to_plane()))
}
