//! Higher-order wavelet statistics: per-band coefficient moments plus the
//! moments of the log error of a linear magnitude predictor.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::stats::four_moments;
use crate::dataset::FeatureVector;
use crate::error::{Error, Result};
use crate::imagedata::GrayImage;
use crate::transforms::{pyramid, Pyramid, Subbands};

const STAT_NAMES: [&str; 4] = ["mean", "var", "skew", "kurt"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    V,
    H,
    D,
}

impl Orientation {
    pub const ALL: [Orientation; 3] = [Orientation::V, Orientation::H, Orientation::D];

    fn tag(self) -> &'static str {
        match self {
            Orientation::V => "V",
            Orientation::H => "H",
            Orientation::D => "D",
        }
    }

    fn band(self, s: &Subbands) -> &Array2<f64> {
        match self {
            Orientation::V => &s.v,
            Orientation::H => &s.h,
            Orientation::D => &s.d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HosParams {
    pub n: usize,
    pub mag_threshold: f64,
    pub log_floor: f64,
}

impl Default for HosParams {
    fn default() -> Self {
        Self {
            n: 4,
            mag_threshold: 1.0,
            log_floor: 1e-6,
        }
    }
}

impl HosParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter("HOS depth n must be >= 2".into()));
        }
        if !(self.mag_threshold >= 0.0) {
            return Err(Error::InvalidParameter("mag_threshold must be >= 0".into()));
        }
        if !(self.log_floor > 0.0) {
            return Err(Error::InvalidParameter("log_floor must be > 0".into()));
        }
        Ok(())
    }

    pub fn feature_count(&self) -> usize {
        24 * (self.n - 1)
    }
}

/// One fitted magnitude predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorFit {
    /// Neighbor magnitudes, one row per included coefficient.
    pub q: Array2<f64>,
    /// Target magnitudes.
    pub v: Array1<f64>,
    pub w: Array1<f64>,
    /// `log2(V) - log2(|Qw|)`.
    pub e: Array1<f64>,
}

/// Moments of the V, H, D bands at scales `1..n`, scale-major.
pub fn subband_stats(p: &Pyramid, n: usize) -> Result<Vec<f64>> {
    if n < 2 || p.depth() < n {
        return Err(Error::InvalidParameter(format!(
            "pyramid of depth {} cannot provide {} scales",
            p.depth(),
            n.saturating_sub(1)
        )));
    }
    let mut out = Vec::with_capacity(12 * (n - 1));
    for i in 1..n {
        for o in Orientation::ALL {
            out.extend(four_moments(o.band(p.level(i)).iter().copied()));
        }
    }
    Ok(out)
}

/// Design matrix and targets for the band `orientation` at `scale` (1-based).
///
/// Rows come from interior positions whose magnitude reaches
/// `params.mag_threshold`; parent-scale neighbors use `(x/2, y/2)`.
pub fn build_predictor(
    p: &Pyramid,
    scale: usize,
    orientation: Orientation,
    params: &HosParams,
) -> Result<(Array2<f64>, Array1<f64>)> {
    let label = format!("{}{scale}", orientation.tag());
    if scale == 0 || scale + 1 > p.depth() {
        return Err(Error::InvalidParameter(format!(
            "band {label}: scale needs a parent level in a depth-{} pyramid",
            p.depth()
        )));
    }
    let cur = p.level(scale);
    let par = p.level(scale + 1);
    let own = orientation.band(cur);
    let (rows, cols) = own.dim();
    if rows < 4 || cols < 4 {
        return Err(Error::DegeneratePredictor {
            band: label,
            rows: 0,
        });
    }
    let (pr, pc) = par.dim();
    let parent = |band: &Array2<f64>, y: usize, x: usize| band[[(y / 2).min(pr - 1), (x / 2).min(pc - 1)]].abs();
    let (cross_same, cross_parent, own_parent): (&Array2<f64>, &Array2<f64>, &Array2<f64>) =
        match orientation {
            Orientation::V => (&cur.d, &par.d, &par.v),
            Orientation::H => (&cur.d, &par.d, &par.h),
            // as printed: w6 H_i(x, y), w7 V_{i+1}(x/2, y/2)
            Orientation::D => (&cur.h, &par.v, &par.d),
        };
    let mut data = Vec::new();
    let mut targets = Vec::new();
    for y in 1..rows - 1 {
        for x in 1..cols - 1 {
            let t = own[[y, x]].abs();
            if t < params.mag_threshold {
                continue;
            }
            targets.push(t);
            data.extend([
                own[[y, x - 1]].abs(),
                own[[y, x + 1]].abs(),
                own[[y - 1, x]].abs(),
                own[[y + 1, x]].abs(),
                parent(own_parent, y, x),
                cross_same[[y, x]].abs(),
                parent(cross_parent, y, x),
            ]);
        }
    }
    if targets.len() < 7 {
        return Err(Error::DegeneratePredictor {
            band: label,
            rows: targets.len(),
        });
    }
    let q = Array2::from_shape_vec((targets.len(), 7), data).expect("row-major design matrix");
    Ok((q, Array1::from(targets)))
}

/// Least-squares weights `argmin |V - Qw|^2` via ridge-stabilized normal
/// equations followed by iterative refinement against the exact system.
pub fn solve_weights(q: &Array2<f64>, v: &Array1<f64>) -> Result<Array1<f64>> {
    let (n, k) = q.dim();
    if v.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "design matrix has {n} rows, target has {}",
            v.len()
        )));
    }
    if k == 0 {
        return Err(Error::ShapeMismatch("design matrix has no columns".into()));
    }
    let qm = DMatrix::from_fn(n, k, |r, c| q[[r, c]]);
    let vm = DVector::from_iterator(n, v.iter().copied());
    let a = qm.transpose() * &qm;
    let b = qm.transpose() * &vm;
    let trace = a.trace();
    if !(trace > 0.0 && trace.is_finite()) {
        return Err(Error::RankDeficient);
    }
    let ridge = 1e-9 * trace / k as f64;
    let mut reg = a.clone();
    for i in 0..k {
        reg[(i, i)] += ridge;
    }
    let chol = reg.cholesky().ok_or(Error::RankDeficient)?;
    let mut w = chol.solve(&b);
    let mut res = &b - &a * &w;
    for _ in 0..4 {
        let step = chol.solve(&res);
        let cand = &w + step;
        let cand_res = &b - &a * &cand;
        if cand_res.norm() >= res.norm() {
            break;
        }
        w = cand;
        res = cand_res;
    }
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::RankDeficient);
    }
    Ok(Array1::from_iter(w.iter().copied()))
}

/// Moments of `log2(V) - log2(max(|Qw|, floor))`.
pub fn log_error_stats(
    v: &Array1<f64>,
    q: &Array2<f64>,
    w: &Array1<f64>,
    log_floor: f64,
) -> Result<[f64; 4]> {
    Ok(four_moments(log_errors(v, q, w, log_floor)?.iter().copied()))
}

fn log_errors(v: &Array1<f64>, q: &Array2<f64>, w: &Array1<f64>, log_floor: f64) -> Result<Array1<f64>> {
    if q.nrows() != v.len() || q.ncols() != w.len() {
        return Err(Error::ShapeMismatch(format!(
            "Q {:?}, V {}, w {}",
            q.dim(),
            v.len(),
            w.len()
        )));
    }
    let pred = q.dot(w);
    Ok(ndarray::Zip::from(v)
        .and(&pred)
        .map_collect(|&t, &p| t.log2() - p.abs().max(log_floor).log2()))
}

/// Builds, solves and scores one predictor.
pub fn fit_predictor(
    p: &Pyramid,
    scale: usize,
    orientation: Orientation,
    params: &HosParams,
) -> Result<PredictorFit> {
    let (q, v) = build_predictor(p, scale, orientation, params)?;
    let w = solve_weights(&q, &v)?;
    let e = log_errors(&v, &q, &w, params.log_floor)?;
    Ok(PredictorFit { q, v, w, e })
}

/// `24(n-1)` features: coefficient statistics, then predictor error
/// statistics, each scale-major in V, H, D order.
pub fn extract_hos(img: &GrayImage, params: &HosParams) -> Result<FeatureVector> {
    params.validate()?;
    let min_side = 8usize << params.n;
    if img.width() < min_side || img.height() < min_side {
        return Err(Error::ImageTooSmall(format!(
            "HOS with n={} needs at least {min_side}x{min_side}, got {}x{}",
            params.n,
            img.width(),
            img.height()
        )));
    }
    let pyr = pyramid(img, params.n)?;
    let coeff = subband_stats(&pyr, params.n)?;
    let mut fv = FeatureVector::with_capacity(params.feature_count());
    let mut k = 0;
    for i in 1..params.n {
        for o in Orientation::ALL {
            for s in STAT_NAMES {
                fv.push(format!("hos_c_{}{i}_{s}", o.tag()), coeff[k]);
                k += 1;
            }
        }
    }
    for i in 1..params.n {
        for o in Orientation::ALL {
            let stats = match fit_predictor(&pyr, i, o, params) {
                Ok(fit) => four_moments(fit.e.iter().copied()),
                Err(err @ (Error::DegeneratePredictor { .. } | Error::RankDeficient)) => {
                    fv.warn(format!("band {}{i}: {err}", o.tag()));
                    [0.0; 4]
                }
                Err(err) => return Err(err),
            };
            for (s, val) in STAT_NAMES.iter().zip(stats) {
                fv.push(format!("hos_e_{}{i}_{s}", o.tag()), val);
            }
        }
    }
    Ok(fv)
}
