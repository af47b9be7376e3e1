use std::collections::HashMap;
use std::sync::OnceLock;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Per-feature integer levels after equal-frequency binning.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDataset {
    /// `columns[j][i]` is the level of sample `i` on feature `j`.
    pub columns: Vec<Vec<u32>>,
    pub levels: Vec<u32>,
    pub class: Vec<u32>,
}

/// Rank-based equal-frequency binning. Tied values share the level of
/// their first rank, `floor(rank * bins / N)`; levels are then renumbered
/// consecutively.
pub fn discretize(data: &Dataset, bins: usize) -> Result<DiscreteDataset> {
    if bins < 2 {
        return Err(Error::InvalidParameter(format!("bins must be >= 2, got {bins}")));
    }
    let n = data.n_samples();
    let mut columns = Vec::with_capacity(data.n_features());
    let mut levels = Vec::with_capacity(data.n_features());
    for col in data.x.columns() {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| col[a].total_cmp(&col[b]));
        let mut out = vec![0u32; n];
        let mut level = 0u32;
        let mut raw_prev = usize::MAX;
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && col[order[end]] == col[order[start]] {
                end += 1;
            }
            let raw = start * bins / n;
            if raw_prev != usize::MAX && raw != raw_prev {
                level += 1;
            }
            raw_prev = raw;
            for &i in &order[start..end] {
                out[i] = level;
            }
            start = end;
        }
        levels.push(if n == 0 { 0 } else { level + 1 });
        columns.push(out);
    }
    Ok(DiscreteDataset {
        columns,
        levels,
        class: data.y.iter().map(|&l| l as u32).collect(),
    })
}

fn entropy_of_counts(mut counts: Vec<usize>, n: usize) -> f64 {
    // sorted accumulation makes the sum independent of table orientation
    counts.sort_unstable();
    let n = n as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Symmetrical uncertainty `2 I(a;b) / (H(a) + H(b))` with base-2
/// entropies; 0 when both variables are constant.
pub fn sym_uncertainty(a: &[u32], b: &[u32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "SU over vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n == 0 {
        return Ok(0.0);
    }
    let mut ca: HashMap<u32, usize> = HashMap::new();
    let mut cb: HashMap<u32, usize> = HashMap::new();
    let mut cab: HashMap<(u32, u32), usize> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *ca.entry(x).or_default() += 1;
        *cb.entry(y).or_default() += 1;
        *cab.entry((x, y)).or_default() += 1;
    }
    let ha = entropy_of_counts(ca.into_values().collect(), n);
    let hb = entropy_of_counts(cb.into_values().collect(), n);
    let hab = entropy_of_counts(cab.into_values().collect(), n);
    let denom = ha + hb;
    if denom <= 0.0 {
        return Ok(0.0);
    }
    Ok((2.0 * (denom - hab) / denom).clamp(0.0, 1.0))
}

/// Class SU precomputed once; feature-feature SU memoized on first use.
#[derive(Debug)]
pub struct SuTable {
    pub disc: DiscreteDataset,
    pub class_su: Vec<f64>,
    pairs: Vec<OnceLock<f64>>,
}

impl SuTable {
    pub fn new(data: &Dataset, bins: usize) -> Result<Self> {
        let disc = discretize(data, bins)?;
        let class_su = disc
            .columns
            .iter()
            .map(|c| sym_uncertainty(c, &disc.class))
            .collect::<Result<Vec<_>>>()?;
        let l = disc.columns.len();
        Ok(Self {
            disc,
            class_su,
            pairs: (0..l * l).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn n_features(&self) -> usize {
        self.class_su.len()
    }

    pub fn pair(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        *self.pairs[a * self.n_features() + b].get_or_init(|| {
            sym_uncertainty(&self.disc.columns[a], &self.disc.columns[b])
                .expect("columns share the sample count")
        })
    }

    /// `j` lies in the approximate Markov blanket of `i`.
    pub fn in_blanket(&self, i: usize, j: usize) -> bool {
        self.class_su[i] >= self.class_su[j] && self.pair(i, j) >= self.class_su[j]
    }
}

pub fn in_approx_markov_blanket(i: usize, j: usize, su: &SuTable) -> bool {
    su.in_blanket(i, j)
}
