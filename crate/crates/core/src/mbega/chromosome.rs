use rand::Rng;
use serde::{Deserialize, Serialize};

use super::su::SuTable;

/// Feature-subset encoding: `mask[j]` selects feature `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    pub mask: Vec<bool>,
    pub fitness: Option<f64>,
}

impl Chromosome {
    pub fn new(mask: Vec<bool>) -> Self {
        Self { mask, fitness: None }
    }

    pub fn empty(len: usize) -> Self {
        Self::new(vec![false; len])
    }

    pub fn n_selected(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn selected(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&j| self.mask[j]).collect()
    }

    pub fn excluded(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&j| !self.mask[j]).collect()
    }

    /// Fitness of an unevaluated chromosome reads as `-inf`.
    pub fn fitness_or_min(&self) -> f64 {
        self.fitness.unwrap_or(f64::NEG_INFINITY)
    }

    /// Strictly preferable to `other`: fitter by more than `eps`, or tied
    /// within `eps` with fewer features.
    pub fn better_than(&self, other: &Chromosome, eps: f64) -> bool {
        let (a, b) = (self.fitness_or_min(), other.fitness_or_min());
        a > b + eps || ((a - b).abs() <= eps && self.n_selected() < other.n_selected())
    }
}

/// Linear ranking over candidates sorted by class SU (descending, ties to
/// the lower index): rank `r` (1-based) gets weight `n - r + 1`.
pub(crate) fn linear_rank_pick(candidates: &[usize], su: &SuTable, rng: &mut impl Rng) -> usize {
    let mut ranked = candidates.to_vec();
    ranked.sort_by(|&a, &b| su.class_su[b].total_cmp(&su.class_su[a]).then(a.cmp(&b)));
    let n = ranked.len();
    let mut u = rng.random_range(0..n * (n + 1) / 2);
    for (r, &j) in ranked.iter().enumerate() {
        let w = n - r;
        if u < w {
            return j;
        }
        u -= w;
    }
    unreachable!("ranking weights cover the draw")
}

/// Sets one excluded feature chosen by linear ranking on class SU.
/// Returns the chromosome unchanged and `false` when nothing is excluded.
pub fn op_add(c: &Chromosome, su: &SuTable, rng: &mut impl Rng) -> (Chromosome, bool) {
    let excluded = c.excluded();
    if excluded.is_empty() {
        return (c.clone(), false);
    }
    let j = linear_rank_pick(&excluded, su, rng);
    let mut out = c.clone();
    out.mask[j] = true;
    out.fitness = None;
    (out, true)
}

/// Picks a selected `X_i` by linear ranking and clears every other selected
/// feature in its approximate Markov blanket, or `X_i` itself if there is
/// none. Returns `false` on an empty selection.
pub fn op_del(c: &Chromosome, su: &SuTable, rng: &mut impl Rng) -> (Chromosome, bool) {
    let selected = c.selected();
    if selected.is_empty() {
        return (c.clone(), false);
    }
    let i = linear_rank_pick(&selected, su, rng);
    let mut out = c.clone();
    let mut removed = false;
    for &j in &selected {
        if j != i && su.in_blanket(i, j) {
            out.mask[j] = false;
            removed = true;
        }
    }
    if !removed {
        out.mask[i] = false;
    }
    out.fitness = None;
    (out, true)
}
