//! Memetic feature selection: a genetic algorithm over feature masks whose
//! best individual is refined each generation by Markov-blanket Add/Del
//! local search (Lamarckian write-back).
//!
//! Feature relevance is symmetrical uncertainty (SU) on equal-frequency
//! discretized features. Fitness is the mean stratified cross-validation
//! accuracy of a linear classifier on the selected columns.

mod chromosome;
mod fitness;
mod su;

pub use chromosome::{op_add, op_del, Chromosome};
pub use fitness::FitnessEvaluator;
pub use su::{discretize, in_approx_markov_blanket, sym_uncertainty, DiscreteDataset, SuTable};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::ClassifierConfig;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MbegaConfig {
    pub pop_size: usize,
    pub max_generations: usize,
    pub stall_limit: usize,
    pub crossover_prob: f64,
    /// `None` means `1 / L`.
    pub mutation_prob_per_bit: Option<f64>,
    /// `None` means `min(L^2, 50)`.
    pub local_search_cap: Option<usize>,
    /// Upper bound on the Add and Del repeat counts, further capped at `L - 1`.
    pub add_del_max: usize,
    pub fitness_folds: usize,
    pub tie_epsilon: f64,
    pub seed: u64,
    pub classifier: ClassifierConfig,
    pub su_bins: usize,
}

impl Default for MbegaConfig {
    fn default() -> Self {
        Self {
            pop_size: 50,
            max_generations: 100,
            stall_limit: 20,
            crossover_prob: 0.6,
            mutation_prob_per_bit: None,
            local_search_cap: None,
            add_del_max: 10,
            fitness_folds: 3,
            tie_epsilon: 1e-4,
            seed: 0,
            classifier: ClassifierConfig::default(),
            su_bins: 10,
        }
    }
}

impl MbegaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.pop_size < 4 || self.pop_size % 2 != 0 {
            return bad(format!("pop_size {} must be even and >= 4", self.pop_size));
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return bad(format!("crossover_prob {} outside [0,1]", self.crossover_prob));
        }
        if let Some(p) = self.mutation_prob_per_bit {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("mutation_prob_per_bit {p} outside [0,1]"));
            }
        }
        if self.max_generations == 0 || self.stall_limit == 0 || self.add_del_max == 0 {
            return bad("max_generations, stall_limit and add_del_max must be >= 1".into());
        }
        if self.local_search_cap == Some(0) {
            return bad("local_search_cap must be >= 1".into());
        }
        if self.fitness_folds < 2 {
            return bad(format!("fitness_folds {} must be >= 2", self.fitness_folds));
        }
        if self.su_bins < 2 {
            return bad(format!("su_bins {} must be >= 2", self.su_bins));
        }
        if !(self.tie_epsilon >= 0.0 && self.tie_epsilon.is_finite()) {
            return bad(format!("tie_epsilon {} must be finite and >= 0", self.tie_epsilon));
        }
        self.classifier.validate()
    }

    pub fn mutation_rate(&self, l: usize) -> f64 {
        self.mutation_prob_per_bit.unwrap_or(1.0 / l as f64)
    }

    pub fn ls_cap(&self, l: usize) -> usize {
        self.local_search_cap.unwrap_or((l * l).min(50))
    }

    /// Classifier used for fitness, with its own derived seed.
    pub fn fitness_classifier(&self) -> ClassifierConfig {
        ClassifierConfig {
            seed: derive_seed(self.seed, 1),
            ..self.classifier.clone()
        }
    }

    pub fn fold_seed(&self) -> u64 {
        derive_seed(self.seed, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selected: Vec<String>,
    pub best_mask: Vec<bool>,
    pub fitness: f64,
    pub generations: usize,
    pub evaluations: usize,
    /// Running best fitness after each generation.
    pub history: Vec<f64>,
    pub seed: u64,
}

impl SelectionResult {
    pub fn selected_indices(&self) -> Vec<usize> {
        (0..self.best_mask.len()).filter(|&j| self.best_mask[j]).collect()
    }
}

/// Fitness of `c` under `cfg`, cached on the chromosome.
pub fn fitness(c: &mut Chromosome, data: &Dataset, cfg: &MbegaConfig) -> Result<f64> {
    let ev = FitnessEvaluator::new(data, cfg.fitness_folds, cfg.fitness_classifier(), cfg.fold_seed())?;
    ev.evaluate(c)
}

/// First-improvement Add/Del search around `elite` over unique `(a, d)`
/// pairs. Returns the first candidate that beats `elite`, or `elite`.
pub fn local_search(
    elite: &Chromosome,
    ev: &FitnessEvaluator<'_>,
    su: &SuTable,
    cfg: &MbegaConfig,
    rng: &mut impl Rng,
) -> Result<Chromosome> {
    if elite.fitness.is_none() {
        return Err(Error::InvalidParameter(
            "local search needs an evaluated elite".into(),
        ));
    }
    let l = elite.mask.len();
    let m = l.saturating_sub(1).min(cfg.add_del_max);
    let mut pairs: Vec<(usize, usize)> = (1..=m)
        .flat_map(|a| (1..=m).map(move |d| (a, d)))
        .collect();
    pairs.shuffle(rng);
    pairs.truncate(cfg.ls_cap(l));
    for (a, d) in pairs {
        let mut cand = elite.clone();
        for _ in 0..a {
            let (next, applied) = op_add(&cand, su, rng);
            if !applied {
                break;
            }
            cand = next;
        }
        for _ in 0..d {
            let (next, applied) = op_del(&cand, su, rng);
            if !applied {
                break;
            }
            cand = next;
        }
        cand.fitness = None;
        ev.evaluate(&mut cand)?;
        if cand.better_than(elite, cfg.tie_epsilon) {
            return Ok(cand);
        }
    }
    Ok(elite.clone())
}

fn evaluate_population(pop: &mut [Chromosome], ev: &FitnessEvaluator<'_>) -> Result<()> {
    let pending: Vec<usize> = (0..pop.len()).filter(|&i| pop[i].fitness.is_none()).collect();
    let scores: Vec<Result<f64>> = pending.par_iter().map(|&i| ev.score(&pop[i].mask)).collect();
    for (i, s) in pending.into_iter().zip(scores) {
        pop[i].fitness = Some(s?);
    }
    Ok(())
}

fn best_index(pop: &[Chromosome], eps: f64) -> usize {
    let mut best = 0;
    for i in 1..pop.len() {
        if pop[i].better_than(&pop[best], eps) {
            best = i;
        }
    }
    best
}

fn tournament<'p>(pop: &'p [Chromosome], eps: f64, rng: &mut impl Rng) -> &'p Chromosome {
    let a = &pop[rng.random_range(0..pop.len())];
    let b = &pop[rng.random_range(0..pop.len())];
    if b.better_than(a, eps) {
        b
    } else {
        a
    }
}

fn breed(
    p1: &Chromosome,
    p2: &Chromosome,
    cfg: &MbegaConfig,
    rng: &mut impl Rng,
) -> (Chromosome, Chromosome) {
    let l = p1.mask.len();
    let (mut c1, mut c2) = (p1.clone(), p2.clone());
    if rng.random::<f64>() < cfg.crossover_prob {
        for j in 0..l {
            if rng.random::<bool>() {
                std::mem::swap(&mut c1.mask[j], &mut c2.mask[j]);
            }
        }
    }
    let pm = cfg.mutation_rate(l);
    for c in [&mut c1, &mut c2] {
        for j in 0..l {
            if rng.random::<f64>() < pm {
                c.mask[j] = !c.mask[j];
            }
        }
    }
    // children identical to a parent keep its evaluated fitness
    for c in [&mut c1, &mut c2] {
        c.fitness = [p1, p2]
            .into_iter()
            .find(|p| p.mask == c.mask)
            .and_then(|p| p.fitness);
    }
    (c1, c2)
}

pub fn run_mbega(data: &Dataset, cfg: &MbegaConfig) -> Result<SelectionResult> {
    data.validate_for_selection()?;
    cfg.validate()?;
    let l = data.n_features();
    let ev = FitnessEvaluator::new(data, cfg.fitness_folds, cfg.fitness_classifier(), cfg.fold_seed())?;
    let su = SuTable::new(data, cfg.su_bins)?;
    let mut rng = seeded(derive_seed(cfg.seed, 2));
    let eps = cfg.tie_epsilon;

    let mut pop: Vec<Chromosome> = (0..cfg.pop_size)
        .map(|_| Chromosome::new((0..l).map(|_| rng.random::<bool>()).collect()))
        .collect();
    let mut elite: Option<Chromosome> = None;
    let mut history = Vec::new();
    let mut stall = 0;
    let mut generations = 0;

    while generations < cfg.max_generations {
        generations += 1;
        evaluate_population(&mut pop, &ev)?;
        let bi = best_index(&pop, eps);
        pop[bi] = local_search(&pop[bi], &ev, &su, cfg, &mut rng)?;
        let bi = best_index(&pop, eps);
        let gen_best = pop[bi].clone();

        match &elite {
            Some(e) if !gen_best.better_than(e, eps) => stall += 1,
            _ => {
                elite = Some(gen_best);
                stall = 0;
            }
        }
        let e = elite.as_ref().expect("elite set in first generation");
        let prev = history.last().copied().unwrap_or(f64::NEG_INFINITY);
        history.push(prev.max(e.fitness_or_min()));

        if stall >= cfg.stall_limit || generations == cfg.max_generations {
            break;
        }

        let mut next = Vec::with_capacity(cfg.pop_size);
        next.push(e.clone());
        while next.len() < cfg.pop_size {
            let p1 = tournament(&pop, eps, &mut rng);
            let p2 = tournament(&pop, eps, &mut rng);
            let (c1, c2) = breed(p1, p2, cfg, &mut rng);
            next.push(c1);
            if next.len() < cfg.pop_size {
                next.push(c2);
            }
        }
        pop = next;
    }

    let best = elite.expect("at least one generation runs");
    Ok(SelectionResult {
        selected: best
            .selected()
            .into_iter()
            .map(|j| data.names[j].clone())
            .collect(),
        fitness: best.fitness_or_min(),
        best_mask: best.mask,
        generations,
        evaluations: ev.evaluations(),
        history,
        seed: cfg.seed,
    })
}
