//! Classical sampling backend: Metropolis simulated annealing, sample decoding
//! with chain-majority voting, and SAT/MaxSAT verification.

use std::collections::{BTreeMap, HashMap};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::frontend::{Clause, CnfProblem};
use crate::ising::IsingModel;
use crate::placeroute::DecodeMap;
use crate::{Error, Result};

/// Annealing schedule: geometric inverse temperature over the sweeps.
#[derive(Debug, Clone, Copy)]
pub struct Schedule {
    pub beta_start: f64,
    pub beta_end: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { beta_start: 0.1, beta_end: 10.0 }
    }
}

/// One distinct sampled state.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Spins per qubit, aligned with [`SampleSet::order`].
    pub spins: Vec<i8>,
    pub energy: f64,
    pub occurrences: u32,
}

/// A set of annealing samples over a model's active qubits.
#[derive(Debug, Clone)]
pub struct SampleSet {
    /// Qubit per spin position, ascending.
    pub order: Vec<u32>,
    /// Distinct states, lowest energy first.
    pub samples: Vec<Sample>,
    pub seed: u64,
}

impl SampleSet {
    pub fn best_energy(&self) -> Option<f64> {
        self.samples.first().map(|s| s.energy)
    }

    /// Spin of a qubit in a given sample (qubits outside `order` carry no
    /// coefficient; report +1).
    pub fn spin(&self, sample: &Sample, q: u32) -> i8 {
        match self.order.binary_search(&q) {
            Ok(i) => sample.spins[i],
            Err(_) => 1,
        }
    }
}

/// Metropolis single-spin-flip simulated annealing: `num_samples` independent
/// restarts of `sweeps` full passes each, deterministic given the seed
/// (per-sample RNGs are seeded with `seed ⊕ index`). Samples run in parallel.
pub fn anneal(
    model: &IsingModel,
    num_samples: usize,
    sweeps: usize,
    schedule: Schedule,
    seed: u64,
) -> Result<SampleSet> {
    if num_samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let order: Vec<u32> = model.active_qubits().into_iter().collect();
    let fm = model.float_view(&order);
    let n = order.len();
    let runs: Vec<Vec<i8>> = (0..num_samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ s as u64);
            let mut spins: Vec<i8> = (0..n).map(|_| if rng.gen() { 1 } else { -1 }).collect();
            for sweep in 0..sweeps {
                let frac = if sweeps > 1 { sweep as f64 / (sweeps - 1) as f64 } else { 1.0 };
                let beta = schedule.beta_start * (schedule.beta_end / schedule.beta_start).powf(frac);
                for i in 0..n {
                    let delta = fm.flip_delta(&spins, i);
                    if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                        spins[i] = -spins[i];
                    }
                }
            }
            spins
        })
        .collect();
    let mut distinct: HashMap<Vec<i8>, u32> = HashMap::new();
    for spins in runs {
        *distinct.entry(spins).or_default() += 1;
    }
    let mut samples: Vec<Sample> = distinct
        .into_iter()
        .map(|(spins, occurrences)| Sample {
            energy: fm.energy(&spins),
            spins,
            occurrences,
        })
        .collect();
    samples.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.spins.cmp(&b.spins)));
    Ok(SampleSet { order, samples, seed })
}

/// One decoded sample: the Boolean assignment plus chain-break accounting.
#[derive(Debug, Clone)]
pub struct DecodedSample {
    pub assignment: BTreeMap<u32, bool>,
    pub energy: f64,
    pub occurrences: u32,
    /// Chains whose member spins disagreed in this sample.
    pub broken_chains: Vec<u32>,
}

/// Decoding output: per-sample assignments and per-chain break rates.
#[derive(Debug, Clone)]
pub struct DecodeResult {
    pub samples: Vec<DecodedSample>,
    /// Occurrence-weighted fraction of samples in which each chain broke.
    pub break_rate: BTreeMap<u32, f64>,
}

/// Decode samples: per chain, majority vote over member spins (tie → the spin
/// of the lowest-index qubit), negation flags applied, ancillas dropped.
pub fn decode(set: &SampleSet, map: &DecodeMap) -> DecodeResult {
    let mut breaks: BTreeMap<u32, u64> = map.chains.keys().map(|&v| (v, 0)).collect();
    let mut total = 0u64;
    let samples = set
        .samples
        .iter()
        .map(|s| {
            total += u64::from(s.occurrences);
            let mut assignment = BTreeMap::new();
            let mut broken = Vec::new();
            for (&v, chain) in &map.chains {
                let up = chain.iter().filter(|&&q| set.spin(s, q) == 1).count();
                let down = chain.len() - up;
                if up > 0 && down > 0 {
                    broken.push(v);
                    *breaks.get_mut(&v).unwrap() += u64::from(s.occurrences);
                }
                let spin = match up.cmp(&down) {
                    std::cmp::Ordering::Greater => 1,
                    std::cmp::Ordering::Less => -1,
                    std::cmp::Ordering::Equal => set.spin(s, *chain.iter().min().unwrap()),
                };
                let mut value = spin == 1;
                if map.negated.get(&v).copied().unwrap_or(false) {
                    value = !value;
                }
                assignment.insert(v, value);
            }
            DecodedSample {
                assignment,
                energy: s.energy,
                occurrences: s.occurrences,
                broken_chains: broken,
            }
        })
        .collect();
    let break_rate = breaks
        .into_iter()
        .map(|(v, b)| (v, if total == 0 { 0.0 } else { b as f64 / total as f64 }))
        .collect();
    DecodeResult { samples, break_rate }
}

fn clause_satisfied(clause: &Clause, assignment: &BTreeMap<u32, bool>) -> bool {
    clause.lits.iter().any(|&l| {
        let v = assignment.get(&(l.unsigned_abs())).copied().unwrap_or(false);
        if l > 0 { v } else { !v }
    })
}

/// Does the assignment satisfy every (hard) clause?
pub fn check_sat(assignment: &BTreeMap<u32, bool>, problem: &CnfProblem) -> bool {
    problem.hard_clauses().all(|c| clause_satisfied(c, assignment))
}

/// Total violated soft weight, or the hard-violation marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxSatCost {
    HardViolation,
    Cost(u64),
}

pub fn maxsat_cost(assignment: &BTreeMap<u32, bool>, problem: &CnfProblem) -> MaxSatCost {
    if !check_sat(assignment, problem) {
        return MaxSatCost::HardViolation;
    }
    let cost = problem
        .soft_clauses()
        .filter(|(c, _)| !clause_satisfied(c, assignment))
        .map(|(_, w)| w)
        .sum();
    MaxSatCost::Cost(cost)
}
