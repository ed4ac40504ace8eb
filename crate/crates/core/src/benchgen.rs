//! Benchmark generators: sgen-style SAT instances over shuffled cardinality
//! partitions (1-in-5 and 2-in-4 variants) and the biased/unbiased MaxSAT
//! constructions, plus the fixed non-exact 2-in-4 penalty cell.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::frontend::{Clause, CnfProblem};
use crate::penalty::PenaltyFunction;
use crate::rat::rint;
use crate::synth::Footprint;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Constraint instances
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    AtMostOneOfFive,
    AtLeastOneOfFive,
    ExactlyTwoOfFour,
    ExactlyOneOfFour,
    /// Single positive literal (the biased construction's soft units).
    UnitTrue,
}

impl ConstraintKind {
    pub fn name(&self) -> &'static str {
        match self {
            ConstraintKind::AtMostOneOfFive => "at-most-1-of-5",
            ConstraintKind::AtLeastOneOfFive => "at-least-1-of-5",
            ConstraintKind::ExactlyTwoOfFour => "exactly-2-of-4",
            ConstraintKind::ExactlyOneOfFour => "exactly-1-of-4",
            ConstraintKind::UnitTrue => "unit",
        }
    }

    /// Does the constraint hold given how many of its variables are true?
    pub fn holds(&self, true_count: usize) -> bool {
        match self {
            ConstraintKind::AtMostOneOfFive => true_count <= 1,
            ConstraintKind::AtLeastOneOfFive => true_count >= 1,
            ConstraintKind::ExactlyTwoOfFour => true_count == 2,
            ConstraintKind::ExactlyOneOfFour => true_count == 1,
            ConstraintKind::UnitTrue => true_count == 1,
        }
    }
}

/// One cardinality constraint over a variable tuple (1-based variables).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub vars: Vec<u32>,
    /// `None` for hard SAT constraints.
    pub weight: Option<u64>,
}

impl Constraint {
    pub fn satisfied(&self, assignment: &[bool]) -> bool {
        let t = self
            .vars
            .iter()
            .filter(|&&v| assignment[v as usize - 1])
            .count();
        self.kind.holds(t)
    }
}

/// A generated benchmark instance.
#[derive(Debug, Clone)]
pub struct ConstraintInstance {
    pub n_vars: usize,
    pub constraints: Vec<Constraint>,
    /// A satisfying assignment for the SAT variants.
    pub planted: Option<Vec<bool>>,
    /// `Some(true)` when the MaxSAT optimum profile was exhaustively checked,
    /// `Some(false)` when skipped (instance too large), `None` for SAT.
    pub profile_verified: Option<bool>,
}

impl ConstraintInstance {
    /// Constraint-level MaxSAT cost: sum of violated weights; `None` when a
    /// hard (unweighted) constraint is violated.
    pub fn cost(&self, assignment: &[bool]) -> Option<u64> {
        let mut cost = 0;
        for c in &self.constraints {
            if !c.satisfied(assignment) {
                match c.weight {
                    Some(w) => cost += w,
                    None => return None,
                }
            }
        }
        Some(cost)
    }

    /// CNF clauses of a single constraint.
    fn clauses_of(c: &Constraint) -> Vec<Vec<i32>> {
        let v: Vec<i32> = c.vars.iter().map(|&x| x as i32).collect();
        let pairs = |vs: &[i32], sign: i32| -> Vec<Vec<i32>> {
            let mut out = Vec::new();
            for i in 0..vs.len() {
                for j in (i + 1)..vs.len() {
                    out.push(vec![sign * vs[i], sign * vs[j]]);
                }
            }
            out
        };
        let triples = |vs: &[i32], sign: i32| -> Vec<Vec<i32>> {
            let mut out = Vec::new();
            for i in 0..vs.len() {
                for j in (i + 1)..vs.len() {
                    for k in (j + 1)..vs.len() {
                        out.push(vec![sign * vs[i], sign * vs[j], sign * vs[k]]);
                    }
                }
            }
            out
        };
        match c.kind {
            ConstraintKind::AtMostOneOfFive => pairs(&v, -1),
            ConstraintKind::AtLeastOneOfFive => vec![v],
            ConstraintKind::ExactlyTwoOfFour => {
                // At most 2 (no 3 all true) and at least 2 (no 3 all false).
                let mut out = triples(&v, -1);
                out.extend(triples(&v, 1));
                out
            }
            ConstraintKind::ExactlyOneOfFour => {
                let mut out = pairs(&v, -1);
                out.push(v);
                out
            }
            ConstraintKind::UnitTrue => vec![v],
        }
    }

    /// Plain CNF export (all constraints hard).
    pub fn to_cnf(&self) -> CnfProblem {
        let clauses: Vec<Clause> = self
            .constraints
            .iter()
            .flat_map(|c| Self::clauses_of(c).into_iter().map(|lits| Clause { lits, weight: None }))
            .collect();
        CnfProblem { n_vars: self.n_vars, clauses, top: None }
    }

    /// WCNF export. Each constraint's clauses carry the constraint weight;
    /// note the clause-level optimum can differ from the constraint-level one
    /// (a violated cardinality constraint may break several of its clauses) —
    /// [`ConstraintInstance::cost`] is the authoritative objective.
    pub fn to_wcnf(&self) -> CnfProblem {
        let mut clauses = Vec::new();
        let mut soft_total = 0u64;
        for c in &self.constraints {
            for lits in Self::clauses_of(c) {
                if let Some(w) = c.weight {
                    soft_total += w;
                }
                clauses.push(Clause { lits, weight: c.weight });
            }
        }
        let top = soft_total + 1;
        for cl in &mut clauses {
            if cl.weight.is_none() {
                cl.weight = Some(top);
            }
        }
        CnfProblem { n_vars: self.n_vars, clauses, top: Some(top) }
    }

    /// JSON sidecar with the generation parameters and planted solution.
    pub fn sidecar_json(&self, family: &str, seed: u64) -> Value {
        json!({
            "family": family,
            "n_vars": self.n_vars,
            "seed": seed,
            "planted": self.planted,
            "profile_verified": self.profile_verified,
            "constraints": self.constraints.iter().map(|c| json!({
                "kind": c.kind.name(),
                "vars": c.vars,
                "weight": c.weight,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Serialize to DIMACS CNF text.
pub fn dimacs_string(p: &CnfProblem) -> String {
    let mut out = format!("p cnf {} {}\n", p.n_vars, p.clauses.len());
    for c in &p.clauses {
        for l in &c.lits {
            out.push_str(&format!("{l} "));
        }
        out.push_str("0\n");
    }
    out
}

/// Serialize to classic WCNF text.
pub fn wcnf_string(p: &CnfProblem) -> String {
    let top = p.top.unwrap_or(1);
    let mut out = format!("p wcnf {} {} {}\n", p.n_vars, p.clauses.len(), top);
    for c in &p.clauses {
        out.push_str(&format!("{} ", c.weight.unwrap_or(top)));
        for l in &c.lits {
            out.push_str(&format!("{l} "));
        }
        out.push_str("0\n");
    }
    out
}

// ---------------------------------------------------------------------------
// sgen-style SAT
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SgenVariant {
    OneInFive,
    TwoInFour,
}

impl SgenVariant {
    pub fn name(&self) -> &'static str {
        match self {
            SgenVariant::OneInFive => "one-in-five",
            SgenVariant::TwoInFour => "two-in-four",
        }
    }

    fn group_size(&self) -> usize {
        match self {
            SgenVariant::OneInFive => 5,
            SgenVariant::TwoInFour => 4,
        }
    }

    fn true_per_group(&self) -> usize {
        match self {
            SgenVariant::OneInFive => 1,
            SgenVariant::TwoInFour => 2,
        }
    }
}

/// Variable pairs co-occurring in both partitions (the similarity measure).
fn similarity(a: &[Vec<u32>], b: &[Vec<u32>]) -> usize {
    let pairs = |p: &[Vec<u32>]| -> BTreeSet<(u32, u32)> {
        let mut s = BTreeSet::new();
        for g in p {
            for i in 0..g.len() {
                for j in (i + 1)..g.len() {
                    s.insert((g[i].min(g[j]), g[i].max(g[j])));
                }
            }
        }
        s
    };
    let pa = pairs(a);
    pairs(b).intersection(&pa).count()
}

/// A planted-compatible shuffled partition minimizing similarity with the
/// previous one over `retries` shuffles. Returns the partition and the
/// best-so-far similarity history (non-increasing by construction).
fn shuffled_partition(
    rng: &mut ChaCha8Rng,
    planted: &[bool],
    prev: &[Vec<u32>],
    group_size: usize,
    true_per_group: usize,
    retries: usize,
) -> (Vec<Vec<u32>>, Vec<usize>) {
    let true_vars: Vec<u32> = (1..=planted.len() as u32).filter(|&v| planted[v as usize - 1]).collect();
    let false_vars: Vec<u32> = (1..=planted.len() as u32).filter(|&v| !planted[v as usize - 1]).collect();
    let groups = planted.len() / group_size;
    let mut best: Option<(Vec<Vec<u32>>, usize)> = None;
    let mut history = Vec::new();
    for _ in 0..retries {
        let mut t = true_vars.clone();
        let mut f = false_vars.clone();
        t.shuffle(rng);
        f.shuffle(rng);
        let mut partition = Vec::with_capacity(groups);
        for g in 0..groups {
            let mut group: Vec<u32> = Vec::with_capacity(group_size);
            group.extend(&t[g * true_per_group..(g + 1) * true_per_group]);
            let fill = group_size - true_per_group;
            group.extend(&f[g * fill..(g + 1) * fill]);
            group.sort_unstable();
            partition.push(group);
        }
        let sim = similarity(prev, &partition);
        if best.as_ref().map(|(_, s)| sim < *s).unwrap_or(true) {
            best = Some((partition, sim));
        }
        history.push(best.as_ref().unwrap().1);
    }
    let (partition, _) = best.unwrap();
    (partition, history)
}

/// Three-partition construction shared by the SAT and MaxSAT families.
fn sgen_partitions(
    rng: &mut ChaCha8Rng,
    n: usize,
    variant: SgenVariant,
    layers: usize,
) -> (Vec<bool>, Vec<Vec<Vec<u32>>>) {
    let gs = variant.group_size();
    let tpg = variant.true_per_group();
    // Planted solution: the first partition is sequential; mark `tpg` random
    // members of each group true.
    let mut planted = vec![false; n];
    let first: Vec<Vec<u32>> = (0..n / gs)
        .map(|g| ((g * gs + 1) as u32..=((g + 1) * gs) as u32).collect())
        .collect();
    for group in &first {
        for &v in group.iter().choose_multiple(rng, tpg).iter() {
            planted[*v as usize - 1] = true;
        }
    }
    let mut partitions = vec![first];
    for _ in 1..layers {
        let prev = partitions.last().unwrap().clone();
        let (p, _) = shuffled_partition(rng, &planted, &prev, gs, tpg, 50);
        partitions.push(p);
    }
    (planted, partitions)
}

/// sgen-style satisfiable instance: three shuffled partitions with cardinality
/// constraints and a planted solution.
pub fn gen_sgen_sat(n: usize, variant: SgenVariant, seed: u64) -> Result<ConstraintInstance> {
    let gs = variant.group_size();
    if n == 0 || n % gs != 0 {
        return Err(Error::Domain(format!(
            "{} requires n divisible by {gs}, got {n}",
            variant.name()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (planted, partitions) = sgen_partitions(&mut rng, n, variant, 3);
    let mut constraints = Vec::new();
    for (layer, partition) in partitions.iter().enumerate() {
        for group in partition {
            let kind = match (variant, layer) {
                (SgenVariant::OneInFive, 0) => ConstraintKind::AtMostOneOfFive,
                (SgenVariant::OneInFive, _) => ConstraintKind::AtLeastOneOfFive,
                (SgenVariant::TwoInFour, _) => ConstraintKind::ExactlyTwoOfFour,
            };
            constraints.push(Constraint { kind, vars: group.clone(), weight: None });
        }
    }
    let inst = ConstraintInstance {
        n_vars: n,
        constraints,
        planted: Some(planted),
        profile_verified: None,
    };
    debug_assert_eq!(inst.cost(inst.planted.as_ref().unwrap()), Some(0));
    Ok(inst)
}

// ---------------------------------------------------------------------------
// MaxSAT constructions
// ---------------------------------------------------------------------------

/// Exhaustive optimum-profile statistics of a weighted instance (`n ≤ 24`).
struct Profile {
    optima: u64,
    /// Every optimum violates exactly one weight-3 constraint.
    one_heavy: bool,
    /// Every optimum violates at least `n/3` weight-1 constraints.
    enough_units: bool,
}

fn exhaustive_profile(inst: &ConstraintInstance) -> Profile {
    let n = inst.n_vars;
    assert!(n <= 24);
    let heavy: Vec<&Constraint> = inst.constraints.iter().filter(|c| c.weight == Some(3)).collect();
    let units: Vec<&Constraint> = inst.constraints.iter().filter(|c| c.weight == Some(1)).collect();
    let mut best = u64::MAX;
    let mut p = Profile { optima: 0, one_heavy: true, enough_units: true };
    let mut assignment = vec![false; n];
    for mask in 0u32..(1 << n) {
        for (i, a) in assignment.iter_mut().enumerate() {
            *a = mask >> i & 1 == 1;
        }
        let hv = heavy.iter().filter(|c| !c.satisfied(&assignment)).count() as u64;
        let uv = units.iter().filter(|c| !c.satisfied(&assignment)).count() as u64;
        let cost = 3 * hv + uv;
        if cost < best {
            best = cost;
            p = Profile { optima: 0, one_heavy: true, enough_units: true };
        }
        if cost == best {
            p.optima += 1;
            p.one_heavy &= hv == 1;
            p.enough_units &= uv * 3 >= n as u64;
        }
    }
    p
}

/// Biased MaxSAT family: two 2-in-4 partitions with one constraint flipped to
/// 1-in-4 (unsatisfiable by a counting argument), constraint weight 3, plus a
/// weight-1 positive unit per variable. The optimum profile (exactly one
/// violated weight-3, ≥ n/3 violated units, ≥ 200 optima) is enforced by
/// regeneration when `n ≤ 24` and recorded as unverified otherwise.
pub fn gen_maxsat_biased(n: usize, seed: u64, max_tries: usize) -> Result<ConstraintInstance> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::Domain(format!("biased MaxSAT requires n divisible by 4, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_tries.max(1) {
        let (_, partitions) = sgen_partitions(&mut rng, n, SgenVariant::TwoInFour, 2);
        let mut constraints: Vec<Constraint> = partitions
            .iter()
            .flatten()
            .map(|g| Constraint {
                kind: ConstraintKind::ExactlyTwoOfFour,
                vars: g.clone(),
                weight: Some(3),
            })
            .collect();
        let flip = rng.gen_range(0..constraints.len());
        constraints[flip].kind = ConstraintKind::ExactlyOneOfFour;
        for v in 1..=n as u32 {
            constraints.push(Constraint {
                kind: ConstraintKind::UnitTrue,
                vars: vec![v],
                weight: Some(1),
            });
        }
        let mut inst = ConstraintInstance {
            n_vars: n,
            constraints,
            planted: None,
            profile_verified: Some(false),
        };
        if n > 24 {
            return Ok(inst);
        }
        let p = exhaustive_profile(&inst);
        if p.one_heavy && p.enough_units && p.optima >= 200 {
            inst.profile_verified = Some(true);
            return Ok(inst);
        }
    }
    Err(Error::Generation(format!(
        "no biased instance with the required optimum profile in {max_tries} tries"
    )))
}

/// Unbiased MaxSAT family: the three-partition 2-in-4 construction with one
/// constraint flipped to 1-in-4 and exactly 5 constraints removed from one
/// other partition; all weights equal (1).
pub fn gen_maxsat_unbiased(n: usize, seed: u64) -> Result<ConstraintInstance> {
    if n == 0 || n % 4 != 0 {
        return Err(Error::Domain(format!("unbiased MaxSAT requires n divisible by 4, got {n}")));
    }
    let per_partition = n / 4;
    if per_partition < 5 {
        return Err(Error::Domain(format!(
            "removing 5 constraints needs ≥ 5 per partition (n ≥ 20), got {per_partition}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (_, partitions) = sgen_partitions(&mut rng, n, SgenVariant::TwoInFour, 3);
    // Flip one constraint in a random partition; remove 5 from another.
    let flip_part = rng.gen_range(0..3usize);
    let flip_idx = rng.gen_range(0..per_partition);
    let mut remove_part = rng.gen_range(0..3usize);
    while remove_part == flip_part {
        remove_part = rng.gen_range(0..3usize);
    }
    let removed: BTreeSet<usize> = (0..per_partition).choose_multiple(&mut rng, 5).into_iter().collect();
    let mut constraints = Vec::new();
    for (pi, partition) in partitions.iter().enumerate() {
        for (gi, group) in partition.iter().enumerate() {
            if pi == remove_part && removed.contains(&gi) {
                continue;
            }
            let kind = if pi == flip_part && gi == flip_idx {
                ConstraintKind::ExactlyOneOfFour
            } else {
                ConstraintKind::ExactlyTwoOfFour
            };
            constraints.push(Constraint { kind, vars: group.clone(), weight: Some(1) });
        }
    }
    Ok(ConstraintInstance {
        n_vars: n,
        constraints,
        planted: None,
        profile_verified: None,
    })
}

/// The fixed non-exact 2-in-4 penalty on a tile:
/// `P = 4 + x₁x₂ + x₁x₄ + x₂x₃ + x₃x₄ − x₁a₁ − x₂a₂ + x₃a₁ + x₄a₂`
/// with min-over-ancillas energy 0 / 2 / 8 as the true-count distance from 2
/// is 0 / 1 / 2. Layout: x₂,x₄,a₁ vertical (0,1,2); x₁,x₃,a₂ horizontal (4,5,6).
pub fn unbiased_2in4_cell() -> PenaltyFunction {
    let graph = Footprint::Tile.graph();
    let mut m = crate::ising::IsingModel::new(graph);
    m.offset = rint(4);
    let x = [4u32, 0, 5, 1]; // x₁..x₄
    let a = [2u32, 6]; // a₁, a₂
    m.add_coupling(x[0], x[1], rint(1)).unwrap();
    m.add_coupling(x[0], x[3], rint(1)).unwrap();
    m.add_coupling(x[1], x[2], rint(1)).unwrap();
    m.add_coupling(x[2], x[3], rint(1)).unwrap();
    m.add_coupling(x[0], a[0], rint(-1)).unwrap();
    m.add_coupling(x[1], a[1], rint(-1)).unwrap();
    m.add_coupling(x[2], a[0], rint(1)).unwrap();
    m.add_coupling(x[3], a[1], rint(1)).unwrap();
    PenaltyFunction {
        model: m,
        inputs: x.to_vec(),
        ancillas: a.to_vec(),
        gap: rint(2),
        exact: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::exactly_k_of_n;
    use crate::frontend::parse_dimacs;
    use crate::rat::rat_to_f64;
    use crate::sampler::check_sat;

    #[test]
    fn one_in_five_export_counts_and_planted() {
        let inst = gen_sgen_sat(40, SgenVariant::OneInFive, 7).unwrap();
        let cnf = inst.to_cnf();
        // 8 subsets × 10 binary clauses + 2 × 8 positive clauses.
        assert_eq!(cnf.clauses.iter().filter(|c| c.lits.len() == 2).count(), 80);
        assert_eq!(cnf.clauses.iter().filter(|c| c.lits.len() == 5).count(), 16);
        let planted = inst.planted.clone().unwrap();
        assert_eq!(inst.cost(&planted), Some(0));
        let assignment = planted
            .iter()
            .enumerate()
            .map(|(i, &b)| (i as u32 + 1, b))
            .collect();
        assert!(check_sat(&assignment, &cnf));
        // Round-trip through the text format.
        let reparsed = parse_dimacs(&dimacs_string(&cnf)).unwrap();
        assert_eq!(reparsed, cnf);
    }

    #[test]
    fn two_in_four_partitions_have_two_planted_true_each() {
        let inst = gen_sgen_sat(32, SgenVariant::TwoInFour, 3).unwrap();
        let planted = inst.planted.clone().unwrap();
        assert_eq!(inst.constraints.len(), 24); // 3 partitions × 8 subsets
        for c in &inst.constraints {
            assert_eq!(c.kind, ConstraintKind::ExactlyTwoOfFour);
            let t = c.vars.iter().filter(|&&v| planted[v as usize - 1]).count();
            assert_eq!(t, 2);
        }
        // Partitions cover the variables exactly.
        for chunk in inst.constraints.chunks(8) {
            let mut seen: Vec<u32> = chunk.iter().flat_map(|c| c.vars.clone()).collect();
            seen.sort_unstable();
            assert_eq!(seen, (1..=32).collect::<Vec<_>>());
        }
    }

    #[test]
    fn generators_are_byte_deterministic() {
        for seed in [0u64, 1, 99] {
            let a = gen_sgen_sat(20, SgenVariant::OneInFive, seed).unwrap();
            let b = gen_sgen_sat(20, SgenVariant::OneInFive, seed).unwrap();
            assert_eq!(dimacs_string(&a.to_cnf()), dimacs_string(&b.to_cnf()));
            let c = gen_maxsat_unbiased(20, seed).unwrap();
            let d = gen_maxsat_unbiased(20, seed).unwrap();
            assert_eq!(wcnf_string(&c.to_wcnf()), wcnf_string(&d.to_wcnf()));
        }
    }

    #[test]
    fn divisibility_is_enforced() {
        assert!(gen_sgen_sat(21, SgenVariant::OneInFive, 0).is_err());
        assert!(gen_sgen_sat(30, SgenVariant::TwoInFour, 0).is_err());
        assert!(gen_maxsat_biased(18, 0, 5).is_err());
        assert!(gen_maxsat_unbiased(16, 0).is_err()); // < 5 constraints per partition
    }

    #[test]
    fn similarity_history_is_non_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let planted: Vec<bool> = (0..20).map(|i| i % 5 == 0).collect();
        let prev: Vec<Vec<u32>> = (0..4).map(|g| (g * 5 + 1..=g * 5 + 5).collect()).collect();
        let (_, history) = shuffled_partition(&mut rng, &planted, &prev, 5, 1, 50);
        assert_eq!(history.len(), 50);
        assert!(history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn biased_instance_profile_holds_at_n20() {
        let inst = gen_maxsat_biased(20, 11, 50).unwrap();
        assert_eq!(inst.profile_verified, Some(true));
        // Weights are only 1 and 3.
        assert!(inst.constraints.iter().all(|c| matches!(c.weight, Some(1) | Some(3))));
        // UNSAT as pure SAT: the hard version has no satisfying assignment
        // (counting: one partition sums to n/2, the flipped one to n/2 − 1).
        let p = exhaustive_profile(&inst);
        assert!(p.one_heavy && p.enough_units && p.optima >= 200);
        let mut any_zero = false;
        let mut assignment = vec![false; 20];
        for mask in 0u32..(1 << 20) {
            for (i, a) in assignment.iter_mut().enumerate() {
                *a = mask >> i & 1 == 1;
            }
            if inst
                .constraints
                .iter()
                .filter(|c| c.weight == Some(3))
                .all(|c| c.satisfied(&assignment))
            {
                any_zero = true;
                break;
            }
        }
        assert!(!any_zero, "biased instance must be UNSAT as pure SAT");
    }

    #[test]
    fn unbiased_removes_exactly_five_and_uses_equal_weights() {
        let inst = gen_maxsat_unbiased(24, 4).unwrap();
        // 3 partitions × 6 subsets − 5 removed.
        assert_eq!(inst.constraints.len(), 13);
        assert!(inst.constraints.iter().all(|c| c.weight == Some(1)));
        assert_eq!(
            inst.constraints
                .iter()
                .filter(|c| c.kind == ConstraintKind::ExactlyOneOfFour)
                .count(),
            1
        );
    }

    #[test]
    fn unbiased_cell_profile_and_inexactness() {
        let cell = unbiased_2in4_cell();
        let tt = exactly_k_of_n(2, 4);
        let report = cell.verify(&tt).unwrap();
        // Models reach 0, the gap is 2, but the cell is not exact: 0/4-true
        // countermodels sit at 8, not 2.
        assert!(report.models_at_zero);
        assert_eq!(report.true_gap, Some(rint(2)));
        for (mask, energy) in report.min_energy.iter().enumerate() {
            let trues = (mask as u32).count_ones() as i32;
            let expected = match (trues - 2).abs() {
                0 => 0.0,
                1 => 2.0,
                _ => 8.0,
            };
            assert_eq!(rat_to_f64(energy), expected, "mask {mask}");
        }
        // Against the exact 2-in-4 table, exactness fails.
        let exact_claim = PenaltyFunction { exact: true, ..cell.clone() };
        let r2 = exact_claim.verify(&tt).unwrap();
        assert!(!r2.exact);
        assert!(!r2.pass);
    }
}
