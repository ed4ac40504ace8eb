//! Logic frontend: DIMACS CNF / classic WCNF parsing, AND-inverter graphs,
//! k-feasible cut enumeration, and cut-based technology mapping into library
//! cells.
//!
//! Mapped netlists are uniform: every active AND-node becomes a *relation* cell
//! (`z ↔ f(cut leaves)`), and the primary output is pinned ⊤ by a separate unit
//! cell, so cell pins are plain node variables with all polarity absorbed into
//! the cells' spin reversals.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::boolfn::{and_relation, relation_of, TruthTable};
use crate::gatelib::{GateCell, GateLibrary};
use crate::penalty::PenaltyFunction;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// CNF / WCNF
// ---------------------------------------------------------------------------

/// One clause; `weight` is `None` for plain CNF and `Some(top)` marks hard
/// clauses in WCNF.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub lits: Vec<i32>,
    pub weight: Option<u64>,
}

/// A parsed CNF or WCNF problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfProblem {
    pub n_vars: usize,
    pub clauses: Vec<Clause>,
    /// WCNF top weight; `None` for plain CNF.
    pub top: Option<u64>,
}

impl CnfProblem {
    pub fn is_weighted(&self) -> bool {
        self.top.is_some()
    }

    /// Clauses that must hold (all of them for plain CNF).
    pub fn hard_clauses(&self) -> impl Iterator<Item = &Clause> {
        let top = self.top;
        self.clauses
            .iter()
            .filter(move |c| match (c.weight, top) {
                (Some(w), Some(t)) => w >= t,
                _ => true,
            })
    }

    /// Soft clauses with their weights (empty for plain CNF).
    pub fn soft_clauses(&self) -> impl Iterator<Item = (&Clause, u64)> {
        let top = self.top;
        self.clauses.iter().filter_map(move |c| match (c.weight, top) {
            (Some(w), Some(t)) if w < t => Some((c, w)),
            _ => None,
        })
    }
}

/// Parse DIMACS CNF (`p cnf <vars> <clauses>`, zero-terminated clauses).
pub fn parse_dimacs(text: &str) -> Result<CnfProblem> {
    parse_clausal(text, false)
}

/// Parse classic WCNF (`p wcnf <vars> <clauses> <top>`; each clause starts with
/// its weight, weight ≥ top means hard).
pub fn parse_wcnf(text: &str) -> Result<CnfProblem> {
    parse_clausal(text, true)
}

fn parse_clausal(text: &str, weighted: bool) -> Result<CnfProblem> {
    let err = |line: usize, msg: String| Error::Parse { line, msg };
    let mut header: Option<(usize, usize, Option<u64>)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut cur_lits: Vec<i32> = Vec::new();
    let mut cur_weight: Option<u64> = None;
    let mut open = false; // a clause is being accumulated
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(err(line, "duplicate problem header".into()));
            }
            let toks: Vec<&str> = trimmed.split_whitespace().collect();
            let fmt = if weighted { "wcnf" } else { "cnf" };
            let want = if weighted { 5 } else { 4 };
            if toks.len() != want || toks[1] != fmt {
                return Err(err(line, format!("malformed header, expected `p {fmt} ...`")));
            }
            let n_vars: usize = toks[2]
                .parse()
                .map_err(|_| err(line, format!("bad variable count {:?}", toks[2])))?;
            let n_clauses: usize = toks[3]
                .parse()
                .map_err(|_| err(line, format!("bad clause count {:?}", toks[3])))?;
            let top = if weighted {
                Some(
                    toks[4]
                        .parse::<u64>()
                        .map_err(|_| err(line, format!("bad top weight {:?}", toks[4])))?,
                )
            } else {
                None
            };
            header = Some((n_vars, n_clauses, top));
            continue;
        }
        let Some((n_vars, _, _)) = header else {
            return Err(err(line, "clause before problem header".into()));
        };
        for tok in trimmed.split_whitespace() {
            if weighted && !open {
                let w: u64 = tok
                    .parse()
                    .ok()
                    .filter(|&w| w > 0)
                    .ok_or_else(|| err(line, format!("bad clause weight {tok:?}")))?;
                cur_weight = Some(w);
                open = true;
                continue;
            }
            open = true;
            let lit: i32 = tok
                .parse()
                .map_err(|_| err(line, format!("bad literal {tok:?}")))?;
            if lit == 0 {
                if cur_lits.is_empty() {
                    return Err(err(line, "empty clause".into()));
                }
                clauses.push(Clause {
                    lits: std::mem::take(&mut cur_lits),
                    weight: cur_weight.take(),
                });
                open = false;
            } else {
                if lit.unsigned_abs() as usize > n_vars {
                    return Err(err(line, format!("literal {lit} exceeds {n_vars} variables")));
                }
                cur_lits.push(lit);
            }
        }
    }
    if open || !cur_lits.is_empty() {
        return Err(err(last_line, "unterminated clause at end of input".into()));
    }
    let (n_vars, n_clauses, top) = header.ok_or_else(|| err(last_line, "missing problem header".into()))?;
    if clauses.len() != n_clauses {
        return Err(err(
            last_line,
            format!("header declares {n_clauses} clauses, found {}", clauses.len()),
        ));
    }
    Ok(CnfProblem { n_vars, clauses, top })
}

// ---------------------------------------------------------------------------
// AND-inverter graphs
// ---------------------------------------------------------------------------

/// AIG literal: `node << 1 | negation`. Node 0 is the constant, so literal 0 is
/// ⊥ and literal 1 is ⊤. Inputs are nodes `1..=n_inputs`; AND-nodes follow.
pub type AigLit = u32;

pub const AIG_FALSE: AigLit = 0;
pub const AIG_TRUE: AigLit = 1;

pub fn lit_node(l: AigLit) -> u32 {
    l >> 1
}

pub fn lit_negated(l: AigLit) -> bool {
    l & 1 == 1
}

pub fn lit_not(l: AigLit) -> AigLit {
    l ^ 1
}

/// An AND-inverter graph with structural hashing and a single primary output.
#[derive(Debug, Clone)]
pub struct Aig {
    pub n_inputs: usize,
    /// Fan-in literal pairs (ordered `a ≤ b`); AND-node `i` is node
    /// `n_inputs + 1 + i`.
    ands: Vec<(AigLit, AigLit)>,
    hash: HashMap<(AigLit, AigLit), u32>,
    pub output: AigLit,
}

impl Aig {
    pub fn new(n_inputs: usize) -> Aig {
        Aig {
            n_inputs,
            ands: Vec::new(),
            hash: HashMap::new(),
            output: AIG_TRUE,
        }
    }

    /// Total nodes: constant + inputs + AND-nodes.
    pub fn num_nodes(&self) -> usize {
        1 + self.n_inputs + self.ands.len()
    }

    pub fn num_ands(&self) -> usize {
        self.ands.len()
    }

    pub fn is_input(&self, node: u32) -> bool {
        node >= 1 && node as usize <= self.n_inputs
    }

    pub fn is_and(&self, node: u32) -> bool {
        node as usize > self.n_inputs && (node as usize) < self.num_nodes()
    }

    /// Fan-in literals of an AND-node.
    pub fn fanins(&self, node: u32) -> Option<(AigLit, AigLit)> {
        self.is_and(node)
            .then(|| self.ands[node as usize - self.n_inputs - 1])
    }

    /// The positive literal of DIMACS variable `v` (1-based).
    pub fn input_lit(&self, v: usize) -> Result<AigLit> {
        if v == 0 || v > self.n_inputs {
            return Err(Error::Domain(format!("variable {v} out of range")));
        }
        Ok((v as u32) << 1)
    }

    /// The AIG literal of a DIMACS literal.
    pub fn dimacs_lit(&self, l: i32) -> Result<AigLit> {
        let pos = self.input_lit(l.unsigned_abs() as usize)?;
        Ok(if l < 0 { lit_not(pos) } else { pos })
    }

    /// Structurally hashed AND (no Boolean rewriting — see [`Aig::and_fold`]).
    pub fn and(&mut self, a: AigLit, b: AigLit) -> AigLit {
        let key = (a.min(b), a.max(b));
        if let Some(&node) = self.hash.get(&key) {
            return node << 1;
        }
        let node = self.num_nodes() as u32;
        self.ands.push(key);
        self.hash.insert(key, node);
        node << 1
    }

    /// OR via De Morgan.
    pub fn or(&mut self, a: AigLit, b: AigLit) -> AigLit {
        lit_not(self.and(lit_not(a), lit_not(b)))
    }

    /// AND with constant propagation, idempotence/contradiction, and one-level
    /// shared-fanin rewrites; falls back to the hashed constructor.
    pub fn and_fold(&mut self, a: AigLit, b: AigLit) -> AigLit {
        if a == AIG_FALSE || b == AIG_FALSE || a == lit_not(b) {
            return AIG_FALSE;
        }
        if a == AIG_TRUE {
            return b;
        }
        if b == AIG_TRUE || a == b {
            return a;
        }
        for (x, y) in [(a, b), (b, a)] {
            if let Some((c, d)) = self.fanins(lit_node(y)) {
                if !lit_negated(y) {
                    // y = c ∧ d
                    if x == c || x == d {
                        return y; // absorption: x ∧ (x ∧ d) = x ∧ d
                    }
                    if x == lit_not(c) || x == lit_not(d) {
                        return AIG_FALSE; // contradiction one level down
                    }
                } else {
                    // y = ¬(c ∧ d)
                    if x == lit_not(c) || x == lit_not(d) {
                        return x; // x ⇒ y, so x ∧ y = x
                    }
                    if x == c {
                        return self.and_fold(x, lit_not(d)); // x ∧ ¬(x∧d) = x ∧ ¬d
                    }
                    if x == d {
                        return self.and_fold(x, lit_not(c));
                    }
                }
            }
        }
        self.and(a, b)
    }

    pub fn or_fold(&mut self, a: AigLit, b: AigLit) -> AigLit {
        lit_not(self.and_fold(lit_not(a), lit_not(b)))
    }

    /// Evaluate a literal under a full input assignment (`inputs[v-1]` is
    /// variable `v`).
    pub fn eval(&self, lit: AigLit, inputs: &[bool]) -> bool {
        debug_assert_eq!(inputs.len(), self.n_inputs);
        let mut val = vec![false; self.num_nodes()];
        for (i, &b) in inputs.iter().enumerate() {
            val[i + 1] = b;
        }
        let read = |val: &[bool], l: AigLit| val[lit_node(l) as usize] ^ lit_negated(l);
        for (i, &(a, b)) in self.ands.iter().enumerate() {
            val[self.n_inputs + 1 + i] = read(&val, a) && read(&val, b);
        }
        read(&val, lit)
    }

    /// Evaluate `node` treating `leaves` as free variables valued by the bits
    /// of `mask` (leaf `i` ← bit `i`). Every path below `node` must hit a leaf.
    fn eval_at(&self, node: u32, leaves: &[u32], mask: u32) -> Result<bool> {
        fn go(aig: &Aig, node: u32, leaves: &[u32], mask: u32, memo: &mut HashMap<u32, bool>) -> Result<bool> {
            if let Some(i) = leaves.iter().position(|&l| l == node) {
                return Ok(mask >> i & 1 == 1);
            }
            if let Some(&v) = memo.get(&node) {
                return Ok(v);
            }
            let Some((a, b)) = aig.fanins(node) else {
                return Err(Error::Domain(format!(
                    "node {node} is not covered by the cut"
                )));
            };
            let va = go(aig, lit_node(a), leaves, mask, memo)? ^ lit_negated(a);
            let vb = go(aig, lit_node(b), leaves, mask, memo)? ^ lit_negated(b);
            let v = va && vb;
            memo.insert(node, v);
            Ok(v)
        }
        go(self, node, leaves, mask, &mut HashMap::new())
    }
}

/// Balanced reduction (depth ⌈log₂⌉) of a literal list.
fn balanced_reduce(aig: &mut Aig, mut lits: Vec<AigLit>, f: fn(&mut Aig, AigLit, AigLit) -> AigLit) -> AigLit {
    debug_assert!(!lits.is_empty());
    while lits.len() > 1 {
        let mut next = Vec::with_capacity(lits.len().div_ceil(2));
        for pair in lits.chunks(2) {
            next.push(if pair.len() == 2 { f(aig, pair[0], pair[1]) } else { pair[0] });
        }
        lits = next;
    }
    lits[0]
}

/// Build the AIG of the hard part of a problem: balanced OR trees per clause,
/// a balanced AND tree for the conjunction, structural hashing throughout.
pub fn cnf_to_aig(problem: &CnfProblem) -> Result<Aig> {
    let mut aig = Aig::new(problem.n_vars);
    let mut clause_lits = Vec::new();
    for clause in problem.hard_clauses() {
        if clause.lits.is_empty() {
            return Err(Error::Domain("empty clause has no AIG".into()));
        }
        let lits: Vec<AigLit> = clause
            .lits
            .iter()
            .map(|&l| aig.dimacs_lit(l))
            .collect::<Result<_>>()?;
        clause_lits.push(balanced_reduce(&mut aig, lits, Aig::or));
    }
    aig.output = if clause_lits.is_empty() {
        AIG_TRUE
    } else {
        balanced_reduce(&mut aig, clause_lits, Aig::and)
    };
    Ok(aig)
}

/// Rebuild the AIG through the folding constructor: structural hashing, constant
/// propagation, and one-level shared-fanin rewrites. Node count never grows.
pub fn simplify_aig(aig: &Aig) -> Aig {
    let mut out = Aig::new(aig.n_inputs);
    // old node → new literal
    let mut map: Vec<AigLit> = (0..=aig.n_inputs as u32).map(|n| n << 1).collect();
    let remap = |map: &[AigLit], l: AigLit| map[lit_node(l) as usize] ^ (l & 1);
    for i in 0..aig.num_ands() {
        let (a, b) = aig.ands[i];
        let (na, nb) = (remap(&map, a), remap(&map, b));
        map.push(out.and_fold(na, nb));
    }
    out.output = remap(&map, aig.output);
    out
}

// ---------------------------------------------------------------------------
// Cut enumeration
// ---------------------------------------------------------------------------

/// A cut of a node: every input→node path passes through a leaf. The trivial
/// cut `{node}` is enumerated but unusable for mapping.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cut {
    /// Leaf node ids, ascending.
    pub leaves: Vec<u32>,
}

impl Cut {
    pub fn is_trivial_for(&self, node: u32) -> bool {
        self.leaves.as_slice() == [node]
    }
}

/// All k-feasible cuts per node (indexed by node id), dominated cuts removed,
/// trivial cut last. `k ≤ 4`.
pub fn enumerate_cuts(aig: &Aig, k: usize) -> Result<Vec<Vec<Cut>>> {
    if !(1..=4).contains(&k) {
        return Err(Error::Domain(format!("cut size {k} outside 1..=4")));
    }
    let mut cuts: Vec<Vec<Cut>> = Vec::with_capacity(aig.num_nodes());
    // Constant node: only its trivial cut (mapping never uses it).
    cuts.push(vec![Cut { leaves: vec![0] }]);
    for v in 1..=aig.n_inputs as u32 {
        cuts.push(vec![Cut { leaves: vec![v] }]);
    }
    for i in 0..aig.num_ands() {
        let node = (aig.n_inputs + 1 + i) as u32;
        let (a, b) = aig.ands[i];
        let mut set: BTreeSet<Vec<u32>> = BTreeSet::new();
        for ca in &cuts[lit_node(a) as usize] {
            for cb in &cuts[lit_node(b) as usize] {
                // Never cut through the constant node.
                if ca.leaves.contains(&0) || cb.leaves.contains(&0) {
                    continue;
                }
                let merged: BTreeSet<u32> = ca.leaves.iter().chain(&cb.leaves).copied().collect();
                if merged.len() <= k {
                    set.insert(merged.into_iter().collect());
                }
            }
        }
        // Dominance pruning: drop any cut containing another enumerated cut.
        let all: Vec<Vec<u32>> = set.into_iter().collect();
        let mut kept: Vec<Cut> = all
            .iter()
            .filter(|c| {
                !all.iter()
                    .any(|o| o.len() < c.len() && o.iter().all(|x| c.contains(x)))
            })
            .map(|c| Cut { leaves: c.clone() })
            .collect();
        kept.push(Cut { leaves: vec![node] });
        cuts.push(kept);
    }
    Ok(cuts)
}

/// Truth table of `node` over a cut's leaves (leaf `i` is variable `i+1`).
pub fn cut_function(aig: &Aig, node: u32, cut: &Cut) -> Result<TruthTable> {
    let m = cut.leaves.len() as u8;
    let mut bits = Vec::with_capacity(1 << m);
    for mask in 0..(1u32 << m) {
        bits.push(aig.eval_at(node, &cut.leaves, mask)?);
    }
    TruthTable::from_fn(m, |mask| bits[mask as usize])
}

// ---------------------------------------------------------------------------
// Technology mapping
// ---------------------------------------------------------------------------

/// One mapped cell: an active AND-node realized as the relation
/// `z ↔ f(cut leaves)` by a library instantiation.
#[derive(Debug, Clone)]
pub struct MappedCell {
    /// The active AND-node this cell realizes.
    pub node_var: u32,
    /// Cut leaf node ids, ascending; pin variables are `leaves ++ [node_var]`.
    pub cut: Vec<u32>,
    /// The relation table the cell encodes (leaves first, node variable last).
    pub relation: TruthTable,
    pub cell: GateCell,
    /// The cell penalty specialized to `relation`, footprint-local coordinates.
    pub penalty: PenaltyFunction,
}

impl MappedCell {
    /// Pin variables (AIG node ids) in the penalty's input order.
    pub fn pins(&self) -> Vec<u32> {
        let mut p = self.cut.clone();
        p.push(self.node_var);
        p
    }
}

#[derive(Debug, Clone)]
pub struct Mapping {
    pub output_node: u32,
    pub output_negated: bool,
    /// Active AND-node → its cell.
    pub cells: BTreeMap<u32, MappedCell>,
}

impl Mapping {
    /// `Some(value)` when the output folded to a constant.
    pub fn const_output(&self) -> Option<bool> {
        (self.output_node == 0).then_some(self.output_negated)
    }

    pub fn total_qubit_cost(&self) -> usize {
        self.cells.values().map(|c| c.cell.qubit_cost()).sum()
    }

    /// The three proper-mapping conditions.
    pub fn is_proper(&self, aig: &Aig) -> bool {
        if self.const_output().is_some() {
            return self.cells.is_empty();
        }
        // 1. the primary output is active (inputs map to no cell);
        if aig.is_and(self.output_node) && !self.cells.contains_key(&self.output_node) {
            return false;
        }
        // 2. cut members of active nodes are active;
        let mut leaves: BTreeSet<u32> = BTreeSet::new();
        for cell in self.cells.values() {
            for &l in &cell.cut {
                if aig.is_and(l) && !self.cells.contains_key(&l) {
                    return false;
                }
                leaves.insert(l);
            }
        }
        // 3. every active non-output node feeds some active node's cut.
        self.cells
            .keys()
            .all(|&n| n == self.output_node || leaves.contains(&n))
    }
}

struct Candidate {
    cut: Vec<u32>,
    relation: TruthTable,
    cell: GateCell,
    penalty: PenaltyFunction,
}

/// Cut-based technology mapping: start from the trivial all-AND2 mapping, then
/// `passes` rounds of reverse-topological re-choice minimizing the exact
/// newly-activated qubit cost. Refinement never increases total cost.
pub fn tech_map(aig: &Aig, lib: &GateLibrary, k: usize, passes: usize) -> Result<Mapping> {
    let out_node = lit_node(aig.output);
    let mut mapping = Mapping {
        output_node: out_node,
        output_negated: lit_negated(aig.output),
        cells: BTreeMap::new(),
    };
    if out_node == 0 || aig.is_input(out_node) {
        return Ok(mapping);
    }
    if lib.instantiate(&and_relation())?.is_none() {
        return Err(Error::Config(
            "library lacks the 2-input AND relation fallback cell".into(),
        ));
    }
    let cuts = enumerate_cuts(aig, k)?;
    // Candidate cells per AND-node, in cut order.
    let first_and = aig.n_inputs as u32 + 1;
    let mut cands: HashMap<u32, Vec<Candidate>> = HashMap::new();
    for node in first_and..aig.num_nodes() as u32 {
        let mut list = Vec::new();
        for cut in &cuts[node as usize] {
            if cut.is_trivial_for(node) || cut.leaves.contains(&0) {
                continue;
            }
            let f = cut_function(aig, node, cut)?;
            let relation = relation_of(&f)?;
            if let Some((cell, penalty)) = lib.instantiate(&relation)? {
                list.push(Candidate {
                    cut: cut.leaves.clone(),
                    relation,
                    cell,
                    penalty,
                });
            }
        }
        if list.is_empty() {
            return Err(Error::Config(format!(
                "no library cell covers node {node}; run simplify_aig or extend the library"
            )));
        }
        cands.insert(node, list);
    }
    let cheapest: HashMap<u32, usize> = cands
        .iter()
        .map(|(&n, l)| (n, l.iter().map(|c| c.cell.qubit_cost()).min().unwrap()))
        .collect();
    // Trivial mapping: every needed node uses its fan-in cut.
    let choose_trivial = |node: u32| -> Result<usize> {
        let (a, b) = aig.fanins(node).unwrap();
        let mut fan: Vec<u32> = vec![lit_node(a), lit_node(b)];
        fan.sort_unstable();
        fan.dedup();
        cands[&node]
            .iter()
            .position(|c| c.cut == fan)
            .ok_or_else(|| Error::Config(format!("no fan-in cut cell for node {node}")))
    };
    let select = |pick: &dyn Fn(u32, &mut BTreeSet<u32>) -> Result<usize>| -> Result<BTreeMap<u32, usize>> {
        let mut needed: BTreeSet<u32> = BTreeSet::from([out_node]);
        let mut chosen = BTreeMap::new();
        for node in (first_and..aig.num_nodes() as u32).rev() {
            if !needed.contains(&node) {
                continue;
            }
            let kidx = pick(node, &mut needed)?;
            for &l in &cands[&node][kidx].cut {
                if aig.is_and(l) {
                    needed.insert(l);
                }
            }
            chosen.insert(node, kidx);
        }
        Ok(chosen)
    };
    let cost_of = |chosen: &BTreeMap<u32, usize>| -> usize {
        chosen
            .iter()
            .map(|(n, &i)| cands[n][i].cell.qubit_cost())
            .sum()
    };
    let mut best = select(&|node, _| choose_trivial(node))?;
    let mut best_cost = cost_of(&best);
    for _ in 0..passes {
        let next = select(&|node, needed: &mut BTreeSet<u32>| {
            let mut best_k = 0;
            let mut best_c = usize::MAX;
            for (i, c) in cands[&node].iter().enumerate() {
                // Exact qubit cost of newly activated nodes, estimated by each
                // inactive AND-leaf's cheapest single cell.
                let cost: usize = c.cell.qubit_cost()
                    + c.cut
                        .iter()
                        .filter(|&&l| aig.is_and(l) && !needed.contains(&l))
                        .map(|l| cheapest[l])
                        .sum::<usize>();
                if cost < best_c {
                    best_c = cost;
                    best_k = i;
                }
            }
            Ok(best_k)
        })?;
        let next_cost = cost_of(&next);
        if next_cost <= best_cost {
            best = next;
            best_cost = next_cost;
        }
    }
    for (node, kidx) in best {
        let c = &cands[&node][kidx];
        mapping.cells.insert(
            node,
            MappedCell {
                cut: c.cut.clone(),
                relation: c.relation.clone(),
                cell: c.cell.clone(),
                penalty: c.penalty.clone(),
                node_var: node,
            },
        );
    }
    debug_assert!(mapping.is_proper(aig));
    Ok(mapping)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gatelib::standard_cells;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn cnf(text: &str) -> CnfProblem {
        parse_dimacs(text).unwrap()
    }

    #[test]
    fn parses_dimacs_and_wcnf() {
        let p = cnf("c comment\np cnf 2 1\n1 -2 0\n");
        assert_eq!(p.n_vars, 2);
        assert_eq!(p.clauses, vec![Clause { lits: vec![1, -2], weight: None }]);

        let w = parse_wcnf("p wcnf 2 2 10\n10 1 0\n3 -1 2 0\n").unwrap();
        assert_eq!(w.top, Some(10));
        assert_eq!(w.hard_clauses().count(), 1);
        let softs: Vec<_> = w.soft_clauses().collect();
        assert_eq!(softs[0].1, 3);
        assert_eq!(softs[0].0.lits, vec![-1, 2]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_dimacs("p cnf 2 1\n0\n") {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("empty clause"));
            }
            other => panic!("expected empty-clause error, got {other:?}"),
        }
        match parse_dimacs("p cnf 1 1\n2 0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected literal range error, got {other:?}"),
        }
        assert!(parse_dimacs("p dnf 1 1\n1 0\n").is_err());
        assert!(parse_wcnf("p wcnf 1 1 5\n0 1 0\n").is_err()); // zero weight
    }

    #[test]
    fn conjunction_of_three_literals_is_two_ands() {
        // F = x₁ ∧ x₂ ∧ ¬x₃ as three unit clauses.
        let aig = cnf_to_aig(&cnf("p cnf 3 3\n1 0\n2 0\n-3 0\n")).unwrap();
        assert_eq!(aig.num_ands(), 2);
        for mask in 0..8u32 {
            let inputs: Vec<bool> = (0..3).map(|i| mask >> i & 1 == 1).collect();
            assert_eq!(aig.eval(aig.output, &inputs), mask & 0b111 == 0b011);
        }
    }

    #[test]
    fn unit_clause_is_the_literal_itself() {
        let aig = cnf_to_aig(&cnf("p cnf 2 1\n-2 0\n")).unwrap();
        assert_eq!(aig.num_ands(), 0);
        assert_eq!(aig.output, lit_not(aig.input_lit(2).unwrap()));
    }

    #[test]
    fn duplicate_clause_shares_structure() {
        let once = cnf_to_aig(&cnf("p cnf 4 2\n1 2 0\n3 4 0\n")).unwrap();
        let dup = cnf_to_aig(&cnf("p cnf 4 3\n1 2 0\n1 2 0\n3 4 0\n")).unwrap();
        // The duplicated OR is hashed; only the conjunction shape differs.
        assert_eq!(dup.num_ands(), once.num_ands() + 1);
    }

    #[test]
    fn simplify_folds_idempotence_and_contradiction() {
        let mut aig = Aig::new(1);
        let x = aig.input_lit(1).unwrap();
        let xx = aig.and(x, x);
        aig.output = xx;
        let s = simplify_aig(&aig);
        assert_eq!(s.num_ands(), 0);
        assert_eq!(s.output, x);

        let mut aig = Aig::new(1);
        let contradiction = aig.and(x, lit_not(x));
        aig.output = contradiction;
        let s = simplify_aig(&aig);
        assert_eq!(s.output, AIG_FALSE);
        assert_eq!(s.num_ands(), 0);
    }

    fn random_aig(rng: &mut impl Rng, n_inputs: usize, n_ands: usize) -> Aig {
        let mut aig = Aig::new(n_inputs);
        for _ in 0..n_ands {
            let pick = |rng: &mut dyn rand::RngCore, aig: &Aig| -> AigLit {
                let node = rng.gen_range(1..aig.num_nodes() as u32);
                node << 1 | rng.gen_range(0..2)
            };
            let a = pick(rng, &aig);
            let b = pick(rng, &aig);
            aig.and(a, b);
        }
        aig.output = {
            let node = aig.num_nodes() as u32 - 1;
            node << 1 | rng.gen_range(0..2)
        };
        aig
    }

    #[test]
    fn simplify_preserves_semantics_on_random_aigs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let aig = random_aig(&mut rng, 12, 30);
            let s = simplify_aig(&aig);
            assert!(s.num_nodes() <= aig.num_nodes());
            for mask in 0..(1u32 << 12) {
                let inputs: Vec<bool> = (0..12).map(|i| mask >> i & 1 == 1).collect();
                assert_eq!(aig.eval(aig.output, &inputs), s.eval(s.output, &inputs));
            }
        }
    }

    #[test]
    fn chain_cut_and_input_cuts() {
        let mut aig = Aig::new(3);
        let x1 = aig.input_lit(1).unwrap();
        let x2 = aig.input_lit(2).unwrap();
        let x3 = aig.input_lit(3).unwrap();
        let a1 = aig.and(x1, x2);
        let a2 = aig.and(a1, x3);
        aig.output = a2;
        let cuts = enumerate_cuts(&aig, 3).unwrap();
        let a2_cuts = &cuts[lit_node(a2) as usize];
        assert!(a2_cuts.iter().any(|c| c.leaves == vec![1, 2, 3]));
        for v in 1..=3usize {
            assert_eq!(cuts[v].len(), 1);
            assert!(cuts[v][0].is_trivial_for(v as u32));
        }
    }

    /// Brute-force cut checker: every input→node path hits a leaf.
    fn is_cut(aig: &Aig, node: u32, leaves: &[u32]) -> bool {
        fn reach(aig: &Aig, n: u32, leaves: &[u32]) -> bool {
            if leaves.contains(&n) {
                return true;
            }
            match aig.fanins(n) {
                Some((a, b)) => {
                    reach(aig, lit_node(a), leaves) && reach(aig, lit_node(b), leaves)
                }
                None => false, // reached an input/constant not in the leaf set
            }
        }
        reach(aig, node, leaves)
    }

    #[test]
    fn cut_sets_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let aig = random_aig(&mut rng, 6, 14);
        let k = 3;
        let cuts = enumerate_cuts(&aig, k).unwrap();
        for node in (aig.n_inputs as u32 + 1)..aig.num_nodes() as u32 {
            // Transitive fan-in (excluding the constant) plus the node itself.
            let mut tfi: BTreeSet<u32> = BTreeSet::from([node]);
            let mut stack = vec![node];
            while let Some(n) = stack.pop() {
                if let Some((a, b)) = aig.fanins(n) {
                    for f in [lit_node(a), lit_node(b)] {
                        if f != 0 && tfi.insert(f) {
                            stack.push(f);
                        }
                    }
                }
            }
            let universe: Vec<u32> = tfi.into_iter().collect();
            let mut brute: Vec<Vec<u32>> = Vec::new();
            let m = universe.len();
            for mask in 1u64..(1 << m) {
                if mask.count_ones() as usize > k {
                    continue;
                }
                let subset: Vec<u32> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| universe[i]).collect();
                if is_cut(&aig, node, &subset) {
                    brute.push(subset);
                }
            }
            let undominated: Vec<&Vec<u32>> = brute
                .iter()
                .filter(|c| {
                    !brute
                        .iter()
                        .any(|o| o.len() < c.len() && o.iter().all(|x| c.contains(x)))
                })
                .collect();
            let mut got: Vec<Vec<u32>> = cuts[node as usize].iter().map(|c| c.leaves.clone()).collect();
            let mut want: Vec<Vec<u32>> = undominated.into_iter().cloned().collect();
            got.sort();
            want.sort();
            assert_eq!(got, want, "cut mismatch at node {node}");
        }
    }

    #[test]
    fn trivial_mapping_of_two_and_aig() {
        let lib = standard_cells().unwrap();
        let aig = cnf_to_aig(&cnf("p cnf 3 3\n1 0\n2 0\n-3 0\n")).unwrap();
        let mapping = tech_map(&aig, &lib, 2, 3).unwrap();
        assert_eq!(mapping.cells.len(), 2);
        assert!(mapping.is_proper(&aig));
        for cell in mapping.cells.values() {
            assert!(cell.penalty.verify(&cell.relation).unwrap().pass);
        }
    }

    #[test]
    fn mapping_is_proper_and_cost_monotone_on_random_cnf() {
        let lib = standard_cells().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let n = 8;
            let n_clauses = 10;
            let mut text = format!("p cnf {n} {n_clauses}\n");
            for _ in 0..n_clauses {
                let len = rng.gen_range(1..=3);
                let mut lits: Vec<i32> = Vec::new();
                while lits.len() < len {
                    let v = rng.gen_range(1..=n as i32);
                    if !lits.iter().any(|l: &i32| l.abs() == v) {
                        lits.push(if rng.gen() { v } else { -v });
                    }
                }
                for l in &lits {
                    text.push_str(&format!("{l} "));
                }
                text.push_str("0\n");
            }
            let problem = cnf(&text);
            let aig = simplify_aig(&cnf_to_aig(&problem).unwrap());
            if aig.num_ands() == 0 {
                continue;
            }
            let trivial = tech_map(&aig, &lib, 2, 0).unwrap();
            let refined = tech_map(&aig, &lib, 3, 3).unwrap();
            assert!(trivial.is_proper(&aig));
            assert!(refined.is_proper(&aig));
            assert!(refined.total_qubit_cost() <= trivial.total_qubit_cost());
            // Round trip: propagated node values satisfy every cell relation, and
            // the AIG output matches the CNF.
            for mask in 0..(1u32 << n) {
                let inputs: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                let cnf_sat = problem.clauses.iter().all(|c| {
                    c.lits.iter().any(|&l| {
                        let v = inputs[l.unsigned_abs() as usize - 1];
                        if l > 0 { v } else { !v }
                    })
                });
                assert_eq!(aig.eval(aig.output, &inputs), cnf_sat);
                for (&node, cell) in &refined.cells {
                    let mut key = 0u32;
                    for (i, &leaf) in cell.cut.iter().enumerate() {
                        if aig.eval(leaf << 1, &inputs) {
                            key |= 1 << i;
                        }
                    }
                    if aig.eval(node << 1, &inputs) {
                        key |= 1 << cell.cut.len();
                    }
                    assert!(cell.relation.get(key), "relation violated at node {node}");
                }
            }
        }
    }

    #[test]
    fn constant_and_input_outputs_map_to_empty_netlists() {
        let lib = standard_cells().unwrap();
        let mut aig = Aig::new(1);
        aig.output = AIG_FALSE;
        let m = tech_map(&aig, &lib, 3, 3).unwrap();
        assert_eq!(m.const_output(), Some(false));
        assert!(m.is_proper(&aig));

        let aig2 = cnf_to_aig(&cnf("p cnf 2 1\n-2 0\n")).unwrap();
        let m2 = tech_map(&aig2, &lib, 3, 3).unwrap();
        assert!(m2.cells.is_empty());
        assert_eq!(m2.output_node, 2);
        assert!(m2.output_negated);
    }
}
