//! End-to-end solving: encode a CNF/WCNF or a cardinality-constraint instance
//! onto a Chimera graph, anneal, decode, and judge the samples.
//!
//! Per the satisfiability-checker semantics, a nonzero best energy from the
//! heuristic sampler is reported as *unknown*, never as "unsat": only a
//! zero-energy sample certifies anything.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Mutex;
use std::time::Instant;

use crate::benchgen::{unbiased_2in4_cell, ConstraintInstance, ConstraintKind};
use crate::boolfn::{at_least_k_of_n, at_most_k_of_n, TruthTable};
use crate::chimera::ChimeraGraph;
use crate::frontend::{cnf_to_aig, lit_node, simplify_aig, tech_map, CnfProblem};
use crate::gatelib::GateLibrary;
use crate::ising::spins;
use crate::penalty::{unit_pin, PenaltyFunction};
use crate::placeroute::{
    assemble, place_spaced, route_nets, verify_embedding, Assembled, EmbeddingReport, Netlist,
    NetlistCell, Placement, RouteConfig, RoutingSolution,
};
use crate::rat::{rint, Rat};
use crate::sampler::{
    anneal, check_sat, decode, maxsat_cost, DecodeResult, MaxSatCost, SampleSet, Schedule,
};
use crate::synth::{synthesize, Footprint, SynthConfig};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Chimera grid size (shore 4, no disabled qubits).
    pub rows: u32,
    pub cols: u32,
    pub seed: u64,
    pub num_samples: usize,
    pub sweeps: usize,
    pub schedule: Schedule,
    /// Placement SA move budget.
    pub place_budget: usize,
    pub route: RouteConfig,
    /// Raw chain coupling weight; the chain gap is twice this.
    pub chain_weight: Rat,
    /// Cut size for technology mapping.
    pub cut_size: usize,
    /// Mapping refinement passes.
    pub map_passes: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            rows: 16,
            cols: 16,
            seed: 1,
            num_samples: 20,
            sweeps: 2000,
            schedule: Schedule::default(),
            place_budget: 20_000,
            route: RouteConfig::default(),
            chain_weight: rint(2),
            cut_size: 4,
            map_passes: 2,
        }
    }
}

// ---------------------------------------------------------------------------
// Constraint and clause cells
// ---------------------------------------------------------------------------

/// The exact 2-in-4 penalty on a tile (3 ancillas, gap 2). Coefficients are a
/// fixed optimum of the gap-maximization LP; brute-force verified in tests.
pub fn exact_2in4_cell() -> PenaltyFunction {
    let mut m = crate::ising::IsingModel::new(Footprint::Tile.graph());
    m.offset = rint(5);
    for (a, b, num, den) in [
        (1u32, 4u32, 1i64, 1i64),
        (1, 5, -1, 2),
        (1, 6, -1, 2),
        (1, 7, -1, 1),
        (2, 4, 1, 2),
        (2, 5, 1, 2),
        (2, 6, -1, 1),
        (2, 7, 1, 1),
        (3, 4, -1, 2),
        (3, 5, 1, 1),
        (3, 6, -1, 2),
        (3, 7, -1, 1),
    ] {
        m.add_coupling(a, b, crate::rat::rat(num, den)).unwrap();
    }
    PenaltyFunction {
        model: m,
        inputs: vec![4, 5, 6, 7],
        ancillas: vec![1, 2, 3],
        gap: rint(2),
        exact: true,
    }
}

/// The exact 1-in-4 penalty on a tile (4 ancillas, gap 8/3). Coefficients are a
/// fixed optimum of the gap-maximization LP; brute-force verified in tests.
pub fn exact_1in4_cell() -> PenaltyFunction {
    let mut m = crate::ising::IsingModel::new(Footprint::Tile.graph());
    m.offset = rint(8);
    m.add_bias(0, crate::rat::rat(4, 3)).unwrap();
    for q in 4..=7 {
        m.add_bias(q, crate::rat::rat(2, 3)).unwrap();
    }
    for (a, b, num, den) in [
        (0u32, 4u32, 1i64, 1i64),
        (0, 5, -1, 3),
        (0, 6, 1, 1),
        (0, 7, 1, 1),
        (1, 4, 1, 1),
        (1, 5, -1, 1),
        (1, 6, -1, 3),
        (1, 7, -1, 1),
        (2, 4, -1, 1),
        (2, 5, -1, 1),
        (2, 6, 1, 1),
        (2, 7, -1, 3),
        (3, 4, -1, 3),
        (3, 5, -1, 1),
        (3, 6, -1, 1),
        (3, 7, 1, 1),
    ] {
        m.add_coupling(a, b, crate::rat::rat(num, den)).unwrap();
    }
    PenaltyFunction {
        model: m,
        inputs: vec![0, 1, 2, 3],
        ancillas: vec![4, 5, 6, 7],
        gap: crate::rat::rat(8, 3),
        exact: true,
    }
}

/// Lazily synthesized (and memoized) penalty cells for constraints and soft
/// clauses. The common cardinality kinds use fixed verified coefficient sets;
/// anything else falls back to on-the-fly synthesis.
pub struct CellCache {
    cells: Mutex<HashMap<String, (PenaltyFunction, Footprint)>>,
    pub synth: SynthConfig,
}

impl Default for CellCache {
    fn default() -> Self {
        CellCache {
            cells: Mutex::new(HashMap::new()),
            synth: SynthConfig::default(),
        }
    }
}

impl CellCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn get_or_synthesize(
        &self,
        key: &str,
        tt: &TruthTable,
        require_exact: bool,
    ) -> Result<(PenaltyFunction, Footprint)> {
        if let Some(hit) = self.cells.lock().unwrap().get(key) {
            return Ok(hit.clone());
        }
        let n = tt.arity() as usize;
        let mut last = Error::Infeasible(format!("no footprint admits {}", tt.to_literal()));
        for fp in [Footprint::HalfTile, Footprint::Tile, Footprint::TwoTile] {
            if n > fp.capacity() {
                continue;
            }
            // The Shannon system handles up to 12 spins.
            let h_max = (fp.capacity() - n).min(12usize.saturating_sub(n));
            for h in 0..=h_max {
                match synthesize(tt, fp, h, require_exact, &self.synth) {
                    Ok(pf) => {
                        let found = (pf, fp);
                        self.cells
                            .lock()
                            .unwrap()
                            .insert(key.to_string(), found.clone());
                        return Ok(found);
                    }
                    Err(e) => last = e,
                }
            }
        }
        Err(last)
    }

    /// Penalty cell for one cardinality-constraint kind. Exact cells are
    /// required for weighted instances (the energy–cost identity needs them).
    pub fn constraint_cell(
        &self,
        kind: ConstraintKind,
        require_exact: bool,
    ) -> Result<(PenaltyFunction, Footprint)> {
        match (kind, require_exact) {
            (ConstraintKind::UnitTrue, _) => Ok((
                unit_pin(Footprint::HalfTile.graph(), 0, true)?,
                Footprint::HalfTile,
            )),
            (ConstraintKind::ExactlyTwoOfFour, false) => {
                Ok((unbiased_2in4_cell(), Footprint::Tile))
            }
            (ConstraintKind::ExactlyTwoOfFour, true) => Ok((exact_2in4_cell(), Footprint::Tile)),
            (ConstraintKind::ExactlyOneOfFour, _) => Ok((exact_1in4_cell(), Footprint::Tile)),
            (ConstraintKind::AtMostOneOfFive, _) => self.get_or_synthesize(
                &format!("amo5:{require_exact}"),
                &at_most_k_of_n(1, 5),
                require_exact,
            ),
            (ConstraintKind::AtLeastOneOfFive, _) => self.get_or_synthesize(
                &format!("alo5:{require_exact}"),
                &at_least_k_of_n(1, 5),
                require_exact,
            ),
        }
    }

    /// Penalty for one OR clause (≤ 4 literals): an at-least-1 cell with the
    /// negated literals' pins spin-reversed. Returns the cell and its pin
    /// variables (the literals' underlying CNF variables, clause order).
    pub fn clause_cell(
        &self,
        lits: &[i32],
        require_exact: bool,
    ) -> Result<(PenaltyFunction, Footprint, Vec<u32>)> {
        let k = lits.len();
        if k == 0 {
            return Err(Error::Domain("empty clause".into()));
        }
        if k > 4 {
            return Err(Error::Capacity(format!(
                "soft clauses support up to 4 literals, got {k}"
            )));
        }
        let (mut pf, fp) = if k == 1 {
            (
                unit_pin(Footprint::HalfTile.graph(), 0, true)?,
                Footprint::HalfTile,
            )
        } else {
            self.get_or_synthesize(
                &format!("or{k}:{require_exact}"),
                &at_least_k_of_n(1, k as u8),
                require_exact,
            )?
        };
        for (i, &l) in lits.iter().enumerate() {
            if l < 0 {
                pf = pf.spin_reversal(pf.inputs[i])?;
            }
        }
        let vars = lits.iter().map(|&l| l.unsigned_abs()).collect();
        Ok((pf, fp, vars))
    }
}

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

/// A problem embedded on hardware, ready for sampling.
pub struct Encoded {
    pub graph: ChimeraGraph,
    pub netlist: Netlist,
    pub placement: Placement,
    pub routing: RoutingSolution,
    pub assembled: Assembled,
    pub embedding: EmbeddingReport,
    /// Raw-model energy per unit of violated weight (the uniform gap `g`),
    /// present when every cell is exact and weights are in play: the
    /// energy–cost identity is checked against it.
    pub unit_gap: Option<Rat>,
    pub all_exact: bool,
}

impl Encoded {
    /// Ancilla-minimized raw energy of the cell penalties at a decoded
    /// assignment (chain penalties excluded — intact chains contribute zero).
    /// For an all-exact weighted encoding this equals `g ×` the violated
    /// weight, which is what the energy–cost identity asserts.
    pub fn semantic_energy(&self, assignment: &BTreeMap<u32, bool>) -> Result<Rat> {
        let mut total = rint(0);
        for cell in &self.netlist.cells {
            let fixed: Vec<(u32, i8)> = cell
                .vars
                .iter()
                .enumerate()
                .map(|(pin, &v)| {
                    let val = assignment.get(&v).copied().unwrap_or(false);
                    (cell.penalty.inputs[pin], if val { 1 } else { -1 })
                })
                .collect();
            let h = cell.penalty.ancillas.len();
            let mut best: Option<Rat> = None;
            for mask in 0u32..(1 << h) {
                let mut sv = fixed.clone();
                for (j, &a) in cell.penalty.ancillas.iter().enumerate() {
                    sv.push((a, if mask >> j & 1 == 1 { 1 } else { -1 }));
                }
                let e = cell.penalty.model.energy(&spins(sv))?;
                if best.as_ref().map(|b| &e < b).unwrap_or(true) {
                    best = Some(e);
                }
            }
            total += best.expect("at least the all-(−1) ancilla assignment");
        }
        Ok(total)
    }

    /// Exact raw-model energy of one sample.
    pub fn raw_energy(&self, set: &SampleSet, idx: usize) -> Result<Rat> {
        let s = &set.samples[idx];
        let sv = spins(set.order.iter().copied().zip(s.spins.iter().copied()));
        self.assembled.raw.energy(&sv)
    }
}

fn embed(netlist: Netlist, cfg: &PipelineConfig) -> Result<Encoded> {
    let graph = ChimeraGraph::new(cfg.rows, cfg.cols, 4, BTreeSet::new())?;
    // Big netlists need proportionally more annealing moves to untangle.
    let budget = cfg.place_budget.max(netlist.cells.len() * 400);
    let placement = place_spaced(&netlist, &graph, cfg.seed, budget)?;
    let routing = route_nets(&netlist, &placement, &graph, &cfg.route)?;
    let assembled = assemble(&netlist, &placement, &graph, &routing, &cfg.chain_weight)?;
    let embedding = verify_embedding(&netlist, &placement, &graph, &routing);
    Ok(Encoded {
        graph,
        netlist,
        placement,
        routing,
        assembled,
        embedding,
        unit_gap: None,
        all_exact: false,
    })
}

/// The uniform per-unit-weight violation energy used by weighted encodings.
fn unit_gap() -> Rat {
    rint(2)
}

/// Encode a constraint instance: one penalty cell per constraint, weighted
/// cells scaled so a violation costs `weight × g` raw energy.
pub fn encode_instance(
    inst: &ConstraintInstance,
    cache: &CellCache,
    cfg: &PipelineConfig,
) -> Result<Encoded> {
    if inst.constraints.is_empty() {
        return Err(Error::Domain("instance has no constraints".into()));
    }
    let weighted = inst.constraints.iter().any(|c| c.weight.is_some());
    let g = unit_gap();
    let mut cells = Vec::new();
    let mut all_exact = true;
    for c in &inst.constraints {
        let (pf, fp) = cache.constraint_cell(c.kind, weighted)?;
        all_exact &= pf.exact;
        let pf = match c.weight {
            Some(w) => pf.scaled(&(&(&g * rint(w as i64)) / &pf.gap)),
            None => pf,
        };
        cells.push(NetlistCell {
            footprint: fp,
            penalty: pf,
            vars: c.vars.clone(),
        });
    }
    let mut encoded = embed(Netlist::new(cells)?, cfg)?;
    encoded.all_exact = all_exact;
    encoded.unit_gap = (weighted && all_exact).then_some(g);
    Ok(encoded)
}

/// Encode a CNF/WCNF: the hard part through the AIG → technology-mapping
/// frontend (relation cells plus a ⊤-pin on the primary output), soft clauses
/// as weighted OR cells. Netlist variables are AIG node ids; CNF variable `v`
/// is node `v`.
pub fn encode_cnf(
    problem: &CnfProblem,
    lib: &GateLibrary,
    cache: &CellCache,
    cfg: &PipelineConfig,
) -> Result<Encoded> {
    let g = unit_gap();
    let mut cells: Vec<NetlistCell> = Vec::new();
    let mut all_exact = true;
    if problem.hard_clauses().next().is_some() {
        let aig = cnf_to_aig(problem)?;
        let simp = simplify_aig(&aig);
        // Folding can collapse a contradiction to constant ⊥; keep it material
        // by encoding the structurally hashed AIG instead (the sampler then
        // certifies only an energy bound, reported as unknown).
        let use_aig = if lit_node(simp.output) == 0 { &aig } else { &simp };
        let mapping = tech_map(use_aig, lib, cfg.cut_size, cfg.map_passes)?;
        for mc in mapping.cells.values() {
            all_exact &= mc.penalty.exact;
            cells.push(NetlistCell {
                footprint: mc.cell.footprint,
                penalty: mc.penalty.clone(),
                vars: mc.pins(),
            });
        }
        // Pin the primary output ⊤.
        let pin = unit_pin(Footprint::HalfTile.graph(), 0, !mapping.output_negated)?;
        cells.push(NetlistCell {
            footprint: Footprint::HalfTile,
            penalty: pin,
            vars: vec![mapping.output_node],
        });
    }
    let weighted = problem.soft_clauses().next().is_some();
    for (clause, w) in problem.soft_clauses() {
        let (pf, fp, vars) = cache.clause_cell(&clause.lits, true)?;
        all_exact &= pf.exact;
        let pf = pf.scaled(&(&(&g * rint(w as i64)) / &pf.gap));
        cells.push(NetlistCell {
            footprint: fp,
            penalty: pf,
            vars,
        });
    }
    if cells.is_empty() {
        return Err(Error::Domain("nothing to encode: formula has no clauses".into()));
    }
    let mut encoded = embed(Netlist::new(cells)?, cfg)?;
    encoded.all_exact = all_exact;
    encoded.unit_gap = (weighted && all_exact).then_some(g);
    Ok(encoded)
}

// ---------------------------------------------------------------------------
// Solving
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// A sample satisfied every hard clause/constraint.
    Satisfied { assignment: BTreeMap<u32, bool> },
    /// Weighted problem: the best (lowest-cost) decoded assignment.
    BestCost {
        assignment: BTreeMap<u32, bool>,
        cost: u64,
    },
    /// No certificate: the sampler never reached a satisfying state. Never
    /// interpreted as "unsat".
    Unknown { best_energy: Option<f64> },
}

impl Outcome {
    /// Process exit semantics: 0 = found, 2 = unknown.
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Unknown { .. } => 2,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct PipelineStats {
    pub cells: usize,
    pub qubits: usize,
    pub max_chain_len: usize,
    pub tree_cost: usize,
    pub encode_ms: u128,
    pub sample_ms: u128,
}

pub struct PipelineResult {
    pub outcome: Outcome,
    pub encoded: Encoded,
    pub decoded: DecodeResult,
    /// Every exactly-zero-raw-energy sample decoded to a satisfying
    /// assignment (soundness of the satisfiability-checker reading).
    pub zero_energy_sound: bool,
    /// `ancilla-minimized energy = g × cost` held on every intact-chain,
    /// hard-satisfying sample; `None` when the encoding is not exact/weighted.
    pub energy_identity: Option<bool>,
    pub stats: PipelineStats,
}

fn stats_of(encoded: &Encoded, encode_ms: u128, sample_ms: u128) -> PipelineStats {
    PipelineStats {
        cells: encoded.netlist.cells.len(),
        qubits: encoded.assembled.model.active_qubits().len(),
        max_chain_len: encoded.embedding.max_chain_len,
        tree_cost: encoded.routing.tree_cost,
        encode_ms,
        sample_ms,
    }
}

/// Restrict an assignment to the problem variables `1..=n`, filling variables
/// the encoding never materialized with `false` (simplification only removes a
/// variable when the formula's truth no longer depends on it).
fn problem_assignment(n_vars: usize, decoded: &BTreeMap<u32, bool>) -> BTreeMap<u32, bool> {
    (1..=n_vars as u32)
        .map(|v| (v, decoded.get(&v).copied().unwrap_or(false)))
        .collect()
}

/// Solve a parsed CNF/WCNF end to end.
pub fn solve_cnf(
    problem: &CnfProblem,
    lib: &GateLibrary,
    cache: &CellCache,
    cfg: &PipelineConfig,
) -> Result<PipelineResult> {
    let t0 = Instant::now();
    let encoded = encode_cnf(problem, lib, cache, cfg)?;
    let encode_ms = t0.elapsed().as_millis();
    let t1 = Instant::now();
    let set = anneal(
        &encoded.assembled.model,
        cfg.num_samples,
        cfg.sweeps,
        cfg.schedule,
        cfg.seed,
    )?;
    let decoded = decode(&set, &encoded.assembled.decode);
    let sample_ms = t1.elapsed().as_millis();

    let zero = rint(0);
    let mut zero_energy_sound = true;
    let mut identity = encoded.unit_gap.as_ref().map(|_| true);
    for (i, ds) in decoded.samples.iter().enumerate() {
        let raw = encoded.raw_energy(&set, i)?;
        let sat = check_sat(&ds.assignment, problem);
        if raw == zero && !sat {
            zero_energy_sound = false;
        }
        if let (Some(g), Some(ok)) = (&encoded.unit_gap, identity.as_mut()) {
            if ds.broken_chains.is_empty() && sat {
                if let MaxSatCost::Cost(c) = maxsat_cost(&ds.assignment, problem) {
                    let semantic = encoded.semantic_energy(&ds.assignment)?;
                    if semantic != g * rint(c as i64) {
                        *ok = false;
                    }
                }
            }
        }
    }

    let weighted = problem.soft_clauses().next().is_some();
    let outcome = if weighted {
        let mut best: Option<(u64, &BTreeMap<u32, bool>)> = None;
        for ds in &decoded.samples {
            if let MaxSatCost::Cost(c) = maxsat_cost(&ds.assignment, problem) {
                if best.map(|(b, _)| c < b).unwrap_or(true) {
                    best = Some((c, &ds.assignment));
                }
            }
        }
        match best {
            Some((cost, a)) => Outcome::BestCost {
                assignment: problem_assignment(problem.n_vars, a),
                cost,
            },
            None => Outcome::Unknown {
                best_energy: set.best_energy(),
            },
        }
    } else {
        match decoded
            .samples
            .iter()
            .find(|ds| check_sat(&ds.assignment, problem))
        {
            Some(ds) => Outcome::Satisfied {
                assignment: problem_assignment(problem.n_vars, &ds.assignment),
            },
            None => Outcome::Unknown {
                best_energy: set.best_energy(),
            },
        }
    };
    let stats = stats_of(&encoded, encode_ms, sample_ms);
    Ok(PipelineResult {
        outcome,
        encoded,
        decoded,
        zero_energy_sound,
        energy_identity: identity,
        stats,
    })
}

/// Solve a cardinality-constraint instance end to end (constraint-level MaxSAT
/// cost, matching the penalty encoding's objective).
pub fn solve_instance(
    inst: &ConstraintInstance,
    cache: &CellCache,
    cfg: &PipelineConfig,
) -> Result<PipelineResult> {
    let t0 = Instant::now();
    let encoded = encode_instance(inst, cache, cfg)?;
    let encode_ms = t0.elapsed().as_millis();
    let t1 = Instant::now();
    let set = anneal(
        &encoded.assembled.model,
        cfg.num_samples,
        cfg.sweeps,
        cfg.schedule,
        cfg.seed,
    )?;
    let decoded = decode(&set, &encoded.assembled.decode);
    let sample_ms = t1.elapsed().as_millis();

    let to_bools = |a: &BTreeMap<u32, bool>| -> Vec<bool> {
        (1..=inst.n_vars as u32)
            .map(|v| a.get(&v).copied().unwrap_or(false))
            .collect()
    };
    let zero = rint(0);
    let mut zero_energy_sound = true;
    let mut identity = encoded.unit_gap.as_ref().map(|_| true);
    let mut costs: Vec<Option<u64>> = Vec::with_capacity(decoded.samples.len());
    for (i, ds) in decoded.samples.iter().enumerate() {
        let cost = inst.cost(&to_bools(&ds.assignment));
        costs.push(cost);
        let raw = encoded.raw_energy(&set, i)?;
        if raw == zero && cost != Some(0) {
            zero_energy_sound = false;
        }
        if let (Some(g), Some(ok)) = (&encoded.unit_gap, identity.as_mut()) {
            if ds.broken_chains.is_empty() {
                if let Some(c) = cost {
                    let semantic = encoded.semantic_energy(&ds.assignment)?;
                    if semantic != g * rint(c as i64) {
                        *ok = false;
                    }
                }
            }
        }
    }

    let weighted = inst.constraints.iter().any(|c| c.weight.is_some());
    let outcome = if weighted {
        let best = decoded
            .samples
            .iter()
            .zip(&costs)
            .filter_map(|(ds, c)| c.map(|c| (c, &ds.assignment)))
            .min_by_key(|(c, _)| *c);
        match best {
            Some((cost, a)) => Outcome::BestCost {
                assignment: problem_assignment(inst.n_vars, a),
                cost,
            },
            None => Outcome::Unknown {
                best_energy: set.best_energy(),
            },
        }
    } else {
        match decoded
            .samples
            .iter()
            .zip(&costs)
            .find(|(_, c)| **c == Some(0))
        {
            Some((ds, _)) => Outcome::Satisfied {
                assignment: problem_assignment(inst.n_vars, &ds.assignment),
            },
            None => Outcome::Unknown {
                best_energy: set.best_energy(),
            },
        }
    };
    let stats = stats_of(&encoded, encode_ms, sample_ms);
    Ok(PipelineResult {
        outcome,
        encoded,
        decoded,
        zero_energy_sound,
        energy_identity: identity,
        stats,
    })
}
