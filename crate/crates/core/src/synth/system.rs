//! The constraint-system representation shared by the Shannon and
//! variable-elimination builders, and the witness branch-and-bound that maximizes
//! the gap over it.
//!
//! A system is a linear program over `(θ, g_min)` (plus auxiliary unknowns such as
//! message variables) together with *witness slots*: discrete choices — one ancilla
//! witness per model (and per countermodel when exactness is required) — each of
//! which activates a set of equality rows. With every slot fixed the system is a
//! pure LP; the branch-and-bound searches the slot choices, using the LP relaxation
//! (chosen equalities only) as an upper bound on the achievable gap.

use std::time::{Duration, Instant};

use num::Zero;

use crate::lp::{Lp, LpResult, Rel};
use crate::penalty::PenaltyFunction;
use crate::rat::Rat;
use crate::{Error, Result};

/// One linear row `Σ coeffs·v  rel  rhs`.
#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<(usize, Rat)>,
    pub rel: Rel,
    pub rhs: Rat,
}

impl Row {
    pub fn ge(coeffs: Vec<(usize, Rat)>, rhs: Rat) -> Row {
        Row { coeffs, rel: Rel::Ge, rhs }
    }

    pub fn eq(coeffs: Vec<(usize, Rat)>, rhs: Rat) -> Row {
        Row { coeffs, rel: Rel::Eq, rhs }
    }

    fn lhs_at(&self, x: &[Rat]) -> Rat {
        self.coeffs.iter().map(|(j, c)| c * &x[*j]).sum()
    }

    /// How far the row is from holding at `x` (0 when satisfied).
    fn violation(&self, x: &[Rat]) -> Rat {
        let lhs = self.lhs_at(x);
        match self.rel {
            Rel::Ge => {
                if lhs < self.rhs {
                    &self.rhs - lhs
                } else {
                    Rat::zero()
                }
            }
            Rel::Le => {
                if lhs > self.rhs {
                    lhs - &self.rhs
                } else {
                    Rat::zero()
                }
            }
            Rel::Eq => (lhs - &self.rhs).abs(),
        }
    }

    /// Absolute residual |lhs − rhs| regardless of sense.
    fn residual(&self, x: &[Rat]) -> Rat {
        (self.lhs_at(x) - &self.rhs).abs()
    }
}

use num::Signed;

/// A discrete witness choice: activating candidate `k` adds `candidates[k]` as
/// equality rows.
#[derive(Debug, Clone)]
pub struct Slot {
    /// The assignment mask this slot belongs to (for diagnostics).
    pub assignment: u32,
    pub candidates: Vec<Vec<Row>>,
}

/// Mapping from LP unknowns back to Ising coefficients.
#[derive(Debug, Clone)]
pub struct VarLayout {
    /// Index of the offset unknown `o`.
    pub offset: usize,
    /// `(qubit, unknown index)` for each bias `θ_q`.
    pub qubit_vars: Vec<(u32, usize)>,
    /// `(edge, unknown index)` for each coupling `θ_qr`, endpoints ordered.
    pub edge_vars: Vec<((u32, u32), usize)>,
    /// Index of the gap unknown `g_min`.
    pub gap: usize,
}

/// A gap-maximization system: LP skeleton plus witness slots.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub nvars: usize,
    pub bounds: Vec<(Option<Rat>, Option<Rat>)>,
    /// Rows always present in every LP (equalities and g-bounding rows).
    pub base_rows: Vec<Row>,
    /// Inequality rows pulled in lazily when violated.
    pub lazy_rows: Vec<Row>,
    pub slots: Vec<Slot>,
    pub layout: VarLayout,
    pub graph: std::sync::Arc<crate::chimera::Topology>,
    pub inputs: Vec<u32>,
    pub ancillas: Vec<u32>,
    pub require_exact: bool,
}

/// Search budgets for [`maximize_gap`]. The search is exact when neither budget
/// triggers; otherwise it returns the best verified incumbent found so far.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub node_budget: usize,
    pub time_budget: Option<Duration>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            node_budget: 400,
            time_budget: Some(Duration::from_secs(30)),
        }
    }
}

/// Outcome of gap maximization.
#[derive(Debug, Clone)]
pub enum SynthResult {
    Found(PenaltyFunction),
    /// No witness profile admits `g_min > 0`.
    Infeasible,
}

struct Searcher<'a> {
    sys: &'a ConstraintSystem,
    cfg: &'a SearchConfig,
    /// Indices into `lazy_rows` currently part of every LP (grows monotonically;
    /// rows are globally valid, so sharing the pool across nodes is sound).
    pool: Vec<usize>,
    in_pool: Vec<bool>,
    incumbent: Option<(Rat, Vec<Rat>)>,
    nodes: usize,
    deadline: Option<Instant>,
    exhausted: bool,
}

enum NodeLp {
    Infeasible,
    Unbounded,
    Optimal(Rat, Vec<Rat>),
}

impl<'a> Searcher<'a> {
    fn out_of_budget(&mut self) -> bool {
        if self.nodes >= self.cfg.node_budget {
            self.exhausted = true;
            return true;
        }
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                self.exhausted = true;
                return true;
            }
        }
        false
    }

    /// Solve the node LP, adding violated lazy rows until none remain (or the LP
    /// is unbounded, in which case separation has no point to cut).
    fn node_lp(&mut self, chosen: &[Option<usize>]) -> Result<NodeLp> {
        loop {
            let mut lp = Lp::new(self.sys.nvars);
            lp.set_objective(self.sys.layout.gap, crate::rat::rint(1));
            for (j, (l, u)) in self.sys.bounds.iter().enumerate() {
                lp.set_bounds(j, l.clone(), u.clone());
            }
            let mut add = |row: &Row| {
                lp.add_row(row.coeffs.iter().cloned(), row.rel, row.rhs.clone());
            };
            for row in &self.sys.base_rows {
                add(row);
            }
            for &i in &self.pool {
                add(&self.sys.lazy_rows[i]);
            }
            for (s, c) in chosen.iter().enumerate() {
                if let Some(k) = c {
                    for row in &self.sys.slots[s].candidates[*k] {
                        add(row);
                    }
                }
            }
            match lp.solve()? {
                LpResult::Infeasible => return Ok(NodeLp::Infeasible),
                LpResult::Unbounded => return Ok(NodeLp::Unbounded),
                LpResult::Optimal { objective, x } => {
                    // Separation: pull in every violated absent lazy row (the LP
                    // re-solve dominates, so batching beats one-row-at-a-time).
                    let mut violated: Vec<usize> = Vec::new();
                    for (i, row) in self.sys.lazy_rows.iter().enumerate() {
                        if !self.in_pool[i] && !row.violation(&x).is_zero() {
                            violated.push(i);
                        }
                    }
                    if violated.is_empty() {
                        return Ok(NodeLp::Optimal(objective, x));
                    }
                    for i in violated {
                        self.pool.push(i);
                        self.in_pool[i] = true;
                    }
                }
            }
        }
    }

    fn search(&mut self, chosen: &mut Vec<Option<usize>>) -> Result<()> {
        if self.out_of_budget() {
            return Ok(());
        }
        self.nodes += 1;
        let (bound, point) = match self.node_lp(chosen)? {
            NodeLp::Infeasible => return Ok(()),
            NodeLp::Unbounded => {
                // No finite relaxation yet (typically the root): branch on the
                // first unassigned slot in plain candidate order.
                let slot = match chosen.iter().position(Option::is_none) {
                    Some(s) => s,
                    None => {
                        return Err(Error::Internal(
                            "fully assigned witness system cannot be unbounded".into(),
                        ))
                    }
                };
                for k in 0..self.sys.slots[slot].candidates.len() {
                    chosen[slot] = Some(k);
                    self.search(chosen)?;
                    chosen[slot] = None;
                    if self.exhausted {
                        return Ok(());
                    }
                }
                return Ok(());
            }
            NodeLp::Optimal(g, x) => (g, x),
        };
        if bound <= Rat::zero() {
            return Ok(());
        }
        if let Some((inc, _)) = &self.incumbent {
            if bound <= *inc {
                return Ok(());
            }
        }
        // Tight candidates per unassigned slot at the relaxed optimum.
        let mut branch: Option<(usize, usize)> = None; // (tight count, slot)
        let mut all_tight = true;
        for (s, c) in chosen.iter().enumerate() {
            if c.is_some() {
                continue;
            }
            let tight = self.sys.slots[s]
                .candidates
                .iter()
                .filter(|rows| rows.iter().all(|r| r.residual(&point).is_zero()))
                .count();
            if tight == 0 {
                all_tight = false;
            }
            if branch.map(|(t, _)| tight < t).unwrap_or(true) {
                branch = Some((tight, s));
            }
        }
        let Some((_, slot)) = branch else {
            // Every slot assigned: the LP optimum is itself a complete solution.
            self.incumbent = Some((bound, point));
            return Ok(());
        };
        if all_tight {
            // Solution lifting: the relaxed optimum already satisfies a witness
            // equality in every remaining slot, so it is feasible and — being the
            // relaxation bound — optimal for this subtree.
            self.incumbent = Some((bound, point));
            return Ok(());
        }
        // Branch: candidates ordered by residual (closest to equality first).
        let mut order: Vec<(Rat, usize)> = self.sys.slots[slot]
            .candidates
            .iter()
            .enumerate()
            .map(|(k, rows)| (rows.iter().map(|r| r.residual(&point)).sum::<Rat>(), k))
            .collect();
        order.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, k) in order {
            chosen[slot] = Some(k);
            self.search(chosen)?;
            chosen[slot] = None;
            if self.exhausted {
                return Ok(());
            }
            if let Some((inc, _)) = &self.incumbent {
                if bound <= *inc {
                    break; // children cannot beat the subtree bound
                }
            }
        }
        Ok(())
    }
}

/// Maximize `g_min` over the system by branch-and-bound on witness slots with an
/// exact-LP relaxation at each node. Deterministic; `Infeasible` iff no witness
/// profile admits a positive gap.
pub fn maximize_gap(sys: &ConstraintSystem, cfg: &SearchConfig) -> Result<SynthResult> {
    let mut searcher = Searcher {
        sys,
        cfg,
        pool: Vec::new(),
        in_pool: vec![false; sys.lazy_rows.len()],
        incumbent: None,
        nodes: 0,
        deadline: cfg.time_budget.map(|d| Instant::now() + d),
        exhausted: false,
    };
    let mut chosen = vec![None; sys.slots.len()];
    searcher.search(&mut chosen)?;
    match searcher.incumbent {
        Some((gap, x)) if gap > Rat::zero() => Ok(SynthResult::Found(extract(sys, gap, &x)?)),
        _ => Ok(SynthResult::Infeasible),
    }
}

/// Turn an LP point into the corresponding penalty function.
fn extract(sys: &ConstraintSystem, gap: Rat, x: &[Rat]) -> Result<PenaltyFunction> {
    let mut model = crate::ising::IsingModel::new(sys.graph.clone());
    model.offset = x[sys.layout.offset].clone();
    for (q, j) in &sys.layout.qubit_vars {
        if !x[*j].is_zero() {
            model.add_bias(*q, x[*j].clone())?;
        }
    }
    for ((a, b), j) in &sys.layout.edge_vars {
        if !x[*j].is_zero() {
            model.add_coupling(*a, *b, x[*j].clone())?;
        }
    }
    Ok(PenaltyFunction {
        model,
        inputs: sys.inputs.clone(),
        ancillas: sys.ancillas.clone(),
        gap,
        exact: sys.require_exact,
    })
}
