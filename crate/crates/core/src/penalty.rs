//! Penalty functions: Ising models that encode Boolean functions.
//!
//! A penalty function for `F(x)` over input qubits `x` and ancilla qubits `a`
//! satisfies `min_a P(x,a) = 0` when `F(x) = ⊤` and `min_a P(x,a) ≥ g_min` when
//! `F(x) = ⊥`, for a certified gap `g_min > 0`. It is *exact* when every
//! countermodel attains the gap exactly — the property required for weighted MaxSAT
//! composition.
//!
//! This module provides the algebra on penalty functions: brute-force verification,
//! spin reversal (input negation), weighted sums, and composition with equivalence
//! chains.

use std::collections::BTreeSet;
use std::sync::Arc;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::boolfn::TruthTable;
use crate::chimera::Topology;
use crate::ising::IsingModel;
use crate::rat::{rint, Rat};
use crate::{Error, Result};

/// An Ising model with designated input/ancilla qubits and a certified gap.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyFunction {
    pub model: IsingModel,
    /// Qubits carrying `x₁…xₙ`, in variable order.
    pub inputs: Vec<u32>,
    /// Qubits carrying the ancillas `a₁…a_h`.
    pub ancillas: Vec<u32>,
    /// Certified gap `g_min`.
    pub gap: Rat,
    /// Whether every countermodel attains the gap exactly.
    pub exact: bool,
}

/// Sign of an equivalence chain between two copies of one variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainSign {
    /// `1 − z z′`: copies agree.
    Plus,
    /// `1 + z z′`: copies carry opposite spins (a negated copy).
    Minus,
}

/// Outcome of brute-force verification of a penalty function against a truth table.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// `min_a P(x, a)` per input assignment mask.
    pub min_energy: Vec<Rat>,
    /// All models have minimum exactly 0.
    pub models_at_zero: bool,
    /// Largest `g_min` satisfying the countermodel condition (None when `F ≡ ⊤`).
    pub true_gap: Option<Rat>,
    /// All countermodels attain the gap exactly.
    pub exact: bool,
    /// Verification against the declared gap (and declared exactness) succeeded.
    pub pass: bool,
}

impl PenaltyFunction {
    fn all_qubits(&self) -> BTreeSet<u32> {
        self.inputs.iter().chain(&self.ancillas).copied().collect()
    }

    /// Negate the variable carried by qubit `q` (Property 2, the spin-reversal
    /// transform): the bias of `q` and every coupling touching `q` flip sign. The
    /// gap and exactness are unchanged; the result encodes `F` with that variable
    /// negated.
    pub fn spin_reversal(&self, q: u32) -> Result<PenaltyFunction> {
        if !self.inputs.contains(&q) && !self.ancillas.contains(&q) {
            return Err(Error::Domain(format!(
                "qubit {q} is not an input or ancilla of this penalty function"
            )));
        }
        let mut out = self.clone();
        if let Some(b) = out.model.biases.get_mut(&q) {
            *b = -b.clone();
        }
        for (&(a, b), v) in out.model.couplings.iter_mut() {
            if a == q || b == q {
                *v = -v.clone();
            }
        }
        Ok(out)
    }

    /// Uniformly scale all coefficients by `c > 0`; gap scales with `c`, ground
    /// states and exactness are unchanged.
    pub fn scaled(&self, c: &Rat) -> PenaltyFunction {
        PenaltyFunction {
            model: self.model.scaled(c),
            inputs: self.inputs.clone(),
            ancillas: self.ancillas.clone(),
            gap: &self.gap * c,
            exact: self.exact,
        }
    }

    /// File representation (Chimera-hosted models only).
    pub fn to_json(&self) -> Result<serde_json::Value> {
        Ok(serde_json::json!({
            "model": self.model.to_json()?,
            "inputs": self.inputs,
            "ancillas": self.ancillas,
            "gap": crate::rat::format_rat(&self.gap),
            "exact": self.exact,
        }))
    }

    /// Parse the penalty-function JSON format.
    pub fn from_json(v: &serde_json::Value) -> Result<PenaltyFunction> {
        let bad = |msg: &str| Error::Parse { line: 0, msg: msg.to_string() };
        let qubits = |key: &str| -> Result<Vec<u32>> {
            v.get(key)
                .and_then(serde_json::Value::as_array)
                .map(|a| a.iter().filter_map(serde_json::Value::as_u64).map(|x| x as u32).collect())
                .ok_or_else(|| bad(&format!("missing {key}")))
        };
        Ok(PenaltyFunction {
            model: IsingModel::from_json(v.get("model").ok_or_else(|| bad("missing model"))?)?,
            inputs: qubits("inputs")?,
            ancillas: qubits("ancillas")?,
            gap: crate::rat::parse_rat(
                v.get("gap").and_then(serde_json::Value::as_str).ok_or_else(|| bad("missing gap"))?,
            )?,
            exact: v.get("exact").and_then(serde_json::Value::as_bool).unwrap_or(false),
        })
    }

    /// Brute-force verification against a truth table (Def. 1 plus the exactness
    /// condition). Exhaustive over all `2^(n+h)` assignments, so `n + h ≤ 26`.
    pub fn verify(&self, tt: &TruthTable) -> Result<VerificationReport> {
        let n = self.inputs.len();
        let h = self.ancillas.len();
        if tt.arity() as usize != n {
            return Err(Error::Domain(format!(
                "truth table arity {} does not match {n} inputs",
                tt.arity()
            )));
        }
        if n + h > 26 {
            return Err(Error::Capacity(format!(
                "{} qubits exceed the exhaustive verification bound of 26",
                n + h
            )));
        }
        let qubits = self.all_qubits();
        if qubits.len() != n + h {
            return Err(Error::Domain("inputs and ancillas must be disjoint".into()));
        }
        for q in self.model.active_qubits() {
            if !qubits.contains(&q) {
                return Err(Error::Domain(format!(
                    "model touches qubit {q} outside the declared inputs/ancillas"
                )));
            }
        }

        // Integer-scaled evaluation: one common denominator, then i128 arithmetic.
        let mut den = self.model.offset.denom().clone();
        for v in self.model.biases.values().chain(self.model.couplings.values()) {
            den = num::integer::lcm(den, v.denom().clone());
        }
        let den_rat = Rat::new(den.clone(), 1.into());
        let to_int = |v: &Rat| -> i128 {
            num::ToPrimitive::to_i128((v * &den_rat).numer()).expect("coefficient overflow")
        };
        // Spin index: inputs first (bit i of the combined mask), then ancillas.
        let pos: std::collections::BTreeMap<u32, usize> = self
            .inputs
            .iter()
            .chain(&self.ancillas)
            .enumerate()
            .map(|(i, &q)| (q, i))
            .collect();
        let off = to_int(&self.model.offset);
        let biases: Vec<(usize, i128)> = self
            .model
            .biases
            .iter()
            .map(|(&q, v)| (pos[&q], to_int(v)))
            .collect();
        let coups: Vec<(usize, usize, i128)> = self
            .model
            .couplings
            .iter()
            .map(|(&(a, b), v)| (pos[&a], pos[&b], to_int(v)))
            .collect();
        let eval = |mask: u32| -> i128 {
            let mut e = off;
            for &(i, v) in &biases {
                e += if mask >> i & 1 == 1 { v } else { -v };
            }
            for &(i, j, v) in &coups {
                e += if (mask >> i & 1) == (mask >> j & 1) { v } else { -v };
            }
            e
        };

        let mut min_energy = Vec::with_capacity(1 << n);
        for x in 0u32..(1 << n) {
            let mut best = i128::MAX;
            for a in 0u32..(1 << h) {
                best = best.min(eval(x | (a << n)));
            }
            min_energy.push(Rat::new(best.into(), den.clone()));
        }

        let models_at_zero = tt.models().iter().all(|&x| min_energy[x as usize].is_zero());
        let counter = tt.countermodels();
        let true_gap = counter
            .iter()
            .map(|&x| min_energy[x as usize].clone())
            .min();
        let exact = match &true_gap {
            Some(g) => counter.iter().all(|&x| &min_energy[x as usize] == g) && *g > Rat::zero(),
            None => false,
        };
        let gap_ok = match &true_gap {
            Some(g) => *g >= self.gap,
            None => true,
        };
        let pass = models_at_zero && gap_ok && (!self.exact || exact);
        Ok(VerificationReport {
            min_energy,
            models_at_zero,
            true_gap,
            exact,
            pass,
        })
    }
}

/// Weighted sum of penalty functions sharing a graph (Property 3).
///
/// Inputs may be shared between parts; ancillas must be private to their part. The
/// declared gap is the lower bound `min_k w_k·g_min^k`. Coefficients leaving the
/// admissible range are reported as a range error, never clipped — rescaling is the
/// caller's explicit decision via `IsingModel::normalize`.
pub fn combine_weighted(parts: &[(PenaltyFunction, Rat)]) -> Result<PenaltyFunction> {
    if parts.is_empty() {
        return Err(Error::Domain("cannot combine an empty part list".into()));
    }
    let graph = parts[0].0.model.graph.clone();
    let mut model = IsingModel::new(graph.clone());
    let mut inputs: Vec<u32> = Vec::new();
    let mut ancillas: Vec<u32> = Vec::new();
    let mut gap: Option<Rat> = None;
    for (pf, w) in parts {
        if *w <= Rat::zero() {
            return Err(Error::Domain("combination weights must be positive".into()));
        }
        if pf.model.graph.as_ref() != graph.as_ref() {
            return Err(Error::Domain("all parts must live on the same graph".into()));
        }
        for &a in &pf.ancillas {
            if ancillas.contains(&a) || inputs.contains(&a) {
                return Err(Error::Domain(format!("ancilla qubit {a} is not private to its part")));
            }
            ancillas.push(a);
        }
        for &x in &pf.inputs {
            if ancillas.contains(&x) {
                return Err(Error::Domain(format!("input qubit {x} collides with an ancilla")));
            }
            if !inputs.contains(&x) {
                inputs.push(x);
            }
        }
        model.offset += &pf.model.offset * w;
        for (&q, v) in &pf.model.biases {
            model.add_bias(q, v * w)?;
        }
        for (&(a, b), v) in &pf.model.couplings {
            model.add_coupling(a, b, v * w)?;
        }
        let part_gap = &pf.gap * w;
        gap = Some(match gap {
            None => part_gap,
            Some(g) => g.min(part_gap),
        });
    }
    if let Some((location, value)) = model.range_violation() {
        return Err(Error::Range {
            location,
            value: crate::rat::format_rat(&value),
        });
    }
    let exact = parts.len() == 1 && parts[0].0.exact;
    Ok(PenaltyFunction {
        model,
        inputs,
        ancillas,
        gap: gap.unwrap(),
        exact,
    })
}

/// The 2-qubit chain penalty: `1 − z z′` (Plus, equivalence) or `1 + z z′` (Minus,
/// negated equivalence). Gap exactly 2, exact.
pub fn chain_penalty(graph: Arc<Topology>, q1: u32, q2: u32, sign: ChainSign) -> Result<PenaltyFunction> {
    if !graph.has_edge(q1, q2) {
        return Err(Error::Domain(format!("({q1},{q2}) is not an edge")));
    }
    let mut model = IsingModel::new(graph);
    model.offset = rint(1);
    let j = match sign {
        ChainSign::Plus => rint(-1),
        ChainSign::Minus => rint(1),
    };
    model.add_coupling(q1, q2, j)?;
    Ok(PenaltyFunction {
        model,
        inputs: vec![q1, q2],
        ancillas: vec![],
        gap: rint(2),
        exact: true,
    })
}

/// The 1-qubit pin penalty: `1 − z` when `value` (models `z = +1`) or `1 + z`
/// otherwise. Gap exactly 2, exact. Used to pin the mapped output ⊤.
pub fn unit_pin(graph: Arc<Topology>, q: u32, value: bool) -> Result<PenaltyFunction> {
    if !graph.is_enabled(q) {
        return Err(Error::Domain(format!("qubit {q} is not enabled")));
    }
    let mut model = IsingModel::new(graph);
    model.offset = rint(1);
    model.add_bias(q, if value { rint(-1) } else { rint(1) })?;
    Ok(PenaltyFunction {
        model,
        inputs: vec![q],
        ancillas: vec![],
        gap: rint(2),
        exact: true,
    })
}

/// A penalty function assembled from disjoint parts joined by variable chains, with
/// the chain-connected qubit groups recorded for decoding.
#[derive(Debug, Clone)]
pub struct CompositePenalty {
    pub penalty: PenaltyFunction,
    /// Chain-connected groups of qubit copies of one logical variable.
    pub groups: Vec<Vec<u32>>,
}

/// Sum disjoint sub-penalties plus `chain_weight · (1 ∓ z z′)` per chain edge.
///
/// The declared gap is the Property 4 bound `min(min_k g_min^k, 2·chain_weight)`.
pub fn compose_with_chains(
    parts: &[PenaltyFunction],
    chain_edges: &[(u32, u32, ChainSign)],
    chain_weight: &Rat,
) -> Result<CompositePenalty> {
    if parts.is_empty() {
        return Err(Error::Domain("cannot compose an empty part list".into()));
    }
    if *chain_weight < rint(1) {
        return Err(Error::Domain("chain weight must be at least 1".into()));
    }
    let graph = parts[0].model.graph.clone();
    // Disjointness of part qubit sets.
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    for pf in parts {
        for q in pf.all_qubits() {
            if !seen.insert(q) {
                return Err(Error::Domain(format!("parts overlap on qubit {q}")));
            }
        }
    }
    let mut model = IsingModel::new(graph);
    let mut inputs = Vec::new();
    let mut ancillas = Vec::new();
    let mut gap: Option<Rat> = None;
    for pf in parts {
        if pf.model.graph.as_ref() != model.graph.as_ref() {
            return Err(Error::Domain("all parts must live on the same graph".into()));
        }
        model.offset += &pf.model.offset;
        for (&q, v) in &pf.model.biases {
            model.add_bias(q, v.clone())?;
        }
        for (&(a, b), v) in &pf.model.couplings {
            model.add_coupling(a, b, v.clone())?;
        }
        inputs.extend(&pf.inputs);
        ancillas.extend(&pf.ancillas);
        gap = Some(match gap {
            None => pf.gap.clone(),
            Some(g) => g.min(pf.gap.clone()),
        });
    }
    for &(q1, q2, sign) in chain_edges {
        let chain = chain_penalty(model.graph.clone(), q1, q2, sign)?;
        model.offset += &chain.model.offset * chain_weight;
        for (&(a, b), v) in &chain.model.couplings {
            model.add_coupling(a, b, v * chain_weight)?;
        }
    }
    let gap = gap
        .unwrap()
        .min(rint(2) * chain_weight);

    // Union chained qubits into variable-copy groups.
    let mut parent: std::collections::BTreeMap<u32, u32> = Default::default();
    fn find(parent: &mut std::collections::BTreeMap<u32, u32>, q: u32) -> u32 {
        let p = *parent.entry(q).or_insert(q);
        if p == q {
            q
        } else {
            let r = find(parent, p);
            parent.insert(q, r);
            r
        }
    }
    for &(q1, q2, _) in chain_edges {
        let (r1, r2) = (find(&mut parent, q1), find(&mut parent, q2));
        if r1 != r2 {
            parent.insert(r1, r2);
        }
    }
    let mut groups: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
    let keys: Vec<u32> = parent.keys().copied().collect();
    for q in keys {
        let r = find(&mut parent, q);
        groups.entry(r).or_default().push(q);
    }

    Ok(CompositePenalty {
        penalty: PenaltyFunction {
            model,
            inputs,
            ancillas,
            gap,
            exact: false,
        },
        groups: groups.into_values().collect(),
    })
}

/// The worked-example penalty functions from the paper, used as fixtures and
/// library seeds.
pub mod examples {
    use super::*;
    use crate::chimera::{ChimeraGraph, CustomGraph};
    use crate::rat::rat;

    /// Equivalence `x₁ ↔ x₂` on a single edge: `P = 1 − x₁x₂`, gap 2 (Example 2).
    pub fn equivalence_chain() -> PenaltyFunction {
        let graph = Arc::new(Topology::Custom(CustomGraph::complete(2)));
        chain_penalty(graph, 0, 1, ChainSign::Plus).unwrap()
    }

    /// AND relation `x₃ ↔ (x₁ ∧ x₂)` on the 3-clique, no ancilla (Example 3):
    /// `P = 3/2 − ½x₁ − ½x₂ + x₃ + ½x₁x₂ − x₁x₃ − x₂x₃`, gap 2.
    pub fn and_k3() -> PenaltyFunction {
        let graph = Arc::new(Topology::Custom(CustomGraph::complete(3)));
        let mut m = IsingModel::new(graph);
        m.offset = rat(3, 2);
        m.add_bias(0, rat(-1, 2)).unwrap();
        m.add_bias(1, rat(-1, 2)).unwrap();
        m.add_bias(2, rint(1)).unwrap();
        m.add_coupling(0, 1, rat(1, 2)).unwrap();
        m.add_coupling(0, 2, rint(-1)).unwrap();
        m.add_coupling(1, 2, rint(-1)).unwrap();
        PenaltyFunction {
            model: m,
            inputs: vec![0, 1, 2],
            ancillas: vec![],
            gap: rint(2),
            exact: false,
        }
    }

    /// AND relation on a Chimera tile with one ancilla (Example 3, Fig. 4(a)):
    /// `P = 5/2 − ½x₁ − ½x₂ + x₃ + ½x₁x₂ − x₁x₃ − x₂a − x₃a`, gap 2.
    ///
    /// Layout on tile qubits: x₁ = 0 (vertical), x₂ = 4, x₃ = 5 (horizontal),
    /// a = 1 (vertical).
    pub fn and_tile() -> PenaltyFunction {
        let graph = Arc::new(Topology::Chimera(
            ChimeraGraph::new(1, 1, 4, Default::default()).unwrap(),
        ));
        and_tile_on(graph)
    }

    /// `and_tile` placed on an arbitrary Chimera graph's first tile.
    pub fn and_tile_on(graph: Arc<Topology>) -> PenaltyFunction {
        let mut m = IsingModel::new(graph);
        m.offset = rat(5, 2);
        m.add_bias(0, rat(-1, 2)).unwrap();
        m.add_bias(4, rat(-1, 2)).unwrap();
        m.add_bias(5, rint(1)).unwrap();
        m.add_coupling(0, 4, rat(1, 2)).unwrap();
        m.add_coupling(0, 5, rint(-1)).unwrap();
        m.add_coupling(4, 1, rint(-1)).unwrap();
        m.add_coupling(5, 1, rint(-1)).unwrap();
        PenaltyFunction {
            model: m,
            inputs: vec![0, 4, 5],
            ancillas: vec![1],
            gap: rint(2),
            exact: false,
        }
    }

    /// XOR relation `x₃ ↔ (x₁ ⊕ x₂)` on a tile with three ancillas (Example 4):
    /// `P = 5 + x₃ + a₂ − a₃ + x₁a₁ − x₁a₂ − x₁a₃ − x₂a₁ − x₂a₂ − x₂a₃ + x₃a₂ − x₃a₃`,
    /// gap 2. Inputs on the vertical shore (0,1,2), ancillas horizontal (4,5,6).
    pub fn xor_tile() -> PenaltyFunction {
        let graph = Arc::new(Topology::Chimera(
            ChimeraGraph::new(1, 1, 4, Default::default()).unwrap(),
        ));
        xor_tile_at(graph, [0, 1, 2], [4, 5, 6])
    }

    /// `xor_tile` with explicit input/ancilla qubits (inputs on one shore, ancillas
    /// on the other of a single tile).
    pub fn xor_tile_at(graph: Arc<Topology>, x: [u32; 3], a: [u32; 3]) -> PenaltyFunction {
        let mut m = IsingModel::new(graph);
        m.offset = rint(5);
        m.add_bias(x[2], rint(1)).unwrap();
        m.add_bias(a[1], rint(1)).unwrap();
        m.add_bias(a[2], rint(-1)).unwrap();
        m.add_coupling(x[0], a[0], rint(1)).unwrap();
        m.add_coupling(x[0], a[1], rint(-1)).unwrap();
        m.add_coupling(x[0], a[2], rint(-1)).unwrap();
        m.add_coupling(x[1], a[0], rint(-1)).unwrap();
        m.add_coupling(x[1], a[1], rint(-1)).unwrap();
        m.add_coupling(x[1], a[2], rint(-1)).unwrap();
        m.add_coupling(x[2], a[1], rint(1)).unwrap();
        m.add_coupling(x[2], a[2], rint(-1)).unwrap();
        PenaltyFunction {
            model: m,
            inputs: x.to_vec(),
            ancillas: a.to_vec(),
            gap: rint(2),
            exact: false,
        }
    }

    /// OR relation on a tile (Example 5): the spin reversal of `and_tile` on all of
    /// x₁, x₂, x₃: `P = 5/2 + ½x₁ + ½x₂ − x₃ + ½x₁x₂ − x₁x₃ + x₂a + x₃a`, gap 2.
    pub fn or_tile() -> PenaltyFunction {
        and_tile()
            .spin_reversal(0)
            .and_then(|p| p.spin_reversal(4))
            .and_then(|p| p.spin_reversal(5))
            .unwrap()
    }
}
