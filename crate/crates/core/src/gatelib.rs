//! Cell library: canonical penalty functions with footprints, plus Boolean
//! matching (lookup by canonical form, instantiation by transform).
//!
//! Cells are keyed by the NP-canonical form of their truth table (input
//! permutation and negation only — complementing a relation table would swap
//! models and countermodels, which no coefficient transform realizes; output
//! complementation of a *function* is instead a negation of its relation's output
//! variable). Matching canonicalizes the requested table and replays the transform
//! as qubit relabelings plus spin reversals.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::boolfn::{np_canonical, NPNTransform, TruthTable};
use crate::penalty::PenaltyFunction;
use crate::rat::{format_rat, parse_rat};
use crate::synth::{synthesize, Footprint, SynthConfig};
use crate::{Error, Result};

/// One library cell: a verified penalty function for a canonical truth table on a
/// footprint, in local footprint coordinates.
#[derive(Debug, Clone)]
pub struct GateCell {
    /// NP-canonical truth table the penalty encodes.
    pub tt: TruthTable,
    pub footprint: Footprint,
    /// Penalty in the footprint's local qubit coordinates; carries gap/exactness.
    pub penalty: PenaltyFunction,
}

impl GateCell {
    /// Qubits consumed when this cell is placed: inputs + ancillas.
    pub fn qubit_cost(&self) -> usize {
        self.penalty.inputs.len() + self.penalty.ancillas.len()
    }

    /// Wrap an existing verified penalty for `tt` as a cell, converting it to
    /// canonical coordinates.
    pub fn from_penalty(penalty: PenaltyFunction, tt: &TruthTable, footprint: Footprint) -> Result<GateCell> {
        let (canon, t) = np_canonical(tt)?;
        // `t.apply(tt) = canon`; specializing with `t⁻¹` re-targets the penalty
        // from `tt` to `canon`.
        let canonical_penalty = specialize(&penalty, &t.inverse())?;
        Ok(GateCell {
            tt: canon,
            footprint,
            penalty: canonical_penalty,
        })
    }
}

/// Re-target a penalty: given `P` encoding `G` and a transform with
/// `t.apply(F) = G`, produce the penalty encoding `F` (qubit roles permuted,
/// negated variables spin-reversed). Gap and exactness carry over unchanged.
pub fn specialize(p: &PenaltyFunction, t: &NPNTransform) -> Result<PenaltyFunction> {
    if t.output_negation {
        return Err(Error::Domain(
            "output complementation has no penalty-function realization".into(),
        ));
    }
    if t.perm.len() != p.inputs.len() {
        return Err(Error::Domain("transform arity mismatch".into()));
    }
    let mut out = p.clone();
    let mut inputs = Vec::with_capacity(p.inputs.len());
    for (j, &pj) in t.perm.iter().enumerate() {
        let q = p.inputs[pj as usize];
        inputs.push(q);
        if t.input_negations >> j & 1 == 1 {
            out = out.spin_reversal(q)?;
        }
    }
    out.inputs = inputs;
    Ok(out)
}

/// Build metadata: what was requested and what synthesis skipped.
#[derive(Debug, Clone, Default)]
pub struct LibraryMetadata {
    /// Canonical literals synthesis could not realize (infeasible or over budget),
    /// with the reason.
    pub skipped: Vec<(String, String)>,
}

/// An immutable library of cells keyed by canonical truth-table literal.
#[derive(Debug, Clone, Default)]
pub struct GateLibrary {
    pub cells: BTreeMap<String, Vec<GateCell>>,
    pub metadata: LibraryMetadata,
}

impl GateLibrary {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn add(&mut self, cell: GateCell) {
        self.cells.entry(cell.tt.to_literal()).or_default().push(cell);
    }

    /// Match a truth table: canonicalize and look up. Returns every stored cell
    /// (one per footprint) with the transform `t` such that `t.apply(tt)` is the
    /// canonical key; `specialize(cell.penalty, t)` then encodes `tt` itself.
    pub fn lookup(&self, tt: &TruthTable) -> Result<Vec<(&GateCell, NPNTransform)>> {
        let (canon, t) = np_canonical(tt)?;
        Ok(self
            .cells
            .get(&canon.to_literal())
            .map(|cells| cells.iter().map(|c| (c, t.clone())).collect())
            .unwrap_or_default())
    }

    /// Match and instantiate the cheapest (fewest-qubit) cell for `tt`.
    pub fn instantiate(&self, tt: &TruthTable) -> Result<Option<(GateCell, PenaltyFunction)>> {
        let mut hits = self.lookup(tt)?;
        hits.sort_by_key(|(c, _)| c.qubit_cost());
        match hits.first() {
            None => Ok(None),
            Some((cell, t)) => {
                let pf = specialize(&cell.penalty, t)?;
                Ok(Some(((*cell).clone(), pf)))
            }
        }
    }

    /// Serialize to the library JSON format.
    pub fn to_json(&self) -> Value {
        let cells: Vec<Value> = self
            .cells
            .values()
            .flatten()
            .map(|c| {
                json!({
                    "tt": c.tt.to_literal(),
                    "footprint": c.footprint.name(),
                    "placement": {
                        "inputs": c.penalty.inputs,
                        "ancillas": c.penalty.ancillas,
                    },
                    "offset": format_rat(&c.penalty.model.offset),
                    "linear": c.penalty.model.biases.iter()
                        .map(|(q, v)| (q.to_string(), Value::String(format_rat(v))))
                        .collect::<serde_json::Map<_, _>>(),
                    "quadratic": c.penalty.model.couplings.iter()
                        .map(|(&(a, b), v)| json!([a, b, format_rat(v)]))
                        .collect::<Vec<_>>(),
                    "gap": format_rat(&c.penalty.gap),
                    "exact": c.penalty.exact,
                })
            })
            .collect();
        json!({
            "cells": cells,
            "metadata": {
                "skipped": self.metadata.skipped.iter()
                    .map(|(k, why)| json!([k, why]))
                    .collect::<Vec<_>>(),
            },
        })
    }

    pub fn from_json(v: &Value) -> Result<GateLibrary> {
        let bad = |msg: &str| Error::Parse {
            line: 0,
            msg: msg.to_string(),
        };
        let mut lib = GateLibrary::default();
        for c in v
            .get("cells")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing cells array"))?
        {
            let tt = TruthTable::from_literal(
                c.get("tt").and_then(Value::as_str).ok_or_else(|| bad("missing tt"))?,
            )?;
            let footprint = Footprint::parse(
                c.get("footprint")
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad("missing footprint"))?,
            )?;
            let placement = c.get("placement").ok_or_else(|| bad("missing placement"))?;
            let qubits = |key: &str| -> Result<Vec<u32>> {
                placement
                    .get(key)
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad(&format!("missing placement.{key}")))?
                    .iter()
                    .map(|x| x.as_u64().map(|v| v as u32).ok_or_else(|| bad("bad qubit index")))
                    .collect()
            };
            let mut model = crate::ising::IsingModel::new(footprint.graph());
            if let Some(off) = c.get("offset").and_then(Value::as_str) {
                model.offset = parse_rat(off)?;
            }
            if let Some(lin) = c.get("linear").and_then(Value::as_object) {
                for (k, val) in lin {
                    let q: u32 = k.parse().map_err(|_| bad("bad qubit key"))?;
                    model.add_bias(q, parse_rat(val.as_str().ok_or_else(|| bad("bad bias"))?)?)?;
                }
            }
            if let Some(quad) = c.get("quadratic").and_then(Value::as_array) {
                for e in quad {
                    let arr = e.as_array().filter(|a| a.len() == 3).ok_or_else(|| bad("bad quadratic"))?;
                    model.add_coupling(
                        arr[0].as_u64().ok_or_else(|| bad("bad qubit"))? as u32,
                        arr[1].as_u64().ok_or_else(|| bad("bad qubit"))? as u32,
                        parse_rat(arr[2].as_str().ok_or_else(|| bad("bad coupling"))?)?,
                    )?;
                }
            }
            let penalty = PenaltyFunction {
                model,
                inputs: qubits("inputs")?,
                ancillas: qubits("ancillas")?,
                gap: parse_rat(c.get("gap").and_then(Value::as_str).ok_or_else(|| bad("missing gap"))?)?,
                exact: c.get("exact").and_then(Value::as_bool).unwrap_or(false),
            };
            lib.add(GateCell { tt, footprint, penalty });
        }
        if let Some(skipped) = v
            .pointer("/metadata/skipped")
            .and_then(Value::as_array)
        {
            for e in skipped {
                if let Some(pair) = e.as_array().filter(|a| a.len() == 2) {
                    lib.metadata.skipped.push((
                        pair[0].as_str().unwrap_or_default().to_string(),
                        pair[1].as_str().unwrap_or_default().to_string(),
                    ));
                }
            }
        }
        Ok(lib)
    }
}

/// Synthesize a library: for each NP class of `functions` and each footprint, run
/// gap maximization; infeasible or over-budget classes are skipped and recorded.
/// Partial libraries are valid.
pub fn build_library(
    functions: &[TruthTable],
    footprints: &[Footprint],
    require_exact: bool,
    cfg: &SynthConfig,
) -> Result<GateLibrary> {
    // Deduplicate by canonical form.
    let mut classes: BTreeMap<String, TruthTable> = BTreeMap::new();
    for f in functions {
        let (canon, _) = np_canonical(f)?;
        classes.entry(canon.to_literal()).or_insert(canon);
    }
    let jobs: Vec<(&TruthTable, Footprint)> = classes
        .values()
        .flat_map(|tt| footprints.iter().map(move |&fp| (tt, fp)))
        .collect();
    use rayon::prelude::*;
    let outcomes: Vec<(String, Footprint, Result<PenaltyFunction>)> = jobs
        .par_iter()
        .map(|(tt, fp)| {
            let n = tt.arity() as usize;
            let h = fp.capacity().saturating_sub(n);
            let r = if n > fp.capacity() {
                Err(Error::Capacity(format!("{n} inputs exceed {}", fp.name())))
            } else {
                synthesize(tt, *fp, h, require_exact, cfg)
            };
            (tt.to_literal(), *fp, r)
        })
        .collect();
    let mut lib = GateLibrary::default();
    for (literal, footprint, outcome) in outcomes {
        match outcome {
            Ok(penalty) => lib.add(GateCell {
                tt: classes[&literal].clone(),
                footprint,
                penalty,
            }),
            Err(e) => lib
                .metadata
                .skipped
                .push((format!("{literal}@{}", footprint.name()), e.to_string())),
        }
    }
    Ok(lib)
}

/// The built-in cells derived from the worked examples (no synthesis run): the
/// AND relation on a half-tile and the XOR relation on a tile. Covers the trivial
/// 2-input-AND mapping fallback.
pub fn standard_cells() -> Result<GateLibrary> {
    let mut lib = GateLibrary::default();
    let and = crate::penalty::examples::and_tile();
    lib.add(GateCell::from_penalty(
        and,
        &crate::boolfn::and_relation(),
        Footprint::HalfTile,
    )?);
    let xor = crate::penalty::examples::xor_tile();
    lib.add(GateCell::from_penalty(
        xor,
        &crate::boolfn::xor_relation(),
        Footprint::Tile,
    )?);
    // Equivalence x₁ ↔ x₂ as a single chain edge across the half-tile shores.
    let equiv = crate::penalty::chain_penalty(
        Footprint::HalfTile.graph(),
        0,
        4,
        crate::penalty::ChainSign::Plus,
    )?;
    lib.add(GateCell::from_penalty(
        equiv,
        &crate::boolfn::equivalence(),
        Footprint::HalfTile,
    )?);
    // Unit pin z = ⊤ as a single-qubit bias (pin-⊥ matches via input negation).
    let pin = crate::penalty::unit_pin(Footprint::HalfTile.graph(), 0, true)?;
    let identity = TruthTable::from_fn(1, |k| k == 1)?;
    lib.add(GateCell::from_penalty(pin, &identity, Footprint::HalfTile)?);
    // Constant-⊥ relation z ↔ ⊥ with one dead input pin: covers fan-in cuts
    // whose function collapses to a contradiction (e.g. x ∧ ¬x).
    let mut contradiction = crate::ising::IsingModel::new(Footprint::HalfTile.graph());
    contradiction.offset = crate::rat::rint(1);
    contradiction.add_bias(1, crate::rat::rint(1))?;
    let contradiction = crate::penalty::PenaltyFunction {
        model: contradiction,
        inputs: vec![0, 1],
        ancillas: Vec::new(),
        gap: crate::rat::rint(2),
        exact: true,
    };
    let const_false_rel = crate::boolfn::relation_of(&TruthTable::constant_false(1)?)?;
    lib.add(GateCell::from_penalty(
        contradiction,
        &const_false_rel,
        Footprint::HalfTile,
    )?);
    Ok(lib)
}
