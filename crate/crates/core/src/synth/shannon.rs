//! Shannon-expansion constraint generation: one inequality row per full
//! `(x, a)` assignment, witness equalities per model (and per countermodel when
//! exactness is required).

use crate::lp::Rel;
use crate::rat::{rint, Rat};
use crate::{Error, Result};

use super::system::{ConstraintSystem, Row, Slot, VarLayout};
use super::SynthesisSpec;

/// Hamming-distance countermodel filter: keep countermodels within distance `d`
/// of some model. Returns the surviving countermodel masks.
pub fn filtered_countermodels(spec: &SynthesisSpec) -> Vec<u32> {
    let counter = spec.function.countermodels();
    match spec.countermodel_filter {
        None => counter,
        Some(d) => {
            let models = spec.function.models();
            counter
                .into_iter()
                .filter(|&x| models.iter().any(|&m| (x ^ m).count_ones() <= d))
                .collect()
        }
    }
}

/// Per-assignment coefficient builder shared by the Shannon and VE systems.
pub(super) struct PCoeffs {
    pub n: usize,
    /// Bias unknown per qubit position (inputs first, then ancillas).
    pub bias_var: Vec<usize>,
    /// `(position a, position b, unknown)` per induced edge.
    pub edge_var: Vec<(usize, usize, usize)>,
    pub offset_var: usize,
}

impl PCoeffs {
    /// Sign of position `p` under input mask `x` and ancilla mask `a`.
    fn spin(&self, p: usize, x: u32, a: u32) -> i64 {
        let bit = if p < self.n { x >> p & 1 } else { a >> (p - self.n) & 1 };
        if bit == 1 {
            1
        } else {
            -1
        }
    }

    /// Coefficients of `P(x, a)` as a linear form in the unknowns.
    pub fn p_row(&self, x: u32, a: u32) -> Vec<(usize, Rat)> {
        let mut coeffs = vec![(self.offset_var, rint(1))];
        for (p, &j) in self.bias_var.iter().enumerate() {
            coeffs.push((j, rint(self.spin(p, x, a))));
        }
        for &(pa, pb, j) in &self.edge_var {
            coeffs.push((j, rint(self.spin(pa, x, a) * self.spin(pb, x, a))));
        }
        coeffs
    }
}

/// Build the unknown layout (offset, biases, couplings, gap) for a spec, plus the
/// coefficient builder. The gap unknown is allocated last after `extra` auxiliary
/// unknowns.
pub(super) fn layout_for(spec: &SynthesisSpec, extra: usize) -> Result<(VarLayout, PCoeffs, usize)> {
    let n = spec.inputs.len();
    if spec.function.arity() as usize != n {
        return Err(Error::Domain(format!(
            "function arity {} does not match {} placed inputs",
            spec.function.arity(),
            n
        )));
    }
    let qubits: Vec<u32> = spec.inputs.iter().chain(&spec.ancillas).copied().collect();
    {
        let set: std::collections::BTreeSet<u32> = qubits.iter().copied().collect();
        if set.len() != qubits.len() {
            return Err(Error::Domain("placement must be injective".into()));
        }
        for &q in &qubits {
            if !spec.graph.is_enabled(q) {
                return Err(Error::Domain(format!("qubit {q} is not enabled")));
            }
        }
    }
    let offset_var = 0usize;
    let mut next = 1usize;
    let mut bias_var = Vec::with_capacity(qubits.len());
    let mut qubit_vars = Vec::with_capacity(qubits.len());
    for &q in &qubits {
        bias_var.push(next);
        qubit_vars.push((q, next));
        next += 1;
    }
    let mut edge_var = Vec::new();
    let mut edge_vars = Vec::new();
    for i in 0..qubits.len() {
        for j in (i + 1)..qubits.len() {
            if spec.graph.has_edge(qubits[i], qubits[j]) {
                edge_var.push((i, j, next));
                let (a, b) = (qubits[i].min(qubits[j]), qubits[i].max(qubits[j]));
                edge_vars.push(((a, b), next));
                next += 1;
            }
        }
    }
    let gap = next + extra;
    let layout = VarLayout {
        offset: offset_var,
        qubit_vars,
        edge_vars,
        gap,
    };
    let pc = PCoeffs {
        n,
        bias_var,
        edge_var,
        offset_var,
    };
    Ok((layout, pc, gap + 1))
}

pub(super) fn standard_bounds(layout: &VarLayout, nvars: usize) -> Vec<(Option<Rat>, Option<Rat>)> {
    let mut bounds = vec![(None, None); nvars];
    for (_, j) in &layout.qubit_vars {
        bounds[*j] = (Some(rint(-2)), Some(rint(2)));
    }
    for (_, j) in &layout.edge_vars {
        bounds[*j] = (Some(rint(-1)), Some(rint(1)));
    }
    bounds[layout.gap] = (Some(rint(0)), None);
    bounds
}

/// Build the Shannon-expansion system for a spec: range bounds on θ, all-ancilla
/// inequality rows per assignment, witness slots per model (and per countermodel
/// when `require_exact`).
pub fn build_shannon_system(spec: &SynthesisSpec) -> Result<ConstraintSystem> {
    let n = spec.inputs.len();
    let h = spec.ancillas.len();
    if n + h > 12 {
        return Err(Error::Capacity(format!(
            "{} qubits exceed the 2^12 Shannon row budget",
            n + h
        )));
    }
    let (layout, pc, nvars) = layout_for(spec, 0)?;
    let bounds = standard_bounds(&layout, nvars);
    let models = spec.function.models();
    let counter = filtered_countermodels(spec);
    if models.is_empty() || spec.function.countermodels().is_empty() {
        return Err(Error::Domain(
            "constant functions have no meaningful penalty encoding".into(),
        ));
    }

    let mut base_rows = Vec::new();
    let mut lazy_rows = Vec::new();
    let mut slots = Vec::new();
    for &x in &models {
        let mut candidates = Vec::with_capacity(1 << h);
        for a in 0..(1u32 << h) {
            lazy_rows.push(Row::ge(pc.p_row(x, a), rint(0)));
            candidates.push(vec![Row::eq(pc.p_row(x, a), rint(0))]);
        }
        slots.push(Slot {
            assignment: x,
            candidates,
        });
    }
    for &x in &counter {
        let mut candidates = Vec::with_capacity(1 << h);
        for a in 0..(1u32 << h) {
            let mut coeffs = pc.p_row(x, a);
            coeffs.push((layout.gap, rint(-1)));
            // One row per countermodel stays permanent so the relaxation bounds g
            // as soon as an offset-pinning model equality is chosen.
            if a == 0 {
                base_rows.push(Row::ge(coeffs.clone(), rint(0)));
            } else {
                lazy_rows.push(Row::ge(coeffs.clone(), rint(0)));
            }
            if spec.require_exact {
                candidates.push(vec![Row {
                    coeffs,
                    rel: Rel::Eq,
                    rhs: rint(0),
                }]);
            }
        }
        if spec.require_exact {
            slots.push(Slot {
                assignment: x,
                candidates,
            });
        }
    }

    Ok(ConstraintSystem {
        nvars,
        bounds,
        base_rows,
        lazy_rows,
        slots,
        layout,
        graph: spec.graph.clone(),
        inputs: spec.inputs.clone(),
        ancillas: spec.ancillas.clone(),
        require_exact: spec.require_exact,
    })
}
