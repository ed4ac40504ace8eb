//! Variable-elimination constraint generation.
//!
//! Instead of one row per full `(x, a)` assignment, ancillas are eliminated one by
//! one (bucket elimination). Eliminating ancilla `i` produces *message variables*
//! `m_i(a_{V_i} | x)` — LP unknowns standing for the minimum over `a_i` of the
//! bucket content — constrained from above by one row per value of `a_i`. The
//! countermodel condition becomes a single row `c(x) + Σ m(∅|x) ≥ g_min` per
//! countermodel; for models, witness choices `β` activate tie equalities that force
//! the bounds to be attained along `β`, plus the zero-sum row `c(x) + Σ m(∅|x) = 0`.
//! Messages are deduplicated across assignments sharing the projection onto the
//! input bits the message actually depends on.

use std::collections::BTreeMap;

use crate::rat::{rint, Rat};
use crate::{Error, Result};

use super::shannon::{filtered_countermodels, layout_for, standard_bounds};
use super::system::{ConstraintSystem, Row, Slot};
use super::SynthesisSpec;

/// Budget on the number of message unknowns.
const MESSAGE_BUDGET: usize = 4096;

/// One elimination bucket: the structure of ancilla `i`'s message.
struct Bucket {
    /// Ancilla index being eliminated.
    anc: usize,
    /// Remaining ancillas the message depends on, ascending.
    v_set: Vec<usize>,
    /// Input bits the message depends on (directly or via child messages).
    s_mask: u32,
    /// Input bits directly adjacent to this ancilla.
    own_inputs: u32,
    /// `(remaining ancilla, coupling unknown)` factors `θ a_i a_k`.
    couplings: Vec<(usize, usize)>,
    /// Earlier buckets whose messages landed here.
    children: Vec<usize>,
}

/// Build the VE system for a spec under the given elimination order (a permutation
/// of ancilla indices; the first entry is eliminated first).
pub fn build_ve_system(spec: &SynthesisSpec, elimination_order: &[usize]) -> Result<ConstraintSystem> {
    let n = spec.inputs.len();
    let h = spec.ancillas.len();
    {
        let mut seen = vec![false; h];
        if elimination_order.len() != h
            || elimination_order.iter().any(|&i| i >= h || std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::Domain(
                "elimination order must be a permutation of the ancilla indices".into(),
            ));
        }
    }
    // First pass with extra = 0 just to get positions/edges; unknowns are
    // reallocated below once the message count is known.
    let (_, pc_probe, _) = layout_for(spec, 0)?;
    let models = spec.function.models();
    let counter = filtered_countermodels(spec);
    if models.is_empty() || spec.function.countermodels().is_empty() {
        return Err(Error::Domain(
            "constant functions have no meaningful penalty encoding".into(),
        ));
    }

    // --- structure pass: buckets, V sets, support masks ---
    let elim_pos: Vec<usize> = {
        let mut p = vec![0; h];
        for (t, &i) in elimination_order.iter().enumerate() {
            p[i] = t;
        }
        p
    };
    // Adjacency from the probe layout (positions: inputs 0..n, ancillas n..n+h).
    let edge_of = |pa: usize, pb: usize| -> Option<usize> {
        pc_probe
            .edge_var
            .iter()
            .find(|&&(a, b, _)| (a, b) == (pa.min(pb), pa.max(pb)))
            .map(|&(_, _, v)| v)
    };
    let mut buckets: Vec<Bucket> = Vec::with_capacity(h);
    // pending[i] = bucket ids routed to ancilla i.
    let mut pending: Vec<Vec<usize>> = vec![Vec::new(); h];
    for &i in elimination_order {
        let pi = n + i;
        let mut own_inputs = 0u32;
        for j in 0..n {
            if edge_of(pi, j).is_some() {
                own_inputs |= 1 << j;
            }
        }
        let mut couplings = Vec::new();
        let mut v_set: Vec<usize> = Vec::new();
        for k in 0..h {
            if k != i && elim_pos[k] > elim_pos[i] {
                if let Some(var) = edge_of(pi, n + k) {
                    couplings.push((k, var));
                    v_set.push(k);
                }
            }
        }
        let children = std::mem::take(&mut pending[i]);
        let mut s_mask = own_inputs;
        for &c in &children {
            s_mask |= buckets[c].s_mask;
            for &k in &buckets[c].v_set {
                if k != i && !v_set.contains(&k) {
                    v_set.push(k);
                }
            }
        }
        v_set.sort_unstable();
        let id = buckets.len();
        if let Some(&next) = v_set.iter().min_by_key(|&&k| elim_pos[k]) {
            pending[next].push(id);
        }
        buckets.push(Bucket {
            anc: i,
            v_set,
            s_mask,
            own_inputs,
            couplings,
            children,
        });
    }
    let top: Vec<usize> = (0..buckets.len()).filter(|&b| buckets[b].v_set.is_empty()).collect();

    // --- allocate message unknowns ---
    let used_x: Vec<u32> = {
        let mut v = models.clone();
        v.extend(&counter);
        v.sort_unstable();
        v.dedup();
        v
    };
    // (bucket, vmask over v_set, x & s_mask) → unknown index offset.
    let mut msg_var: BTreeMap<(usize, u32, u32), usize> = BTreeMap::new();
    let mut extra = 0usize;
    for (b, bucket) in buckets.iter().enumerate() {
        let mut projs: Vec<u32> = used_x.iter().map(|&x| x & bucket.s_mask).collect();
        projs.sort_unstable();
        projs.dedup();
        for proj in projs {
            for vmask in 0..(1u32 << bucket.v_set.len()) {
                msg_var.insert((b, vmask, proj), extra);
                extra += 1;
            }
        }
    }
    if extra > MESSAGE_BUDGET {
        return Err(Error::Capacity(format!(
            "{extra} message unknowns exceed the budget of {MESSAGE_BUDGET}"
        )));
    }

    let (layout, pc, nvars) = layout_for(spec, extra)?;
    // Message unknowns occupy indices [msg_base, msg_base + extra).
    let msg_base = layout.gap - extra;
    let mut bounds = standard_bounds(&layout, nvars);
    // Box bounds on messages: |content| ≤ |θ_i| + Σ|couplings| + Σ child boxes,
    // with |bias| ≤ 2 and |coupling| ≤ 1. Keeps the relaxation bounded even
    // before any lazy upper-bound row is separated (a message shared by no tie
    // equality would otherwise let the gap grow without limit).
    let mut box_of: Vec<i64> = Vec::with_capacity(buckets.len());
    for bucket in &buckets {
        let own = 2 + i64::from(bucket.own_inputs.count_ones()) + bucket.couplings.len() as i64;
        let b = own + bucket.children.iter().map(|&c| box_of[c]).sum::<i64>();
        box_of.push(b);
    }
    for (&(b, _, _), &off) in &msg_var {
        bounds[msg_base + off] = (Some(rint(-box_of[b])), Some(rint(box_of[b])));
    }
    let var_of = |b: usize, vmask: u32, proj: u32| -> usize {
        msg_base + msg_var[&(b, vmask, proj & buckets[b].s_mask)]
    };

    // Bucket-content coefficients at `a_i = s`, given the parent context: ancilla
    // spins from `vmask ∪ {anc↦s}` and input spins from `proj`. Includes child
    // message unknowns; excludes the message's own `−m` term.
    let content = |b: usize, vmask: u32, proj: u32, s: i64| -> Vec<(usize, Rat)> {
        let bucket = &buckets[b];
        let spin_of = |k: usize| -> i64 {
            if k == bucket.anc {
                s
            } else {
                let pos = bucket.v_set.iter().position(|&v| v == k).expect("ancilla in V");
                if vmask >> pos & 1 == 1 {
                    1
                } else {
                    -1
                }
            }
        };
        let mut coeffs: Vec<(usize, Rat)> = Vec::new();
        // θ_i a_i
        coeffs.push((pc.bias_var[n + bucket.anc], rint(s)));
        // a_i Σ θ_ij x_j over directly adjacent inputs
        for j in 0..n {
            if bucket.own_inputs >> j & 1 == 1 {
                let var = pc
                    .edge_var
                    .iter()
                    .find(|&&(a, bb, _)| (a, bb) == ((n + bucket.anc).min(j), (n + bucket.anc).max(j)))
                    .map(|&(_, _, v)| v)
                    .expect("edge var");
                let xs = if proj >> j & 1 == 1 { 1 } else { -1 };
                coeffs.push((var, rint(s * xs)));
            }
        }
        // θ_ik a_i a_k for remaining ancillas
        for &(k, var) in &bucket.couplings {
            coeffs.push((var, rint(s * spin_of(k))));
        }
        // child messages, projected into this context
        for &c in &bucket.children {
            let child = &buckets[c];
            let mut cvmask = 0u32;
            for (pos, &k) in child.v_set.iter().enumerate() {
                if spin_of(k) == 1 {
                    cvmask |= 1 << pos;
                }
            }
            coeffs.push((var_of(c, cvmask, proj), rint(1)));
        }
        coeffs
    };

    // c(x): the ancilla-free part of P.
    let c_of = |x: u32| -> Vec<(usize, Rat)> {
        let mut coeffs = vec![(pc.offset_var, rint(1))];
        for j in 0..n {
            coeffs.push((pc.bias_var[j], rint(if x >> j & 1 == 1 { 1 } else { -1 })));
        }
        for &(pa, pb, var) in &pc.edge_var {
            if pa < n && pb < n {
                let sa = if x >> pa & 1 == 1 { 1 } else { -1 };
                let sb = if x >> pb & 1 == 1 { 1 } else { -1 };
                coeffs.push((var, rint(sa * sb)));
            }
        }
        coeffs
    };

    // --- rows ---
    let mut base_rows = Vec::new();
    let mut lazy_rows = Vec::new();
    // Upper-bound rows: content − m ≥ 0 for a_i = ±1.
    for (&(b, vmask, proj), &off) in &msg_var {
        for s in [1i64, -1] {
            let mut coeffs = content(b, vmask, proj, s);
            coeffs.push((msg_base + off, rint(-1)));
            lazy_rows.push(Row::ge(coeffs, rint(0)));
        }
    }
    // Zero-sum / lower-bound composite c(x) + Σ top messages.
    let composite = |x: u32| -> Vec<(usize, Rat)> {
        let mut coeffs = c_of(x);
        for &b in &top {
            coeffs.push((var_of(b, 0, x), rint(1)));
        }
        coeffs
    };
    for &x in &counter {
        let mut coeffs = composite(x);
        coeffs.push((layout.gap, rint(-1)));
        base_rows.push(Row::ge(coeffs, rint(0)));
    }
    // Tie rows for a witness β at assignment x: one equality per bucket.
    let ties = |x: u32, beta: u32| -> Vec<Row> {
        (0..buckets.len())
            .map(|b| {
                let bucket = &buckets[b];
                let s = if beta >> bucket.anc & 1 == 1 { 1 } else { -1 };
                let mut vmask = 0u32;
                for (pos, &k) in bucket.v_set.iter().enumerate() {
                    if beta >> k & 1 == 1 {
                        vmask |= 1 << pos;
                    }
                }
                let mut coeffs = content(b, vmask, x, s);
                coeffs.push((var_of(b, vmask, x), rint(-1)));
                Row::eq(coeffs, rint(0))
            })
            .collect()
    };
    let mut slots = Vec::new();
    for &x in &models {
        base_rows.push(Row::eq(composite(x), rint(0)));
        let candidates = (0..(1u32 << h)).map(|beta| ties(x, beta)).collect();
        slots.push(Slot {
            assignment: x,
            candidates,
        });
    }
    if spec.require_exact {
        for &x in &counter {
            let candidates = (0..(1u32 << h))
                .map(|beta| {
                    let mut rows = ties(x, beta);
                    let mut coeffs = composite(x);
                    coeffs.push((layout.gap, rint(-1)));
                    rows.push(Row::eq(coeffs, rint(0)));
                    rows
                })
                .collect();
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
