//! Ising models over a hardware graph and exact energy arithmetic.
//!
//! An Ising model is `H(z) = o + Σ θ_i z_i + Σ θ_ij z_i z_j` over spins
//! `z ∈ {−1,+1}`. Coefficients are exact rationals. A model is *in range* when all
//! `|θ_i| ≤ 2` and `|θ_ij| ≤ 1`, and *normal* when some bias or coupling attains
//! that bound.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::chimera::{ChimeraGraph, Topology};
use crate::rat::{format_rat, parse_rat, rat_to_f64, rint, Rat};
use crate::{Error, Result};

/// A full spin assignment: qubit → ±1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinVector(pub BTreeMap<u32, i8>);

impl SpinVector {
    pub fn get(&self, q: u32) -> Option<i8> {
        self.0.get(&q).copied()
    }
}

/// An Ising model: offset, per-qubit biases and per-edge couplings on a host graph.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub graph: Arc<Topology>,
    pub offset: Rat,
    pub biases: BTreeMap<u32, Rat>,
    pub couplings: BTreeMap<(u32, u32), Rat>,
}

impl IsingModel {
    pub fn new(graph: Arc<Topology>) -> Self {
        IsingModel {
            graph,
            offset: Rat::zero(),
            biases: BTreeMap::new(),
            couplings: BTreeMap::new(),
        }
    }

    /// Add to the bias of `q`. The qubit must be enabled.
    pub fn add_bias(&mut self, q: u32, v: Rat) -> Result<()> {
        if !self.graph.is_enabled(q) {
            return Err(Error::Domain(format!("qubit {q} is not enabled")));
        }
        let e = self.biases.entry(q).or_insert_with(Rat::zero);
        *e += v;
        if e.is_zero() {
            self.biases.remove(&q);
        }
        Ok(())
    }

    /// Add to the coupling of edge `(a, b)`; the pair must be an effective edge.
    pub fn add_coupling(&mut self, a: u32, b: u32, v: Rat) -> Result<()> {
        if !self.graph.has_edge(a, b) {
            return Err(Error::Domain(format!("({a},{b}) is not an edge of the hardware graph")));
        }
        let key = (a.min(b), a.max(b));
        let e = self.couplings.entry(key).or_insert_with(Rat::zero);
        *e += v;
        if e.is_zero() {
            self.couplings.remove(&key);
        }
        Ok(())
    }

    pub fn bias(&self, q: u32) -> Rat {
        self.biases.get(&q).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coupling(&self, a: u32, b: u32) -> Rat {
        self.couplings
            .get(&(a.min(b), a.max(b)))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    /// Qubits that appear with a nonzero bias or coupling.
    pub fn active_qubits(&self) -> BTreeSet<u32> {
        let mut s: BTreeSet<u32> = self.biases.keys().copied().collect();
        for &(a, b) in self.couplings.keys() {
            s.insert(a);
            s.insert(b);
        }
        s
    }

    /// Exact energy `o + Σ θ_i z_i + Σ θ_ij z_i z_j`.
    pub fn energy(&self, spins: &SpinVector) -> Result<Rat> {
        let mut e = self.offset.clone();
        for (&q, th) in &self.biases {
            let z = spins
                .get(q)
                .ok_or_else(|| Error::Domain(format!("missing spin for qubit {q}")))?;
            e += th * rint(z as i64);
        }
        for (&(a, b), th) in &self.couplings {
            let za = spins
                .get(a)
                .ok_or_else(|| Error::Domain(format!("missing spin for qubit {a}")))?;
            let zb = spins
                .get(b)
                .ok_or_else(|| Error::Domain(format!("missing spin for qubit {b}")))?;
            e += th * rint((za * zb) as i64);
        }
        Ok(e)
    }

    /// Whether all biases are within [−2,2] and couplings within [−1,1].
    pub fn is_in_range(&self) -> bool {
        self.biases.values().all(|b| b.abs() <= rint(2))
            && self.couplings.values().all(|j| j.abs() <= rint(1))
    }

    /// First out-of-range coefficient, if any, as a `(location, value)` pair.
    pub fn range_violation(&self) -> Option<(String, Rat)> {
        for (&q, b) in &self.biases {
            if b.abs() > rint(2) {
                return Some((format!("qubit {q}"), b.clone()));
            }
        }
        for (&(a, c), j) in &self.couplings {
            if j.abs() > rint(1) {
                return Some((format!("edge ({a},{c})"), j.clone()));
            }
        }
        None
    }

    /// Scale by `c = min(min_i 2/|θ_i|, min_ij 1/|θ_ij|)` so the model becomes
    /// normal (some `|θ_i| = 2` or `|θ_ij| = 1`). Returns the scaled model and `c`.
    pub fn normalize(&self) -> Result<(IsingModel, Rat)> {
        let mut c: Option<Rat> = None;
        let mut consider = |v: Rat| {
            if let Some(cur) = &c {
                if v < *cur {
                    c = Some(v);
                }
            } else {
                c = Some(v);
            }
        };
        for b in self.biases.values() {
            if !b.is_zero() {
                consider(rint(2) / b.abs());
            }
        }
        for j in self.couplings.values() {
            if !j.is_zero() {
                consider(rint(1) / j.abs());
            }
        }
        let c = c.ok_or_else(|| Error::Domain("cannot normalize an all-zero model".into()))?;
        Ok((self.scaled(&c), c))
    }

    /// Multiply every coefficient (offset included) by a positive scale.
    pub fn scaled(&self, c: &Rat) -> IsingModel {
        let mut m = self.clone();
        m.offset *= c;
        for b in m.biases.values_mut() {
            *b *= c;
        }
        for j in m.couplings.values_mut() {
            *j *= c;
        }
        m
    }

    /// Exhaustive minimum energy and all minimizing spin assignments over the
    /// active qubits (at most 26 of them).
    pub fn exact_ground_states(&self) -> Result<(Rat, Vec<SpinVector>)> {
        let active: Vec<u32> = self.active_qubits().into_iter().collect();
        if active.len() > 26 {
            return Err(Error::Capacity(format!(
                "{} active qubits exceed the exhaustive bound of 26",
                active.len()
            )));
        }
        if active.is_empty() {
            return Ok((self.offset.clone(), vec![SpinVector(BTreeMap::new())]));
        }
        // Scale to integers over a common denominator so the 2^k sweep uses i128.
        let idx: BTreeMap<u32, usize> = active.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let mut den = self.offset.denom().clone();
        for v in self.biases.values().chain(self.couplings.values()) {
            den = num::integer::lcm(den, v.denom().clone());
        }
        let den_rat = Rat::new(den.clone(), num::BigInt::one());
        let to_int = |v: &Rat| -> i128 {
            let scaled = v * &den_rat;
            debug_assert!(scaled.denom().is_one());
            num::ToPrimitive::to_i128(scaled.numer()).expect("coefficient too large")
        };
        let off = to_int(&self.offset);
        let biases: Vec<(usize, i128)> = self
            .biases
            .iter()
            .map(|(&q, v)| (idx[&q], to_int(v)))
            .collect();
        let coups: Vec<(usize, usize, i128)> = self
            .couplings
            .iter()
            .map(|(&(a, b), v)| (idx[&a], idx[&b], to_int(v)))
            .collect();
        let k = active.len();
        let mut best: i128 = i128::MAX;
        let mut minimizers: Vec<u32> = Vec::new();
        for mask in 0u32..(1u32 << k) {
            // Spin of bit i is +1 when set.
            let mut e = off;
            for &(i, v) in &biases {
                e += if mask >> i & 1 == 1 { v } else { -v };
            }
            for &(i, j, v) in &coups {
                let same = (mask >> i & 1) == (mask >> j & 1);
                e += if same { v } else { -v };
            }
            if e < best {
                best = e;
                minimizers.clear();
                minimizers.push(mask);
            } else if e == best {
                minimizers.push(mask);
            }
        }
        let states = minimizers
            .into_iter()
            .map(|mask| {
                SpinVector(
                    active
                        .iter()
                        .enumerate()
                        .map(|(i, &q)| (q, if mask >> i & 1 == 1 { 1 } else { -1 }))
                        .collect(),
                )
            })
            .collect();
        Ok((Rat::new(best.into(), den), states))
    }

    /// Dense float view `(offset, bias[i], coupling list)` over the given qubit
    /// ordering, for the simulated-annealing sampler.
    pub fn float_view(&self, order: &[u32]) -> FloatModel {
        let idx: BTreeMap<u32, usize> = order.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let mut bias = vec![0.0; order.len()];
        for (&q, v) in &self.biases {
            if let Some(&i) = idx.get(&q) {
                bias[i] = rat_to_f64(v);
            }
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); order.len()];
        for (&(a, b), v) in &self.couplings {
            let (ia, ib) = (idx[&a], idx[&b]);
            let w = rat_to_f64(v);
            adj[ia].push((ib, w));
            adj[ib].push((ia, w));
        }
        FloatModel {
            offset: rat_to_f64(&self.offset),
            bias,
            adj,
        }
    }

    /// Serialize to the Ising-model JSON format (Chimera-hosted models only).
    pub fn to_json(&self) -> Result<Value> {
        let g = match self.graph.as_ref() {
            Topology::Chimera(g) => g,
            Topology::Custom(_) => {
                return Err(Error::Domain(
                    "only Chimera-hosted models have a file representation".into(),
                ))
            }
        };
        Ok(json!({
            "graph": {
                "rows": g.rows,
                "cols": g.cols,
                "shore": g.shore,
                "disabled": g.disabled.iter().collect::<Vec<_>>(),
            },
            "offset": format_rat(&self.offset),
            "linear": self
                .biases
                .iter()
                .map(|(q, v)| (q.to_string(), Value::String(format_rat(v))))
                .collect::<serde_json::Map<_, _>>(),
            "quadratic": self
                .couplings
                .iter()
                .map(|(&(a, b), v)| json!([a, b, format_rat(v)]))
                .collect::<Vec<_>>(),
        }))
    }

    /// Parse the Ising-model JSON format.
    pub fn from_json(v: &Value) -> Result<IsingModel> {
        let bad = |msg: &str| Error::Parse {
            line: 0,
            msg: msg.to_string(),
        };
        let gv = v.get("graph").ok_or_else(|| bad("missing graph"))?;
        let num = |k: &str| -> Result<u32> {
            gv.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as u32)
                .ok_or_else(|| bad(&format!("missing graph.{k}")))
        };
        let disabled: BTreeSet<u32> = gv
            .get("disabled")
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(Value::as_u64).map(|x| x as u32).collect())
            .unwrap_or_default();
        let graph = ChimeraGraph::new(num("rows")?, num("cols")?, num("shore")?, disabled)?;
        let mut m = IsingModel::new(Arc::new(Topology::Chimera(graph)));
        if let Some(off) = v.get("offset") {
            m.offset = parse_json_rat(off)?;
        }
        if let Some(lin) = v.get("linear").and_then(Value::as_object) {
            for (k, val) in lin {
                let q: u32 = k.parse().map_err(|_| bad("bad qubit key in linear"))?;
                m.add_bias(q, parse_json_rat(val)?)?;
            }
        }
        if let Some(quad) = v.get("quadratic").and_then(Value::as_array) {
            for entry in quad {
                let arr = entry.as_array().ok_or_else(|| bad("bad quadratic entry"))?;
                if arr.len() != 3 {
                    return Err(bad("quadratic entry must be [i, j, value]"));
                }
                let q = |x: &Value| -> Result<u32> {
                    x.as_u64()
                        .map(|v| v as u32)
                        .or_else(|| x.as_str().and_then(|s| s.parse().ok()))
                        .ok_or_else(|| bad("bad qubit index in quadratic"))
                };
                m.add_coupling(q(&arr[0])?, q(&arr[1])?, parse_json_rat(&arr[2])?)?;
            }
        }
        Ok(m)
    }
}

fn parse_json_rat(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(n) => parse_rat(&n.to_string()),
        _ => Err(Error::Parse {
            line: 0,
            msg: "rational must be a string or number".into(),
        }),
    }
}

/// Dense `f64` mirror of an Ising model for the annealer.
#[derive(Debug, Clone)]
pub struct FloatModel {
    pub offset: f64,
    pub bias: Vec<f64>,
    /// Adjacency list of `(neighbor index, coupling)` pairs; each edge appears twice.
    pub adj: Vec<Vec<(usize, f64)>>,
}

impl FloatModel {
    pub fn energy(&self, spins: &[i8]) -> f64 {
        let mut e = self.offset;
        for (i, &b) in self.bias.iter().enumerate() {
            e += b * spins[i] as f64;
        }
        for (i, nbrs) in self.adj.iter().enumerate() {
            for &(j, w) in nbrs {
                if j > i {
                    e += w * (spins[i] as f64) * (spins[j] as f64);
                }
            }
        }
        e
    }

    /// Energy change of flipping spin `i`: `ΔH = −2 z_i (θ_i + Σ_j θ_ij z_j)`
    /// evaluated at the pre-flip state.
    pub fn flip_delta(&self, spins: &[i8], i: usize) -> f64 {
        let mut local = self.bias[i];
        for &(j, w) in &self.adj[i] {
            local += w * spins[j] as f64;
        }
        -2.0 * spins[i] as f64 * local
    }
}

/// Convenience constructor for spin vectors in tests and decoding.
pub fn spins(pairs: impl IntoIterator<Item = (u32, i8)>) -> SpinVector {
    SpinVector(pairs.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn k2() -> Arc<Topology> {
        Arc::new(Topology::Custom(CustomGraphK(2)))
    }

    #[allow(non_snake_case)]
    fn CustomGraphK(n: u32) -> crate::chimera::CustomGraph {
        crate::chimera::CustomGraph::complete(n)
    }

    #[test]
    fn chain_energy_matches_example() {
        // P = 1 − z₁z₂: zero on equal spins, two otherwise.
        let mut m = IsingModel::new(k2());
        m.offset = rint(1);
        m.add_coupling(0, 1, rint(-1)).unwrap();
        assert_eq!(m.energy(&spins([(0, 1), (1, -1)])).unwrap(), rint(2));
        assert_eq!(m.energy(&spins([(0, 1), (1, 1)])).unwrap(), rint(0));
    }

    #[test]
    fn zero_model_energy() {
        let m = IsingModel::new(k2());
        assert_eq!(m.energy(&spins([(0, 1), (1, 1)])).unwrap(), rint(0));
    }

    #[test]
    fn missing_spin_is_domain_error() {
        let mut m = IsingModel::new(k2());
        m.add_bias(1, rint(1)).unwrap();
        assert!(matches!(m.energy(&spins([(0, 1)])), Err(Error::Domain(_))));
    }

    #[test]
    fn normalize_scales_up_and_down() {
        let mut m = IsingModel::new(k2());
        m.add_coupling(0, 1, rat(1, 2)).unwrap();
        let (n, c) = m.normalize().unwrap();
        assert_eq!(c, rint(2));
        assert_eq!(n.coupling(0, 1), rint(1));

        // Bias 4 with coupling 1 must scale down by 1/2.
        let mut m = IsingModel::new(k2());
        m.add_bias(0, rint(4)).unwrap();
        m.add_coupling(0, 1, rint(1)).unwrap();
        let (n, c) = m.normalize().unwrap();
        assert_eq!(c, rat(1, 2));
        assert_eq!(n.bias(0), rint(2));
        assert!(n.is_in_range());

        // Already-normal model is unchanged.
        let mut m = IsingModel::new(k2());
        m.add_coupling(0, 1, rint(-1)).unwrap();
        let (n, c) = m.normalize().unwrap();
        assert_eq!(c, rint(1));
        assert_eq!(n, m);

        let z = IsingModel::new(k2());
        assert!(z.normalize().is_err());
    }

    #[test]
    fn ground_states_of_antichain() {
        // H = z₁z₂ has the two odd ground states.
        let mut m = IsingModel::new(k2());
        m.add_coupling(0, 1, rint(1)).unwrap();
        let (e, states) = m.exact_ground_states().unwrap();
        assert_eq!(e, rint(-1));
        let set: Vec<_> = states.iter().map(|s| (s.get(0).unwrap(), s.get(1).unwrap())).collect();
        assert!(set.contains(&(1, -1)) && set.contains(&(-1, 1)) && set.len() == 2);
    }

    #[test]
    fn all_zero_model_ground_states() {
        let m = IsingModel::new(k2());
        let (e, states) = m.exact_ground_states().unwrap();
        assert_eq!(e, rint(0));
        // No active qubits: the single empty assignment.
        assert_eq!(states.len(), 1);
    }

    #[test]
    fn flip_identity_cross_check() {
        // H(z) − H(flip_i z) = 2 z_i (θ_i + Σ θ_ij z_j); FloatModel must agree.
        let mut m = IsingModel::new(Arc::new(Topology::Custom(
            crate::chimera::CustomGraph::complete(3),
        )));
        m.add_bias(0, rat(3, 2)).unwrap();
        m.add_bias(2, rat(-1, 2)).unwrap();
        m.add_coupling(0, 1, rint(1)).unwrap();
        m.add_coupling(1, 2, rat(-1, 2)).unwrap();
        let order = vec![0, 1, 2];
        let fm = m.float_view(&order);
        for mask in 0..8u32 {
            let sv: Vec<i8> = (0..3).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect();
            for i in 0..3 {
                let mut flipped = sv.clone();
                flipped[i] = -flipped[i];
                let delta = fm.energy(&flipped) - fm.energy(&sv);
                assert!((delta - fm.flip_delta(&sv, i)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let g = ChimeraGraph::new(2, 2, 4, [3u32].into_iter().collect()).unwrap();
        let mut m = IsingModel::new(Arc::new(Topology::Chimera(g)));
        m.offset = rat(17, 2);
        m.add_bias(0, rat(-1, 2)).unwrap();
        m.add_coupling(0, 4, rint(-1)).unwrap();
        let v = m.to_json().unwrap();
        let back = IsingModel::from_json(&v).unwrap();
        assert_eq!(back, m);
    }
}
