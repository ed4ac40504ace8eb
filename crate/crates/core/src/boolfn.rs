//! Small Boolean functions as truth tables, with NPN canonicalization.
//!
//! Boolean values use the spin convention: ⊥ ↔ −1 and ⊤ ↔ +1. Bit `k` of a truth
//! table gives `F` at the assignment whose `i`-th variable is +1 iff bit `i` of `k`
//! is 1. Two functions are NPN-equivalent when one maps to the other by permuting
//! inputs, negating a subset of inputs and possibly negating the output.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A Boolean function of up to 10 variables, stored as a packed bit vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    arity: u8,
    /// Little-endian 64-bit words; assignment `k` lives at `words[k/64]` bit `k%64`.
    words: Vec<u64>,
}

impl TruthTable {
    pub const MAX_ARITY: u8 = 10;

    /// Constant-false table of the given arity.
    pub fn constant_false(arity: u8) -> Result<Self> {
        if arity > Self::MAX_ARITY {
            return Err(Error::Capacity(format!("arity {arity} exceeds {}", Self::MAX_ARITY)));
        }
        let nbits = 1usize << arity;
        Ok(TruthTable {
            arity,
            words: vec![0; nbits.div_ceil(64)],
        })
    }

    /// Build from a predicate over assignment masks.
    pub fn from_fn(arity: u8, f: impl Fn(u32) -> bool) -> Result<Self> {
        let mut tt = Self::constant_false(arity)?;
        for k in 0..(1u32 << arity) {
            if f(k) {
                tt.set(k, true);
            }
        }
        Ok(tt)
    }

    /// Build from spin semantics: the predicate receives the ±1 vector of inputs.
    pub fn from_spin_fn(arity: u8, f: impl Fn(&[i8]) -> bool) -> Result<Self> {
        Self::from_fn(arity, |k| {
            let x: Vec<i8> = (0..arity).map(|i| if k >> i & 1 == 1 { 1 } else { -1 }).collect();
            f(&x)
        })
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn num_assignments(&self) -> u32 {
        1u32 << self.arity
    }

    pub fn get(&self, k: u32) -> bool {
        self.words[(k / 64) as usize] >> (k % 64) & 1 == 1
    }

    pub fn set(&mut self, k: u32, v: bool) {
        let w = &mut self.words[(k / 64) as usize];
        if v {
            *w |= 1u64 << (k % 64);
        } else {
            *w &= !(1u64 << (k % 64));
        }
    }

    /// Assignment masks where `F = ⊤`.
    pub fn models(&self) -> Vec<u32> {
        (0..self.num_assignments()).filter(|&k| self.get(k)).collect()
    }

    /// Assignment masks where `F = ⊥`.
    pub fn countermodels(&self) -> Vec<u32> {
        (0..self.num_assignments()).filter(|&k| !self.get(k)).collect()
    }

    /// Spin vector (±1 per variable) of an assignment mask.
    pub fn mask_to_spins(&self, k: u32) -> Vec<i8> {
        (0..self.arity).map(|i| if k >> i & 1 == 1 { 1 } else { -1 }).collect()
    }

    /// Serialize as the library literal `"ttN:<hex>"`, most significant assignment
    /// first.
    pub fn to_literal(&self) -> String {
        let nbits = self.num_assignments();
        let digits = (nbits as usize).div_ceil(4).max(1);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nib = 0u8;
            for b in 0..4 {
                let k = (d * 4 + b) as u32;
                if k < nbits && self.get(k) {
                    nib |= 1 << b;
                }
            }
            s.push(char::from_digit(nib as u32, 16).unwrap());
        }
        format!("tt{}:{}", self.arity, s)
    }

    /// Parse the `"ttN:<hex>"` literal form.
    pub fn from_literal(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse { line: 0, msg };
        let rest = s
            .strip_prefix("tt")
            .ok_or_else(|| bad(format!("truth-table literal must start with 'tt': {s:?}")))?;
        let (arity_s, hex) = rest
            .split_once(':')
            .ok_or_else(|| bad(format!("missing ':' in truth-table literal {s:?}")))?;
        let arity: u8 = arity_s
            .parse()
            .map_err(|_| bad(format!("bad arity in truth-table literal {s:?}")))?;
        if arity > Self::MAX_ARITY {
            return Err(Error::Capacity(format!("arity {arity} exceeds {}", Self::MAX_ARITY)));
        }
        let nbits = 1u32 << arity;
        let digits = (nbits as usize).div_ceil(4).max(1);
        if hex.len() != digits {
            return Err(bad(format!(
                "truth-table literal {s:?} must have exactly {digits} hex digits"
            )));
        }
        let mut tt = Self::constant_false(arity)?;
        for (pos, ch) in hex.chars().enumerate() {
            let nib = ch
                .to_digit(16)
                .ok_or_else(|| bad(format!("bad hex digit {ch:?} in {s:?}")))? as u8;
            let d = digits - 1 - pos;
            for b in 0..4 {
                let k = (d * 4 + b) as u32;
                if k < nbits && nib >> b & 1 == 1 {
                    tt.set(k, true);
                }
            }
        }
        Ok(tt)
    }

    /// Compare bit vectors with the most significant assignment first (the same
    /// order as the hex literal). Used for canonical-form minimization.
    fn value_cmp(&self, other: &TruthTable) -> std::cmp::Ordering {
        debug_assert_eq!(self.arity, other.arity);
        for (a, b) in self.words.iter().zip(&other.words).rev() {
            match a.cmp(b) {
                std::cmp::Ordering::Equal => {}
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl Serialize for TruthTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_literal())
    }
}

impl<'de> Deserialize<'de> for TruthTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        TruthTable::from_literal(&s).map_err(serde::de::Error::custom)
    }
}

/// An element of the NPN group: input permutation, input negations, output negation.
///
/// `apply(F)` yields `G` with `G(y) = F(x) ⊕ output_negation` where
/// `x_j = y_{perm[j]} ⊕ input_negations[j]` — i.e. `F`'s variable `j` reads `G`'s
/// variable `perm[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NPNTransform {
    pub perm: Vec<u8>,
    pub input_negations: u32,
    pub output_negation: bool,
}

impl NPNTransform {
    pub fn identity(arity: u8) -> Self {
        NPNTransform {
            perm: (0..arity).collect(),
            input_negations: 0,
            output_negation: false,
        }
    }

    /// Apply to a truth table of matching arity.
    pub fn apply(&self, tt: &TruthTable) -> TruthTable {
        let n = tt.arity();
        debug_assert_eq!(self.perm.len(), n as usize);
        let mut out = TruthTable::constant_false(n).unwrap();
        for m in 0..tt.num_assignments() {
            let mut x = 0u32;
            for (j, &p) in self.perm.iter().enumerate() {
                let bit = (m >> p & 1) ^ (self.input_negations >> j & 1);
                x |= bit << j;
            }
            out.set(m, tt.get(x) ^ self.output_negation);
        }
        out
    }

    /// The inverse group element: `T.inverse().apply(T.apply(tt)) == tt`.
    pub fn inverse(&self) -> Self {
        let n = self.perm.len();
        let mut perm = vec![0u8; n];
        let mut neg = 0u32;
        for (j, &p) in self.perm.iter().enumerate() {
            perm[p as usize] = j as u8;
            neg |= ((self.input_negations >> j) & 1) << p;
        }
        NPNTransform {
            perm,
            input_negations: neg,
            output_negation: self.output_negation,
        }
    }
}

/// Iterate all permutations of `0..n` in lexicographic order.
fn permutations(n: u8) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..n).collect();
    let mut used = vec![false; n as usize];
    fn rec(n: u8, cur: &mut Vec<u8>, used: &mut Vec<bool>, depth: u8, out: &mut Vec<Vec<u8>>) {
        if depth == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v as usize] {
                used[v as usize] = true;
                cur[depth as usize] = v;
                rec(n, cur, used, depth + 1, out);
                used[v as usize] = false;
            }
        }
    }
    rec(n, &mut cur, &mut used, 0, &mut out);
    out
}

/// Canonical NPN representative: the lexicographically smallest bit vector over the
/// whole `n!·2^(n+1)` orbit, plus a transform with `transform.apply(tt) == canonical`.
pub fn npn_canonical(tt: &TruthTable) -> Result<(TruthTable, NPNTransform)> {
    let n = tt.arity();
    if n > 6 {
        return Err(Error::Capacity(format!(
            "NPN canonicalization is exhaustive and limited to arity 6 (got {n})"
        )));
    }
    let mut best: Option<(TruthTable, NPNTransform)> = None;
    for perm in permutations(n) {
        for neg in 0..(1u32 << n) {
            for out_neg in [false, true] {
                let t = NPNTransform {
                    perm: perm.clone(),
                    input_negations: neg,
                    output_negation: out_neg,
                };
                let cand = t.apply(tt);
                let better = match &best {
                    None => true,
                    Some((b, _)) => cand.value_cmp(b) == std::cmp::Ordering::Less,
                };
                if better {
                    best = Some((cand, t));
                }
            }
        }
    }
    Ok(best.expect("orbit is never empty"))
}

/// Canonical NP representative: like [`npn_canonical`] but without output
/// complementation. This is the matching key for penalty-function cells: negating
/// or permuting a relation's variables maps to spin reversals and qubit
/// relabelings, while complementing the relation table would swap models and
/// countermodels, which no coefficient transform realizes.
pub fn np_canonical(tt: &TruthTable) -> Result<(TruthTable, NPNTransform)> {
    let n = tt.arity();
    if n > 6 {
        return Err(Error::Capacity(format!(
            "NP canonicalization is exhaustive and limited to arity 6 (got {n})"
        )));
    }
    let mut best: Option<(TruthTable, NPNTransform)> = None;
    for perm in permutations(n) {
        for neg in 0..(1u32 << n) {
            let t = NPNTransform {
                perm: perm.clone(),
                input_negations: neg,
                output_negation: false,
            };
            let cand = t.apply(tt);
            let better = match &best {
                None => true,
                Some((b, _)) => cand.value_cmp(b) == std::cmp::Ordering::Less,
            };
            if better {
                best = Some((cand, t));
            }
        }
    }
    Ok(best.expect("orbit is never empty"))
}

/// Count NPN equivalence classes over all functions of the given arity.
///
/// Exhaustive over the full function space, so only feasible up to arity 4
/// (2^16 functions); the paper's reference value for arity 4 is 222.
pub fn npn_class_count(arity: u8) -> Result<usize> {
    if arity > 4 {
        return Err(Error::Capacity(
            "NPN census enumerates all functions; arity must be ≤ 4".into(),
        ));
    }
    let n = arity as u32;
    let nbits = 1u32 << n;
    // Precompute, per group element, the source mask of every output position; a
    // transform application is then 2^n shift-and-or steps on a packed u16/u32.
    let mut maps: Vec<(Vec<u8>, bool)> = Vec::new();
    for perm in permutations(arity) {
        for neg in 0..(1u32 << n) {
            let mut src = vec![0u8; nbits as usize];
            for (m, s) in src.iter_mut().enumerate() {
                let mut x = 0u32;
                for (j, &p) in perm.iter().enumerate() {
                    let bit = ((m as u32) >> p & 1) ^ (neg >> j & 1);
                    x |= bit << j;
                }
                *s = x as u8;
            }
            maps.push((src.clone(), false));
            maps.push((src, true));
        }
    }
    let total = 1u64 << nbits;
    let full_mask: u32 = if nbits == 32 { u32::MAX } else { (1u32 << nbits) - 1 };
    use rayon::prelude::*;
    let canon: Vec<u32> = (0..total)
        .into_par_iter()
        .map(|f| {
            let f = f as u32;
            let mut best = u32::MAX;
            for (src, out_neg) in &maps {
                let mut g = 0u32;
                for (m, &s) in src.iter().enumerate() {
                    g |= (f >> s & 1) << m;
                }
                if *out_neg {
                    g = !g & full_mask;
                }
                if g < best {
                    best = g;
                }
            }
            best
        })
        .collect();
    let mut set: Vec<u32> = canon;
    set.sort_unstable();
    set.dedup();
    Ok(set.len())
}

/// Partition the variables of `tt` into NPN-symmetry classes.
///
/// Variables `i`, `j` are NPN-symmetric when swapping them, combined with negating
/// some subset of variables, leaves the function unchanged. The pairwise relation is
/// closed into equivalence classes by union-find.
pub fn npn_symmetry_classes(tt: &TruthTable) -> Result<Vec<Vec<u8>>> {
    let n = tt.arity();
    if n > 6 {
        return Err(Error::Capacity(format!(
            "symmetry detection is exhaustive and limited to arity 6 (got {n})"
        )));
    }
    let mut parent: Vec<u8> = (0..n).collect();
    fn find(parent: &mut Vec<u8>, i: u8) -> u8 {
        if parent[i as usize] != i {
            let r = find(parent, parent[i as usize]);
            parent[i as usize] = r;
        }
        parent[i as usize]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            'mask: for neg in 0..(1u32 << n) {
                for k in 0..tt.num_assignments() {
                    let x = k ^ neg;
                    // Swap bits i and j of x.
                    let bi = x >> i & 1;
                    let bj = x >> j & 1;
                    let swapped = (x & !((1 << i) | (1 << j))) | (bj << i) | (bi << j);
                    if tt.get(swapped) != tt.get(k) {
                        continue 'mask;
                    }
                }
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri as usize] = rj;
                break 'mask;
            }
        }
    }
    let mut classes: std::collections::BTreeMap<u8, Vec<u8>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        classes.entry(r).or_default().push(i);
    }
    Ok(classes.into_values().collect())
}

/// The relation table `x_{n+1} ↔ F(x_1..x_n)` of an `n`-input function: arity `n+1`,
/// true exactly when the last variable equals `F` of the first `n`.
pub fn relation_of(f: &TruthTable) -> Result<TruthTable> {
    let n = f.arity();
    TruthTable::from_fn(n + 1, |k| {
        let x = k & ((1 << n) - 1);
        let out = k >> n & 1 == 1;
        f.get(x) == out
    })
}

/// The AND relation `x₃ ↔ (x₁ ∧ x₂)`.
pub fn and_relation() -> TruthTable {
    relation_of(&TruthTable::from_fn(2, |k| k == 0b11).unwrap()).unwrap()
}

/// The OR relation `x₃ ↔ (x₁ ∨ x₂)`.
pub fn or_relation() -> TruthTable {
    relation_of(&TruthTable::from_fn(2, |k| k != 0).unwrap()).unwrap()
}

/// The XOR relation `x₃ ↔ (x₁ ⊕ x₂)`.
pub fn xor_relation() -> TruthTable {
    relation_of(&TruthTable::from_fn(2, |k| (k.count_ones() & 1) == 1).unwrap()).unwrap()
}

/// The equivalence `x₁ ↔ x₂`.
pub fn equivalence() -> TruthTable {
    TruthTable::from_fn(2, |k| k == 0 || k == 0b11).unwrap()
}

/// Cardinality constraint: exactly `t` of `n` variables true.
pub fn exactly_k_of_n(t: u32, n: u8) -> TruthTable {
    TruthTable::from_fn(n, |k| k.count_ones() == t).unwrap()
}

/// Cardinality constraint: at most `t` of `n` variables true.
pub fn at_most_k_of_n(t: u32, n: u8) -> TruthTable {
    TruthTable::from_fn(n, |k| k.count_ones() <= t).unwrap()
}

/// Cardinality constraint: at least `t` of `n` variables true.
pub fn at_least_k_of_n(t: u32, n: u8) -> TruthTable {
    TruthTable::from_fn(n, |k| k.count_ones() >= t).unwrap()
}
