//! Placement enumeration with symmetry reduction.
//!
//! A placement assigns input variables to qubits of a footprint (half-tile, tile,
//! or 2-tile block); the remaining qubits become ancillas. Two placements are
//! equivalent when a footprint automorphism composed with a swap of NPN-symmetric
//! variables maps one to the other. We enumerate vertex colorings (one color per
//! symmetry class, 0 for ancillas) in lexicographic order and mark whole orbits
//! under the automorphism group, keeping the lex-least coloring of each orbit as
//! the representative.

use std::collections::HashSet;
use std::sync::Arc;

use crate::chimera::{ChimeraGraph, Topology};
use crate::{Error, Result};

/// Supported synthesis footprints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Footprint {
    /// 2 + 2 qubits of one tile.
    HalfTile,
    /// One full 8-qubit tile.
    Tile,
    /// Two horizontally adjacent tiles (16 qubits).
    TwoTile,
}

impl Footprint {
    pub fn parse(s: &str) -> Result<Footprint> {
        match s {
            "half-tile" => Ok(Footprint::HalfTile),
            "tile" => Ok(Footprint::Tile),
            "2-tile" => Ok(Footprint::TwoTile),
            _ => Err(Error::Domain(format!("unknown footprint {s:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Footprint::HalfTile => "half-tile",
            Footprint::Tile => "tile",
            Footprint::TwoTile => "2-tile",
        }
    }

    /// Host graph the footprint lives on.
    pub fn graph(&self) -> Arc<Topology> {
        let cols = if *self == Footprint::TwoTile { 2 } else { 1 };
        Arc::new(Topology::Chimera(
            ChimeraGraph::new(1, cols, 4, Default::default()).unwrap(),
        ))
    }

    /// Footprint qubits in position order.
    pub fn qubits(&self) -> Vec<u32> {
        match self {
            Footprint::HalfTile => vec![0, 1, 4, 5],
            Footprint::Tile => (0..8).collect(),
            Footprint::TwoTile => (0..16).collect(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.qubits().len()
    }

    /// Generators of the automorphism group, as permutations of positions.
    fn generators(&self) -> Vec<Vec<u8>> {
        fn swap(n: usize, a: usize, b: usize) -> Vec<u8> {
            let mut p: Vec<u8> = (0..n as u8).collect();
            p.swap(a, b);
            p
        }
        fn cycle(n: usize, range: std::ops::Range<usize>) -> Vec<u8> {
            let mut p: Vec<u8> = (0..n as u8).collect();
            let first = p[range.start];
            for i in range.start..range.end - 1 {
                p[i] = p[i + 1];
            }
            p[range.end - 1] = first;
            p
        }
        match self {
            Footprint::HalfTile => vec![
                swap(4, 0, 1),           // the two vertical qubits
                swap(4, 2, 3),           // the two horizontal qubits
                vec![2, 3, 0, 1],        // shore swap
            ],
            Footprint::Tile => vec![
                swap(8, 0, 1),
                cycle(8, 0..4),          // S₄ on the vertical shore
                swap(8, 4, 5),
                cycle(8, 4..8),          // S₄ on the horizontal shore
                vec![4, 5, 6, 7, 0, 1, 2, 3], // shore swap
            ],
            Footprint::TwoTile => {
                // Positions: 0..4 vertical tile 0, 4..8 horizontal tile 0,
                // 8..12 vertical tile 1, 12..16 horizontal tile 1. Horizontal
                // qubits permute in tandem (they share inter-tile couplers);
                // the mirror swaps the two tiles.
                let tandem_swap = {
                    let mut p: Vec<u8> = (0..16).collect();
                    p.swap(4, 5);
                    p.swap(12, 13);
                    p
                };
                let tandem_cycle = {
                    let mut p: Vec<u8> = (0..16).collect();
                    for (s, e) in [(4usize, 8usize), (12, 16)] {
                        let first = p[s];
                        for i in s..e - 1 {
                            p[i] = p[i + 1];
                        }
                        p[e - 1] = first;
                    }
                    p
                };
                let mirror: Vec<u8> = (0..16).map(|i| (i + 8) % 16).collect();
                vec![
                    swap(16, 0, 1),
                    cycle(16, 0..4),
                    swap(16, 8, 9),
                    cycle(16, 8..12),
                    tandem_swap,
                    tandem_cycle,
                    mirror,
                ]
            }
        }
    }

    /// The full automorphism group, closed from the generators.
    pub fn automorphisms(&self) -> Vec<Vec<u8>> {
        let gens = self.generators();
        let n = self.capacity();
        let identity: Vec<u8> = (0..n as u8).collect();
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        let mut queue = vec![identity.clone()];
        seen.insert(identity);
        while let Some(p) = queue.pop() {
            for g in &gens {
                // Compose: (g∘p)(i) = g[p[i]].
                let q: Vec<u8> = p.iter().map(|&i| g[i as usize]).collect();
                if seen.insert(q.clone()) {
                    queue.push(q);
                }
            }
        }
        seen.into_iter().collect()
    }
}

/// A concrete variable placement on a footprint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    /// Input index → qubit.
    pub inputs: Vec<u32>,
    /// Remaining footprint qubits, ascending.
    pub ancillas: Vec<u32>,
}

/// Enumerate inequivalent placements of `n` input variables (grouped into the given
/// NPN-symmetry classes) on the footprint. Returns one representative per orbit, in
/// lexicographic coloring order.
pub fn enumerate_placements(
    footprint: Footprint,
    n: usize,
    symmetry_classes: &[Vec<u8>],
) -> Result<Vec<Placement>> {
    let positions = footprint.capacity();
    if n > positions {
        return Err(Error::Capacity(format!(
            "{n} inputs exceed the {positions}-qubit footprint"
        )));
    }
    let covered: usize = symmetry_classes.iter().map(Vec::len).sum();
    if covered != n {
        return Err(Error::Domain(
            "symmetry classes must partition the input variables".into(),
        ));
    }
    // Color counts: color 0 = ancillas, color k = k-th symmetry class.
    let mut counts: Vec<usize> = vec![positions - n];
    counts.extend(symmetry_classes.iter().map(Vec::len));
    let group = footprint.automorphisms();
    let qubits = footprint.qubits();

    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut reps: Vec<Vec<u8>> = Vec::new();
    let mut coloring: Vec<u8> = Vec::with_capacity(positions);
    enumerate_colorings(&mut coloring, positions, &mut counts, &mut |c| {
        if seen.contains(c) {
            return;
        }
        reps.push(c.to_vec());
        for g in &group {
            // Orbit element: color of position p is c[g[p]].
            let img: Vec<u8> = (0..positions).map(|p| c[g[p] as usize]).collect();
            seen.insert(img);
        }
    });

    let placements = reps
        .iter()
        .map(|c| {
            let mut inputs = vec![0u32; n];
            for (k, class) in symmetry_classes.iter().enumerate() {
                let slots: Vec<u32> = (0..positions)
                    .filter(|&p| c[p] as usize == k + 1)
                    .map(|p| qubits[p])
                    .collect();
                for (v, q) in class.iter().zip(slots) {
                    inputs[*v as usize] = q;
                }
            }
            let ancillas = (0..positions)
                .filter(|&p| c[p] == 0)
                .map(|p| qubits[p])
                .collect();
            Placement { inputs, ancillas }
        })
        .collect();
    Ok(placements)
}

fn enumerate_colorings(
    prefix: &mut Vec<u8>,
    positions: usize,
    counts: &mut Vec<usize>,
    visit: &mut impl FnMut(&[u8]),
) {
    if prefix.len() == positions {
        visit(prefix);
        return;
    }
    for color in 0..counts.len() {
        if counts[color] == 0 {
            continue;
        }
        counts[color] -= 1;
        prefix.push(color as u8);
        enumerate_colorings(prefix, positions, counts, visit);
        prefix.pop();
        counts[color] += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_orders() {
        assert_eq!(Footprint::HalfTile.automorphisms().len(), 8);
        assert_eq!(Footprint::Tile.automorphisms().len(), 1152); // (4!)²·2
        assert_eq!(Footprint::TwoTile.automorphisms().len(), 27648); // (4!)³·2
    }

    #[test]
    fn automorphisms_preserve_edges() {
        for fp in [Footprint::HalfTile, Footprint::Tile, Footprint::TwoTile] {
            let graph = fp.graph();
            let qubits = fp.qubits();
            for g in fp.automorphisms() {
                for i in 0..qubits.len() {
                    for j in (i + 1)..qubits.len() {
                        let e = graph.has_edge(qubits[i], qubits[j]);
                        let ge = graph.has_edge(
                            qubits[g[i] as usize],
                            qubits[g[j] as usize],
                        );
                        assert_eq!(e, ge, "{fp:?} element {g:?} breaks edge ({i},{j})");
                    }
                }
            }
        }
    }

    fn distinct_classes(n: usize) -> Vec<Vec<u8>> {
        (0..n as u8).map(|v| vec![v]).collect()
    }

    #[test]
    fn tile_distinguishable_eight() {
        // Example 7: 8 distinguishable variables on a tile → 35 placements.
        let p = enumerate_placements(Footprint::Tile, 8, &distinct_classes(8)).unwrap();
        assert_eq!(p.len(), 35);
    }

    #[test]
    fn half_tile_four() {
        let p = enumerate_placements(Footprint::HalfTile, 4, &distinct_classes(4)).unwrap();
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn tile_and4_symmetric() {
        // 4-input AND: all inputs in one symmetry class, 4 ancillas → 3 placements.
        let p = enumerate_placements(Footprint::Tile, 4, &[vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(p.len(), 3);
        for pl in &p {
            assert_eq!(pl.inputs.len(), 4);
            assert_eq!(pl.ancillas.len(), 4);
        }
    }

    #[test]
    fn placements_are_injective_and_cover() {
        let p = enumerate_placements(Footprint::Tile, 3, &[vec![0, 1], vec![2]]).unwrap();
        for pl in &p {
            let mut all: Vec<u32> = pl.inputs.iter().chain(&pl.ancillas).copied().collect();
            all.sort_unstable();
            assert_eq!(all, (0..8).collect::<Vec<u32>>());
        }
    }
}
