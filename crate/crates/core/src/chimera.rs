//! Hardware graphs: the Chimera topology plus small ad-hoc graphs for synthesis.
//!
//! A Chimera graph is a `rows × cols` grid of tiles. Each tile is a complete
//! bipartite graph K_{shore,shore} between a *vertical* and a *horizontal* shore.
//! Vertical qubits couple to the same-position vertical qubits in the tiles above
//! and below; horizontal qubits couple left and right. For `shore = 4` every qubit
//! therefore has degree at most 6.
//!
//! Qubit numbering is deterministic: tiles in row-major order, and within a tile the
//! `shore` vertical qubits first, then the `shore` horizontal qubits.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which side of a tile's bipartition a qubit sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shore {
    /// Couples to the tiles above and below.
    Vertical,
    /// Couples to the tiles left and right.
    Horizontal,
}

/// A Chimera hardware graph with an optional set of disabled (unusable) qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChimeraGraph {
    pub rows: u32,
    pub cols: u32,
    pub shore: u32,
    #[serde(default)]
    pub disabled: BTreeSet<u32>,
}

impl ChimeraGraph {
    /// Build a Chimera graph; see the module docs for the numbering convention.
    pub fn new(rows: u32, cols: u32, shore: u32, disabled: BTreeSet<u32>) -> Result<Self> {
        if rows == 0 || cols == 0 || shore == 0 {
            return Err(Error::Domain(
                "chimera dimensions must all be positive".into(),
            ));
        }
        let g = ChimeraGraph {
            rows,
            cols,
            shore,
            disabled,
        };
        if let Some(&q) = g.disabled.iter().next_back() {
            if q >= g.qubit_count() {
                return Err(Error::Domain(format!(
                    "disabled qubit {q} outside index space 0..{}",
                    g.qubit_count()
                )));
            }
        }
        Ok(g)
    }

    /// Total qubit index space (enabled or not): `rows·cols·2·shore`.
    pub fn qubit_count(&self) -> u32 {
        self.rows * self.cols * 2 * self.shore
    }

    /// Tile coordinates `(row, col)` of a qubit.
    pub fn tile_of(&self, q: u32) -> (u32, u32) {
        let tile = q / (2 * self.shore);
        (tile / self.cols, tile % self.cols)
    }

    /// Shore (vertical/horizontal) of a qubit.
    pub fn shore_of(&self, q: u32) -> Shore {
        if q % (2 * self.shore) < self.shore {
            Shore::Vertical
        } else {
            Shore::Horizontal
        }
    }

    /// Position of a qubit within its shore (`0..shore`).
    pub fn shore_index(&self, q: u32) -> u32 {
        q % (2 * self.shore) % self.shore
    }

    /// Qubit index from tile coordinates, shore and in-shore position.
    pub fn qubit_at(&self, row: u32, col: u32, shore: Shore, idx: u32) -> u32 {
        let base = (row * self.cols + col) * 2 * self.shore;
        match shore {
            Shore::Vertical => base + idx,
            Shore::Horizontal => base + self.shore + idx,
        }
    }

    pub fn is_enabled(&self, q: u32) -> bool {
        q < self.qubit_count() && !self.disabled.contains(&q)
    }

    /// Neighbors of `q` in the effective graph (disabled endpoints excluded).
    pub fn neighbors(&self, q: u32) -> Vec<u32> {
        let mut out = Vec::new();
        if !self.is_enabled(q) {
            return out;
        }
        let (r, c) = self.tile_of(q);
        let idx = self.shore_index(q);
        match self.shore_of(q) {
            Shore::Vertical => {
                for i in 0..self.shore {
                    out.push(self.qubit_at(r, c, Shore::Horizontal, i));
                }
                if r > 0 {
                    out.push(self.qubit_at(r - 1, c, Shore::Vertical, idx));
                }
                if r + 1 < self.rows {
                    out.push(self.qubit_at(r + 1, c, Shore::Vertical, idx));
                }
            }
            Shore::Horizontal => {
                for i in 0..self.shore {
                    out.push(self.qubit_at(r, c, Shore::Vertical, i));
                }
                if c > 0 {
                    out.push(self.qubit_at(r, c - 1, Shore::Horizontal, idx));
                }
                if c + 1 < self.cols {
                    out.push(self.qubit_at(r, c + 1, Shore::Horizontal, idx));
                }
            }
        }
        out.retain(|&p| self.is_enabled(p));
        out.sort_unstable();
        out
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        a != b && self.is_enabled(a) && self.is_enabled(b) && self.neighbors(a).contains(&b)
    }

    /// All enabled qubits in ascending order.
    pub fn enabled_qubits(&self) -> Vec<u32> {
        (0..self.qubit_count()).filter(|&q| self.is_enabled(q)).collect()
    }

    /// All effective edges `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for q in 0..self.qubit_count() {
            for p in self.neighbors(q) {
                if q < p {
                    out.push((q, p));
                }
            }
        }
        out
    }
}

/// An explicit small graph, used for synthesis targets that are not Chimera
/// subgraphs (e.g. the complete graph K₃ of the worked examples).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CustomGraph {
    pub n: u32,
    /// Edges with endpoints ordered `a < b`.
    pub edges: BTreeSet<(u32, u32)>,
}

impl CustomGraph {
    pub fn new(n: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(Error::Domain(format!("invalid edge ({a},{b}) for {n} vertices")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(CustomGraph { n, edges: set })
    }

    /// Complete graph K_n.
    pub fn complete(n: u32) -> Self {
        let mut edges = BTreeSet::new();
        for a in 0..n {
            for b in (a + 1)..n {
                edges.insert((a, b));
            }
        }
        CustomGraph { n, edges }
    }
}

/// The host graph an Ising model lives on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    Chimera(ChimeraGraph),
    Custom(CustomGraph),
}

impl Topology {
    pub fn qubit_count(&self) -> u32 {
        match self {
            Topology::Chimera(g) => g.qubit_count(),
            Topology::Custom(g) => g.n,
        }
    }

    pub fn is_enabled(&self, q: u32) -> bool {
        match self {
            Topology::Chimera(g) => g.is_enabled(q),
            Topology::Custom(g) => q < g.n,
        }
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        match self {
            Topology::Chimera(g) => g.has_edge(a, b),
            Topology::Custom(g) => g.edges.contains(&(a.min(b), a.max(b))),
        }
    }

    pub fn enabled_qubits(&self) -> Vec<u32> {
        match self {
            Topology::Chimera(g) => g.enabled_qubits(),
            Topology::Custom(g) => (0..g.n).collect(),
        }
    }

    pub fn edges(&self) -> Vec<(u32, u32)> {
        match self {
            Topology::Chimera(g) => g.edges(),
            Topology::Custom(g) => g.edges.iter().copied().collect(),
        }
    }
}
