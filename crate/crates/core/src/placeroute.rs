//! Placement, routing, assembly, and minor-embedding verification.
//!
//! Mapped cells are assigned to Chimera tiles by simulated annealing over
//! half-perimeter wire length, variable chains are routed on a reduced
//! per-tile-shore graph (Steiner trees under min-max resource sharing), a
//! disjoint tree per net is selected, chains get concrete qubits, and the final
//! Ising model is the disjoint sum of cell penalties plus chain penalties.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::chimera::{ChimeraGraph, Shore, Topology};
use crate::ising::IsingModel;
use crate::penalty::PenaltyFunction;
use crate::rat::{rint, Rat};
use crate::synth::Footprint;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Netlist
// ---------------------------------------------------------------------------

/// One placed-to-be cell: an instantiated penalty in footprint-local
/// coordinates plus the logical variable carried by each input pin.
#[derive(Debug, Clone)]
pub struct NetlistCell {
    pub footprint: Footprint,
    pub penalty: PenaltyFunction,
    /// Logical variable per penalty input, same order as `penalty.inputs`.
    pub vars: Vec<u32>,
}

#[derive(Debug, Clone, Default)]
pub struct Netlist {
    pub cells: Vec<NetlistCell>,
}

impl Netlist {
    pub fn new(cells: Vec<NetlistCell>) -> Result<Netlist> {
        for (i, c) in cells.iter().enumerate() {
            if c.vars.len() != c.penalty.inputs.len() {
                return Err(Error::Domain(format!(
                    "cell {i}: {} variables for {} pins",
                    c.vars.len(),
                    c.penalty.inputs.len()
                )));
            }
        }
        Ok(Netlist { cells })
    }

    /// Nets: logical variable → pins as `(cell index, pin index)`.
    pub fn nets(&self) -> BTreeMap<u32, Vec<(usize, usize)>> {
        let mut nets: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
        for (ci, cell) in self.cells.iter().enumerate() {
            for (pi, &v) in cell.vars.iter().enumerate() {
                nets.entry(v).or_default().push((ci, pi));
            }
        }
        nets
    }
}

// ---------------------------------------------------------------------------
// Placement
// ---------------------------------------------------------------------------

/// A cell's location: tile plus the half-tile slot (0 = shore positions 0–1,
/// 1 = positions 2–3; full-tile and 2-tile cells always use slot 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Site {
    pub row: u32,
    pub col: u32,
    pub slot: u8,
}

/// Slots a footprint occupies, as `(column offset, slot)` pairs.
fn footprint_slots(fp: Footprint, slot: u8) -> Vec<(u32, u8)> {
    match fp {
        Footprint::HalfTile => vec![(0, slot)],
        Footprint::Tile => vec![(0, 0), (0, 1)],
        Footprint::TwoTile => vec![(0, 0), (0, 1), (1, 0), (1, 1)],
    }
}

fn slot_count(fp: Footprint) -> u8 {
    if fp == Footprint::HalfTile {
        2
    } else {
        1
    }
}

#[derive(Debug, Clone)]
pub struct Placement {
    pub sites: Vec<Site>,
    /// Final total half-perimeter wire length over nets.
    pub hpwl: u64,
}

/// Translate a cell-local qubit to the global graph for a given site.
fn global_at(graph: &ChimeraGraph, cell: &NetlistCell, site: Site, local: u32) -> u32 {
    let col_off = local / 8;
    let rem = local % 8;
    let shore = if rem < 4 { Shore::Vertical } else { Shore::Horizontal };
    let mut pos = rem % 4;
    if cell.footprint == Footprint::HalfTile {
        pos += 2 * site.slot as u32;
    }
    graph.qubit_at(site.row, site.col + col_off, shore, pos)
}

impl Placement {
    /// Translate a cell-local qubit to the global graph.
    pub fn global_qubit(&self, graph: &ChimeraGraph, cell: &NetlistCell, idx: usize, local: u32) -> u32 {
        global_at(graph, cell, self.sites[idx], local)
    }

    /// All global qubits a cell's penalty touches (inputs then ancillas).
    pub fn cell_qubits(&self, graph: &ChimeraGraph, netlist: &Netlist, idx: usize) -> Vec<u32> {
        let cell = &netlist.cells[idx];
        cell.penalty
            .inputs
            .iter()
            .chain(&cell.penalty.ancillas)
            .map(|&l| self.global_qubit(graph, cell, idx, l))
            .collect()
    }

    /// Global qubit of one pin.
    pub fn pin_qubit(&self, graph: &ChimeraGraph, netlist: &Netlist, cell: usize, pin: usize) -> u32 {
        let c = &netlist.cells[cell];
        self.global_qubit(graph, c, cell, c.penalty.inputs[pin])
    }
}

struct Floorplan<'a> {
    netlist: &'a Netlist,
    graph: &'a ChimeraGraph,
    /// (row, col, slot) → occupying cell.
    occ: HashMap<(u32, u32, u8), usize>,
    sites: Vec<Site>,
}

impl<'a> Floorplan<'a> {
    fn site_legal(&self, idx: usize, site: Site) -> bool {
        let cell = &self.netlist.cells[idx];
        let fp = cell.footprint;
        if site.slot >= slot_count(fp) {
            return false;
        }
        let width = if fp == Footprint::TwoTile { 2 } else { 1 };
        if site.row >= self.graph.rows || site.col + width > self.graph.cols {
            return false;
        }
        // Every qubit the penalty touches must be enabled.
        cell.penalty
            .inputs
            .iter()
            .chain(&cell.penalty.ancillas)
            .all(|&l| self.graph.is_enabled(global_at(self.graph, cell, site, l)))
    }

    fn occupants(&self, idx: usize, site: Site) -> Option<BTreeSet<usize>> {
        let fp = self.netlist.cells[idx].footprint;
        let mut set = BTreeSet::new();
        for (dc, slot) in footprint_slots(fp, site.slot) {
            if let Some(&o) = self.occ.get(&(site.row, site.col + dc, slot)) {
                if o != idx {
                    set.insert(o);
                }
            }
        }
        Some(set)
    }

    fn remove(&mut self, idx: usize) {
        let site = self.sites[idx];
        let fp = self.netlist.cells[idx].footprint;
        for (dc, slot) in footprint_slots(fp, site.slot) {
            self.occ.remove(&(site.row, site.col + dc, slot));
        }
    }

    fn put(&mut self, idx: usize, site: Site) {
        let fp = self.netlist.cells[idx].footprint;
        for (dc, slot) in footprint_slots(fp, site.slot) {
            self.occ.insert((site.row, site.col + dc, slot), idx);
        }
        self.sites[idx] = site;
    }

    /// Routability keepout. Cells never share a tile (a fully packed tile has
    /// capacity 0 and blocks both pin escapes and through-routing), and every
    /// tile a cell touches must have all tiles within Manhattan distance
    /// `radius` free of other cells, so each pin escapes into open fabric.
    /// A wider radius widens routing corridors and caps how many cells can
    /// contest one free tile.
    fn keepout_ok(&self, idx: usize, radius: i64) -> bool {
        let site = self.sites[idx];
        let fp = self.netlist.cells[idx].footprint;
        for (dc, slot) in footprint_slots(fp, site.slot) {
            let (r, c) = (site.row, site.col + dc);
            // No second cell in the same tile.
            for other_slot in 0..2u8 {
                if other_slot != slot {
                    if let Some(&o) = self.occ.get(&(r, c, other_slot)) {
                        if o != idx {
                            return false;
                        }
                    }
                }
            }
            let (r, c) = (r as i64, c as i64);
            for dr in -radius..=radius {
                for dc in -(radius - dr.abs())..=(radius - dr.abs()) {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (nr, nc) = (r + dr, c + dc);
                    if nr < 0 || nc < 0 || nr >= self.graph.rows as i64 || nc >= self.graph.cols as i64 {
                        continue;
                    }
                    for nslot in 0..2u8 {
                        if let Some(&o) = self.occ.get(&(nr as u32, nc as u32, nslot)) {
                            if o != idx {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }
}

/// Simulated-annealing placement minimizing total HPWL. Deterministic given the
/// seed; `budget` is the number of proposed moves.
pub fn place(netlist: &Netlist, graph: &ChimeraGraph, seed: u64, budget: usize) -> Result<Placement> {
    place_impl(netlist, graph, seed, budget, 0)
}

/// [`place`] with the routability keepout: tiles within Manhattan distance
/// `radius` of an occupied tile stay cell-free, guaranteeing free routing
/// tiles next to every pin.
pub fn place_spaced(
    netlist: &Netlist,
    graph: &ChimeraGraph,
    seed: u64,
    budget: usize,
    radius: u32,
) -> Result<Placement> {
    place_impl(netlist, graph, seed, budget, i64::from(radius))
}

fn place_impl(
    netlist: &Netlist,
    graph: &ChimeraGraph,
    seed: u64,
    budget: usize,
    keepout: i64,
) -> Result<Placement> {
    let n = netlist.cells.len();
    if n == 0 {
        return Ok(Placement { sites: Vec::new(), hpwl: 0 });
    }
    // Net → cells and cell → nets incidence for connectivity-driven placement.
    let net_cells: Vec<Vec<usize>> = netlist
        .nets()
        .values()
        .map(|pins| {
            let mut cs: Vec<usize> = pins.iter().map(|&(c, _)| c).collect();
            cs.sort_unstable();
            cs.dedup();
            cs
        })
        .collect();
    let mut cell_nets: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, cs) in net_cells.iter().enumerate() {
        for &c in cs {
            cell_nets[c].push(k);
        }
    }
    let net_hpwl = |k: usize, sites: &[Site]| -> u64 {
        let mut rmin = u32::MAX;
        let mut rmax = 0;
        let mut cmin = u32::MAX;
        let mut cmax = 0;
        for &ci in &net_cells[k] {
            let s = sites[ci];
            let width = if netlist.cells[ci].footprint == Footprint::TwoTile { 1 } else { 0 };
            rmin = rmin.min(s.row);
            rmax = rmax.max(s.row);
            cmin = cmin.min(s.col);
            cmax = cmax.max(s.col + width);
        }
        u64::from(rmax - rmin) + u64::from(cmax - cmin)
    };
    let mut plan = Floorplan {
        netlist,
        graph,
        occ: HashMap::new(),
        sites: vec![Site { row: 0, col: 0, slot: 0 }; n],
    };
    // Greedy initial placement: largest cells first, then best-connected, each
    // at the closest legal site to the centroid of its already-placed
    // neighbors (grid center when none are placed yet).
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| {
        (
            std::cmp::Reverse(footprint_slots(netlist.cells[i].footprint, 0).len()),
            std::cmp::Reverse(cell_nets[i].len()),
            i,
        )
    });
    let mut is_placed = vec![false; n];
    for &i in &order {
        let (mut tr, mut tc, mut cnt) = (0u64, 0u64, 0u64);
        for &k in &cell_nets[i] {
            for &j in &net_cells[k] {
                if is_placed[j] {
                    tr += u64::from(plan.sites[j].row);
                    tc += u64::from(plan.sites[j].col);
                    cnt += 1;
                }
            }
        }
        let (tr, tc) = if cnt > 0 {
            ((tr / cnt) as i64, (tc / cnt) as i64)
        } else {
            (i64::from(graph.rows) / 2, i64::from(graph.cols) / 2)
        };
        let mut tiles: Vec<(i64, u32, u32)> = (0..graph.rows)
            .flat_map(|r| (0..graph.cols).map(move |c| (r, c)))
            .map(|(r, c)| ((i64::from(r) - tr).abs() + (i64::from(c) - tc).abs(), r, c))
            .collect();
        tiles.sort_unstable();
        let mut placed = false;
        'scan: for &(_, row, col) in &tiles {
            for slot in 0..slot_count(netlist.cells[i].footprint) {
                let site = Site { row, col, slot };
                if plan.site_legal(i, site) && plan.occupants(i, site) == Some(BTreeSet::new()) {
                    plan.put(i, site);
                    if keepout && !plan.keepout_ok(i) {
                        plan.remove(i);
                        continue;
                    }
                    placed = true;
                    break 'scan;
                }
            }
        }
        if !placed {
            return Err(Error::Placement(format!(
                "no free site for cell {i} on the {}×{} graph",
                graph.rows, graph.cols
            )));
        }
        is_placed[i] = true;
    }
    let mut net_cost: Vec<u64> = (0..net_cells.len()).map(|k| net_hpwl(k, &plan.sites)).collect();
    let mut cost: u64 = net_cost.iter().sum();
    let mut best = (plan.sites.clone(), cost);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t0: f64 = 2.0;
    let t1: f64 = 0.01;
    for step in 0..budget {
        let temp = t0 * (t1 / t0).powf(step as f64 / budget.max(1) as f64);
        let i = rng.gen_range(0..n);
        let site = Site {
            row: rng.gen_range(0..graph.rows),
            col: rng.gen_range(0..graph.cols),
            slot: rng.gen_range(0..slot_count(netlist.cells[i].footprint)),
        };
        if !plan.site_legal(i, site) {
            continue;
        }
        let others = plan.occupants(i, site).unwrap();
        // Allow empty-target relocation or a 1:1 swap of same-shape cells.
        let swap = match others.len() {
            0 => None,
            1 => {
                let j = *others.iter().next().unwrap();
                if netlist.cells[j].footprint == netlist.cells[i].footprint
                    && plan.site_legal(j, plan.sites[i])
                {
                    Some(j)
                } else {
                    continue;
                }
            }
            _ => continue,
        };
        let old_i = plan.sites[i];
        plan.remove(i);
        if let Some(j) = swap {
            plan.remove(j);
            plan.put(j, old_i);
        }
        plan.put(i, site);
        let keepout_fail =
            keepout && (!plan.keepout_ok(i) || swap.map_or(false, |j| !plan.keepout_ok(j)));
        // Only nets touching the moved cells change.
        let mut touched: Vec<usize> = cell_nets[i].clone();
        if let Some(j) = swap {
            touched.extend(&cell_nets[j]);
        }
        touched.sort_unstable();
        touched.dedup();
        let delta: f64 = touched
            .iter()
            .map(|&k| net_hpwl(k, &plan.sites) as f64 - net_cost[k] as f64)
            .sum();
        if !keepout_fail && (delta <= 0.0 || rng.gen::<f64>() < (-delta / temp.max(1e-9)).exp()) {
            for &k in &touched {
                let new_k = net_hpwl(k, &plan.sites);
                cost = cost - net_cost[k] + new_k;
                net_cost[k] = new_k;
            }
            if cost < best.1 {
                best = (plan.sites.clone(), cost);
            }
        } else {
            // Undo.
            plan.remove(i);
            if let Some(j) = swap {
                plan.remove(j);
                plan.put(j, site);
            }
            plan.put(i, old_i);
        }
    }
    Ok(Placement { sites: best.0, hpwl: best.1 })
}

// ---------------------------------------------------------------------------
// Reduced routing graph
// ---------------------------------------------------------------------------

/// The routing graph: one super-vertex per tile shore (`(tile)·2 + 0` vertical,
/// `+1` horizontal) with capacity 4 minus the qubits consumed by placed cells.
#[derive(Debug, Clone)]
pub struct ReducedGraph {
    pub rows: u32,
    pub cols: u32,
    pub adj: Vec<Vec<usize>>,
    pub cap: Vec<u32>,
    /// Enabled, unoccupied qubits per super-vertex, ascending.
    pub free_qubits: Vec<Vec<u32>>,
}

impl ReducedGraph {
    pub fn num_vertices(&self) -> usize {
        (self.rows * self.cols * 2) as usize
    }

    /// Super-vertex containing a qubit.
    pub fn vertex_of(&self, graph: &ChimeraGraph, q: u32) -> usize {
        let (r, c) = graph.tile_of(q);
        let dir = if graph.shore_of(q) == Shore::Vertical { 0 } else { 1 };
        ((r * self.cols + c) * 2) as usize + dir
    }
}

/// Contract each tile shore to a super-vertex; capacity = enabled free qubits.
pub fn reduce_graph(graph: &ChimeraGraph, occupied: &BTreeSet<u32>) -> ReducedGraph {
    let (rows, cols) = (graph.rows, graph.cols);
    let nv = (rows * cols * 2) as usize;
    let mut adj = vec![Vec::new(); nv];
    let mut free_qubits = vec![Vec::new(); nv];
    let sv = |r: u32, c: u32, dir: usize| ((r * cols + c) * 2) as usize + dir;
    for r in 0..rows {
        for c in 0..cols {
            let v = sv(r, c, 0);
            let h = sv(r, c, 1);
            adj[v].push(h);
            adj[h].push(v);
            if r + 1 < rows {
                adj[v].push(sv(r + 1, c, 0));
                adj[sv(r + 1, c, 0)].push(v);
            }
            if c + 1 < cols {
                adj[h].push(sv(r, c + 1, 1));
                adj[sv(r, c + 1, 1)].push(h);
            }
        }
    }
    for q in 0..graph.qubit_count() {
        if graph.is_enabled(q) && !occupied.contains(&q) {
            let (r, c) = graph.tile_of(q);
            let dir = if graph.shore_of(q) == Shore::Vertical { 0 } else { 1 };
            free_qubits[sv(r, c, dir)].push(q);
        }
    }
    let cap = free_qubits.iter().map(|f| f.len() as u32).collect();
    ReducedGraph { rows, cols, adj, cap, free_qubits }
}

// ---------------------------------------------------------------------------
// Steiner trees and resource-sharing routing
// ---------------------------------------------------------------------------

/// A tree in a vertex-weighted graph: sorted vertices plus its edges.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Tree {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Tree {
    pub fn weight(&self, w: &[f64]) -> f64 {
        self.vertices.iter().map(|&v| w[v]).sum()
    }
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);
impl Eq for HeapItem {}
impl Ord for HeapItem {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        // Reverse for a min-heap; ties broken by smaller vertex index.
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

/// MST-based 2-approximate Steiner tree on a vertex-weighted graph: edge weight
/// is the half-sum of its endpoint weights; grows the tree by repeatedly
/// attaching the nearest missing terminal. Non-terminal vertices must be
/// `usable`; terminals are always traversable.
pub fn steiner_tree(adj: &[Vec<usize>], weights: &[f64], usable: &[bool], terminals: &[usize]) -> Result<Tree> {
    if terminals.is_empty() {
        return Err(Error::Routing("net has no terminals".into()));
    }
    let term_set: BTreeSet<usize> = terminals.iter().copied().collect();
    let mut in_tree: BTreeSet<usize> = BTreeSet::from([terminals[0]]);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut remaining: BTreeSet<usize> = term_set.iter().copied().filter(|&t| t != terminals[0]).collect();
    while !remaining.is_empty() {
        // Multi-source Dijkstra from the current tree.
        let n = adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        for &v in &in_tree {
            dist[v] = 0.0;
            heap.push(HeapItem(0.0, v));
        }
        let mut hit: Option<usize> = None;
        while let Some(HeapItem(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            if remaining.contains(&u) {
                hit = Some(u);
                break;
            }
            for &v in &adj[u] {
                if !usable[v] && !term_set.contains(&v) {
                    continue;
                }
                let nd = d + (weights[u] + weights[v]) / 2.0;
                if nd < dist[v] {
                    dist[v] = nd;
                    prev[v] = u;
                    heap.push(HeapItem(nd, v));
                }
            }
        }
        let Some(t) = hit else {
            return Err(Error::Routing("terminals are mutually unreachable".into()));
        };
        // Attach the path.
        let mut v = t;
        while !in_tree.contains(&v) {
            let u = prev[v];
            edges.push((u.min(v), u.max(v)));
            in_tree.insert(v);
            v = u;
        }
        remaining.remove(&t);
    }
    // Prune non-terminal leaves (possible when paths overlapped).
    loop {
        let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
        for &(a, b) in &edges {
            *degree.entry(a).or_default() += 1;
            *degree.entry(b).or_default() += 1;
        }
        let leaf = in_tree
            .iter()
            .copied()
            .find(|v| !term_set.contains(v) && degree.get(v).copied().unwrap_or(0) <= 1);
        match leaf {
            Some(v) => {
                in_tree.remove(&v);
                edges.retain(|&(a, b)| a != v && b != v);
            }
            None => break,
        }
    }
    let mut vertices: Vec<usize> = in_tree.into_iter().collect();
    vertices.sort_unstable();
    edges.sort_unstable();
    Ok(Tree { vertices, edges })
}

/// Resource-sharing routing (the min-max allocation loop): `t` iterations, each
/// generating one weighted Steiner tree per net and multiplying the used
/// vertices' weights by `alpha`. Returns each net's empirical tree distribution
/// `count / t`, smallest trees first.
pub fn route(
    reduced: &ReducedGraph,
    terminals: &[Vec<usize>],
    t: usize,
    alpha: f64,
) -> Result<Vec<Vec<(Tree, f64)>>> {
    if t == 0 || alpha <= 1.0 {
        return Err(Error::Config("routing requires t ≥ 1 and α > 1".into()));
    }
    let usable: Vec<bool> = reduced.cap.iter().map(|&c| c > 0).collect();
    let mut weights: Vec<f64> = vec![1.0; reduced.num_vertices()];
    let mut counts: Vec<BTreeMap<Tree, usize>> = vec![BTreeMap::new(); terminals.len()];
    for _ in 0..t {
        for (i, terms) in terminals.iter().enumerate() {
            let tree = steiner_tree(&reduced.adj, &weights, &usable, terms).map_err(|e| {
                Error::Routing(format!("net {i}: {e}"))
            })?;
            for &v in &tree.vertices {
                weights[v] *= alpha;
            }
            *counts[i].entry(tree).or_default() += 1;
        }
    }
    Ok(counts
        .into_iter()
        .map(|m| {
            let mut d: Vec<(Tree, f64)> = m
                .into_iter()
                .map(|(tree, c)| (tree, c as f64 / t as f64))
                .collect();
            d.sort_by(|a, b| a.0.vertices.len().cmp(&b.0.vertices.len()).then(a.0.cmp(&b.0)));
            d
        })
        .collect())
}

/// Routing qubits a tree consumes at each vertex: 1 per non-terminal vertex
/// (terminal vertices hold the net's pin qubits already).
fn tree_demand(tree: &Tree, terms: &BTreeSet<usize>) -> Vec<usize> {
    tree.vertices
        .iter()
        .copied()
        .filter(|v| !terms.contains(v))
        .collect()
}

/// Pick one tree per net, respecting super-vertex capacities and minimizing the
/// total vertex count: exact branch-and-bound with a greedy warm start, falling
/// back to greedy plus rip-up-and-reroute (≤ 3 rounds) when the budget runs out.
pub fn select_trees(
    reduced: &ReducedGraph,
    terminals: &[Vec<usize>],
    dists: &[Vec<(Tree, f64)>],
    node_budget: usize,
) -> Result<Vec<Tree>> {
    let nets = terminals.len();
    let term_sets: Vec<BTreeSet<usize>> = terminals.iter().map(|t| t.iter().copied().collect()).collect();
    // Nets with the fewest candidates first.
    let mut order: Vec<usize> = (0..nets).collect();
    order.sort_by_key(|&i| (dists[i].len(), i));
    let fits = |cap: &[i64], demand: &[usize]| demand.iter().all(|&v| cap[v] >= 1);
    let apply = |cap: &mut [i64], demand: &[usize], sign: i64| {
        for &v in demand {
            cap[v] += sign;
        }
    };
    let greedy = |cap0: &[i64]| -> Option<(Vec<Option<Tree>>, usize)> {
        let mut cap = cap0.to_vec();
        let mut chosen: Vec<Option<Tree>> = vec![None; nets];
        let mut cost = 0;
        for &i in &order {
            let mut done = false;
            for (tree, _) in &dists[i] {
                let demand = tree_demand(tree, &term_sets[i]);
                if fits(&cap, &demand) {
                    apply(&mut cap, &demand, -1);
                    cost += tree.vertices.len();
                    chosen[i] = Some(tree.clone());
                    done = true;
                    break;
                }
            }
            if !done {
                return None;
            }
        }
        Some((chosen, cost))
    };
    let cap0: Vec<i64> = reduced.cap.iter().map(|&c| i64::from(c)).collect();
    let min_size: Vec<usize> = order
        .iter()
        .map(|&i| dists[i].iter().map(|(t, _)| t.vertices.len()).min().unwrap_or(0))
        .collect();
    let suffix_min: Vec<usize> = {
        let mut s = vec![0; order.len() + 1];
        for k in (0..order.len()).rev() {
            s[k] = s[k + 1] + min_size[k];
        }
        s
    };
    let mut incumbent = greedy(&cap0);
    // Exact branch-and-bound on the candidate choices.
    struct Bb<'a> {
        order: &'a [usize],
        dists: &'a [Vec<(Tree, f64)>],
        term_sets: &'a [BTreeSet<usize>],
        suffix_min: &'a [usize],
        best: Option<(Vec<Option<Tree>>, usize)>,
        nodes: usize,
        budget: usize,
    }
    impl Bb<'_> {
        fn go(&mut self, k: usize, cap: &mut [i64], partial: &mut Vec<Option<Tree>>, cost: usize) {
            if self.nodes >= self.budget {
                return;
            }
            self.nodes += 1;
            if let Some((_, b)) = &self.best {
                if cost + self.suffix_min[k] >= *b {
                    return;
                }
            }
            if k == self.order.len() {
                self.best = Some((partial.clone(), cost));
                return;
            }
            let i = self.order[k];
            for (tree, _) in &self.dists[i] {
                let demand = tree_demand(tree, &self.term_sets[i]);
                if demand.iter().all(|&v| cap[v] >= 1) {
                    for &v in &demand {
                        cap[v] -= 1;
                    }
                    partial[i] = Some(tree.clone());
                    self.go(k + 1, cap, partial, cost + tree.vertices.len());
                    partial[i] = None;
                    for &v in &demand {
                        cap[v] += 1;
                    }
                }
            }
        }
    }
    let mut bb = Bb {
        order: &order,
        dists,
        term_sets: &term_sets,
        suffix_min: &suffix_min,
        best: incumbent.clone(),
        nodes: 0,
        budget: node_budget,
    };
    let mut cap = cap0.clone();
    let mut partial = vec![None; nets];
    bb.go(0, &mut cap, &mut partial, 0);
    if bb.nodes < node_budget || bb.best.is_some() {
        incumbent = bb.best;
    }
    if let Some((chosen, _)) = incumbent {
        return Ok(chosen.into_iter().map(Option::unwrap).collect());
    }
    // Negotiated-congestion fallback: reroute every net each round on the
    // reduced graph with vertex weights that grow with present overuse and
    // accumulated history, allowing temporary overuse until it negotiates away.
    let nv = reduced.num_vertices();
    let usable: Vec<bool> = reduced.cap.iter().map(|&c| c > 0).collect();
    let base = vec![1.0f64; nv];
    let mut current: Vec<Tree> = Vec::with_capacity(nets);
    for (i, terms) in terminals.iter().enumerate() {
        match dists[i].first() {
            Some((t, _)) => current.push(t.clone()),
            None => current.push(steiner_tree(&reduced.adj, &base, &usable, terms)?),
        }
    }
    let mut usage = vec![0i64; nv];
    for (i, t) in current.iter().enumerate() {
        for v in tree_demand(t, &term_sets[i]) {
            usage[v] += 1;
        }
    }
    let mut hist = vec![0.0f64; nv];
    let mut pres = 1.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x517cc1b7);
    let mut order: Vec<usize> = (0..nets).collect();
    for _round in 0..512 {
        if usage.iter().zip(&cap0).all(|(&u, &c)| u <= c) {
            return Ok(current);
        }
        if std::env::var("ROUTE_DEBUG").is_ok() && _round % 32 == 0 {
            let over: i64 = usage.iter().zip(&cap0).map(|(&u, &c)| (u - c).max(0)).sum();
            eprintln!("round {_round}: total overuse {over}");
        }
        order.shuffle(&mut rng);
        for &i in &order {
            for v in tree_demand(&current[i], &term_sets[i]) {
                usage[v] -= 1;
            }
            // Small noise breaks ties so equal-cost nets stop trading places.
            let weights: Vec<f64> = (0..nv)
                .map(|v| {
                    let over = (usage[v] + 1 - cap0[v]).max(0) as f64;
                    (1.0 + hist[v] + pres * over) * (1.0 + 0.05 * rng.gen::<f64>())
                })
                .collect();
            current[i] = steiner_tree(&reduced.adj, &weights, &usable, &terminals[i])?;
            for v in tree_demand(&current[i], &term_sets[i]) {
                usage[v] += 1;
            }
        }
        for v in 0..nv {
            if usage[v] > cap0[v] {
                hist[v] += (usage[v] - cap0[v]) as f64;
            }
        }
        pres = (pres * 1.3).min(1e4);
    }
    if std::env::var("ROUTE_DEBUG").is_ok() {
        let over: Vec<(usize, i64, i64)> = (0..nv)
            .filter(|&v| usage[v] > cap0[v])
            .map(|v| (v, usage[v], cap0[v]))
            .collect();
        eprintln!("negotiation stuck: {} overused vertices: {:?}", over.len(), &over[..over.len().min(6)]);
        for &(v, _, _) in over.iter().take(3) {
            let nbrs: Vec<(usize, i64, i64)> =
                reduced.adj[v].iter().map(|&u| (u, usage[u], cap0[u])).collect();
            eprintln!("vertex {v} nbrs(usage,cap) {nbrs:?}");
            for i in 0..nets {
                if tree_demand(&current[i], &term_sets[i]).contains(&v) {
                    eprintln!(
                        "  net {i} terms {:?} tree {:?}",
                        terminals[i], current[i].vertices
                    );
                }
            }
        }
    }
    Err(Error::Routing(
        "no capacity-feasible tree selection after congestion negotiation".into(),
    ))
}

// ---------------------------------------------------------------------------
// Detailed qubit assignment and the full routing pass
// ---------------------------------------------------------------------------

/// A complete routing: each variable's chain (pin qubits plus routing qubits)
/// and its sign (always `+1` here — instantiation absorbs pin negations into
/// the cells).
#[derive(Debug, Clone)]
pub struct RoutingSolution {
    pub chains: BTreeMap<u32, Vec<u32>>,
    pub chain_signs: BTreeMap<u32, i8>,
    /// Σ |S_i| of the selected reduced trees (the IP objective).
    pub tree_cost: usize,
}

/// Concrete Steiner tree over qubits: terminals are the pin qubits, candidates
/// are the free qubits of the selected super-vertices (expanded ring by ring on
/// retry). Ascending qubit index breaks ties. Qubits in `forbidden` are the
/// last escape of some other net's pin and are never consumed; `soft` inflates
/// the weight of contested qubits so chains route around them when possible.
fn assign_chain(
    graph: &ChimeraGraph,
    free: &mut Vec<Vec<u32>>,
    reduced: &ReducedGraph,
    tree: &Tree,
    pins: &[u32],
    forbidden: &BTreeSet<u32>,
    soft: &HashMap<u32, f64>,
) -> Result<Vec<u32>> {
    let mut zone: BTreeSet<usize> = tree.vertices.iter().copied().collect();
    for attempt in 0..4 {
        let mut candidates: Vec<u32> = pins.to_vec();
        for &v in &zone {
            candidates.extend(free[v].iter().filter(|q| !forbidden.contains(q)));
        }
        candidates.sort_unstable();
        candidates.dedup();
        let index: HashMap<u32, usize> = candidates.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let adj: Vec<Vec<usize>> = candidates
            .iter()
            .map(|&q| {
                graph
                    .neighbors(q)
                    .into_iter()
                    .filter_map(|p| index.get(&p).copied())
                    .collect()
            })
            .collect();
        let weights: Vec<f64> = candidates
            .iter()
            .map(|q| soft.get(q).copied().unwrap_or(1.0))
            .collect();
        let usable = vec![true; candidates.len()];
        let terminals: Vec<usize> = pins.iter().map(|q| index[q]).collect();
        if let Ok(t) = steiner_tree(&adj, &weights, &usable, &terminals) {
            let chain: Vec<u32> = t.vertices.iter().map(|&i| candidates[i]).collect();
            // Consume the routing qubits.
            for &q in &chain {
                if !pins.contains(&q) {
                    let v = reduced.vertex_of(graph, q);
                    free[v].retain(|&p| p != q);
                }
            }
            return Ok(chain);
        }
        if attempt == 3 {
            break;
        }
        // Expand the zone by one ring of super-vertices.
        let grow: BTreeSet<usize> = zone
            .iter()
            .flat_map(|&v| reduced.adj[v].iter().copied())
            .collect();
        zone.extend(grow);
    }
    if std::env::var("ROUTE_DEBUG").is_ok() {
        for &p in pins {
            let nbrs: Vec<u32> = graph
                .neighbors(p)
                .into_iter()
                .filter(|&q| {
                    let v = reduced.vertex_of(graph, q);
                    free[v].contains(&q) && !forbidden.contains(&q)
                })
                .collect();
            eprintln!("assign fail: pin {p} free nbrs {nbrs:?}");
        }
    }
    Err(Error::Routing("chain has no concrete qubit realization".into()))
}

/// Last-resort global rerouting at qubit granularity: negotiated congestion on
/// the hardware graph itself (vertex capacity 1 on free qubits, pins reserved
/// to their own net). Sidesteps the reduced model's blind spot — a super-vertex
/// can have spare capacity while no qubit of the right shore index is free.
fn negotiate_chains(
    graph: &ChimeraGraph,
    free: &BTreeSet<u32>,
    pin_qubits: &[Vec<u32>],
) -> Result<Vec<Vec<u32>>> {
    let nets = pin_qubits.len();
    let mut cands: Vec<u32> = free.iter().copied().collect();
    for pins in pin_qubits {
        cands.extend(pins);
    }
    cands.sort_unstable();
    cands.dedup();
    let index: HashMap<u32, usize> = cands.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let nv = cands.len();
    let adj: Vec<Vec<usize>> = cands
        .iter()
        .map(|&q| graph.neighbors(q).into_iter().filter_map(|p| index.get(&p).copied()).collect())
        .collect();
    // Pins are traversable only as their own net's terminals.
    let usable: Vec<bool> = cands.iter().map(|q| free.contains(q)).collect();
    let term_idx: Vec<Vec<usize>> = pin_qubits
        .iter()
        .map(|pins| {
            let mut t: Vec<usize> = pins.iter().map(|q| index[q]).collect();
            t.sort_unstable();
            t.dedup();
            t
        })
        .collect();
    let term_sets: Vec<BTreeSet<usize>> =
        term_idx.iter().map(|t| t.iter().copied().collect()).collect();
    let base = vec![1.0f64; nv];
    let mut current: Vec<Tree> = Vec::with_capacity(nets);
    for terms in &term_idx {
        current.push(steiner_tree(&adj, &base, &usable, terms)?);
    }
    let mut usage = vec![0i64; nv];
    for (i, t) in current.iter().enumerate() {
        for v in tree_demand(t, &term_sets[i]) {
            usage[v] += 1;
        }
    }
    let mut hist = vec![0.0f64; nv];
    let mut pres = 1.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x2545f491);
    let mut order: Vec<usize> = (0..nets).collect();
    for _round in 0..256 {
        if usage.iter().all(|&u| u <= 1) {
            return Ok(current
                .iter()
                .map(|t| t.vertices.iter().map(|&v| cands[v]).collect())
                .collect());
        }
        if std::env::var("ROUTE_DEBUG").is_ok() && _round % 16 == 0 {
            let over: i64 = usage.iter().map(|&u| (u - 1).max(0)).sum();
            eprintln!("qubit negotiation round {_round}: total overuse {over}");
        }
        order.shuffle(&mut rng);
        for &i in &order {
            for v in tree_demand(&current[i], &term_sets[i]) {
                usage[v] -= 1;
            }
            let weights: Vec<f64> = (0..nv)
                .map(|v| {
                    let over = usage[v].max(0) as f64;
                    (1.0 + hist[v] + pres * over) * (1.0 + 0.05 * rng.gen::<f64>())
                })
                .collect();
            current[i] = steiner_tree(&adj, &weights, &usable, &term_idx[i])?;
            for v in tree_demand(&current[i], &term_sets[i]) {
                usage[v] += 1;
            }
        }
        for v in 0..nv {
            if usage[v] > 1 {
                hist[v] += (usage[v] - 1) as f64;
            }
        }
        pres = (pres * 1.3).min(1e4);
    }
    if std::env::var("ROUTE_DEBUG").is_ok() {
        for v in 0..nv {
            if usage[v] > 1 {
                let q = cands[v];
                let (r, c) = graph.tile_of(q);
                let users: Vec<usize> = (0..nets)
                    .filter(|&i| tree_demand(&current[i], &term_sets[i]).contains(&v))
                    .collect();
                eprintln!(
                    "overused qubit {q} tile ({r},{c}) shore {:?} usage {} nets {users:?}",
                    graph.shore_of(q),
                    usage[v]
                );
                let nbrs: Vec<u32> = graph
                    .neighbors(q)
                    .into_iter()
                    .filter(|p| index.get(p).map_or(false, |&vi| usable[vi]))
                    .collect();
                eprintln!("  free nbrs of {q}: {nbrs:?}");
                for &i in users.iter().take(4) {
                    eprintln!(
                        "  net {i} pins {:?} tree {:?}",
                        term_idx[i].iter().map(|&t| cands[t]).collect::<Vec<_>>(),
                        current[i].vertices.iter().map(|&t| cands[t]).collect::<Vec<_>>()
                    );
                }
            }
        }
    }
    Err(Error::Routing("qubit-level congestion negotiation did not converge".into()))
}

/// Routing configuration: Algorithm-1 iteration count and weight penalty, plus
/// the tree-selection node budget.
#[derive(Debug, Clone)]
pub struct RouteConfig {
    pub iterations: usize,
    pub alpha: f64,
    pub select_budget: usize,
}

impl Default for RouteConfig {
    fn default() -> Self {
        RouteConfig { iterations: 64, alpha: 2.0, select_budget: 20_000 }
    }
}

/// Full routing pass: reduce, share resources, select disjoint trees, and
/// assign concrete chain qubits.
pub fn route_nets(
    netlist: &Netlist,
    placement: &Placement,
    graph: &ChimeraGraph,
    cfg: &RouteConfig,
) -> Result<RoutingSolution> {
    let mut occupied: BTreeSet<u32> = BTreeSet::new();
    for i in 0..netlist.cells.len() {
        occupied.extend(placement.cell_qubits(graph, netlist, i));
    }
    let reduced = reduce_graph(graph, &occupied);
    let nets = netlist.nets();
    let mut vars: Vec<u32> = Vec::new();
    let mut pin_qubits: Vec<Vec<u32>> = Vec::new();
    let mut single: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    let mut terminals: Vec<Vec<usize>> = Vec::new();
    for (&v, pins) in &nets {
        let qubits: Vec<u32> = pins
            .iter()
            .map(|&(c, p)| placement.pin_qubit(graph, netlist, c, p))
            .collect();
        let mut terms: Vec<usize> = qubits.iter().map(|&q| reduced.vertex_of(graph, q)).collect();
        terms.sort_unstable();
        terms.dedup();
        if qubits.len() == 1 {
            single.insert(v, qubits);
            continue;
        }
        vars.push(v);
        pin_qubits.push(qubits);
        terminals.push(terms);
    }
    let mut chains = single;
    let mut tree_cost = 0;
    if !vars.is_empty() {
        let dists = route(&reduced, &terminals, cfg.iterations, cfg.alpha)?;
        let trees = select_trees(&reduced, &terminals, &dists, cfg.select_budget)?;
        tree_cost = trees.iter().map(|t| t.vertices.len()).sum();
        // Live escape sets: the still-free neighbors of every pin. A chain must
        // leave its pin through one of these, so other nets may never consume a
        // pin's last escape and should avoid contested ones.
        let escapes: Vec<Vec<BTreeSet<u32>>> = pin_qubits
            .iter()
            .map(|pins| {
                pins.iter()
                    .map(|&q| {
                        graph
                            .neighbors(q)
                            .into_iter()
                            .filter(|n| graph.is_enabled(*n) && !occupied.contains(n))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        // Assign chains net by net; the order matters because earlier chains
        // consume routing qubits, so retry a few orders before giving up.
        let try_order = |order: &[usize]| -> Result<BTreeMap<u32, Vec<u32>>> {
            let mut free = reduced.free_qubits.clone();
            let mut live = escapes.clone();
            let mut routed = vec![false; vars.len()];
            let mut out: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
            for &idx in order {
                let v = vars[idx];
                let pins = &pin_qubits[idx];
                let mut forbidden: BTreeSet<u32> = BTreeSet::new();
                let mut soft: HashMap<u32, f64> = HashMap::new();
                for j in 0..vars.len() {
                    if j == idx || routed[j] {
                        continue;
                    }
                    for es in &live[j] {
                        for &q in es {
                            *soft.entry(q).or_insert(1.0) += 3.0;
                        }
                        if es.len() == 1 {
                            forbidden.insert(*es.iter().next().unwrap());
                        }
                    }
                }
                let mut chain =
                    assign_chain(graph, &mut free, &reduced, &trees[idx], pins, &forbidden, &soft)
                        .map_err(|e| Error::Routing(format!("variable {v}: {e}")))?;
                routed[idx] = true;
                for &q in &chain {
                    if !pins.contains(&q) {
                        for (j, done) in routed.iter().enumerate() {
                            if !done {
                                for es in &mut live[j] {
                                    es.remove(&q);
                                }
                            }
                        }
                    }
                }
                chain.sort_unstable();
                chain.dedup();
                out.insert(v, chain);
            }
            Ok(out)
        };
        let n = vars.len();
        // Largest nets first: they need the most contiguous fabric, so route
        // them while it is still plentiful.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(pin_qubits[i].len()));
        let mut rng = ChaCha8Rng::seed_from_u64(0x9e3779b9);
        let mut last_err = None;
        let mut done = None;
        for attempt in 0..6 {
            match try_order(&order) {
                Ok(map) => {
                    done = Some(map);
                    break;
                }
                Err(e) => last_err = Some(e),
            }
            if attempt == 0 {
                order.reverse();
            } else {
                order.shuffle(&mut rng);
            }
        }
        if done.is_none() {
            // Sequential realization failed in every order: negotiate globally
            // on the hardware graph itself.
            let free: BTreeSet<u32> = (0..graph.qubit_count())
                .filter(|&q| graph.is_enabled(q) && !occupied.contains(&q))
                .collect();
            match negotiate_chains(graph, &free, &pin_qubits) {
                Ok(qchains) => {
                    let mut map = BTreeMap::new();
                    for (i, mut chain) in qchains.into_iter().enumerate() {
                        chain.sort_unstable();
                        chain.dedup();
                        map.insert(vars[i], chain);
                    }
                    done = Some(map);
                }
                Err(e) => {
                    last_err = Some(Error::Routing(format!(
                        "{} (fallback: {e})",
                        last_err.map(|x| x.to_string()).unwrap_or_default()
                    )));
                }
            }
        }
        match done {
            Some(map) => chains.extend(map),
            None => return Err(last_err.unwrap()),
        }
    }
    let chain_signs = chains.keys().map(|&v| (v, 1i8)).collect();
    Ok(RoutingSolution { chains, chain_signs, tree_cost })
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

/// Variable → chain mapping used to decode samples back to assignments.
#[derive(Debug, Clone)]
pub struct DecodeMap {
    pub chains: BTreeMap<u32, Vec<u32>>,
    /// Negation flag per variable (false throughout this flow: instantiation
    /// absorbs pin negations into the cell coefficients).
    pub negated: BTreeMap<u32, bool>,
    /// Cell-internal ancilla qubits (dropped when decoding).
    pub ancillas: BTreeSet<u32>,
}

/// An assembled problem model.
#[derive(Debug, Clone)]
pub struct Assembled {
    /// Pre-normalization sum of cell and chain penalties (Eq.-11 structure).
    pub raw: IsingModel,
    /// Normalized, in-range model.
    pub model: IsingModel,
    /// Normalization factor: `model = raw · scale`.
    pub scale: Rat,
    pub decode: DecodeMap,
}

/// Sum the placed cell penalties and the chain penalties
/// `w · (1 − z z′)` per chain spanning-tree edge, asserting that no two parts
/// write the same coefficient, then normalize.
pub fn assemble(
    netlist: &Netlist,
    placement: &Placement,
    graph: &ChimeraGraph,
    routing: &RoutingSolution,
    chain_weight: &Rat,
) -> Result<Assembled> {
    if chain_weight < &rint(1) {
        return Err(Error::Config("chain weight must be ≥ 1".into()));
    }
    let topology = Arc::new(Topology::Chimera(graph.clone()));
    let mut raw = IsingModel::new(topology);
    let mut bias_written: BTreeSet<u32> = BTreeSet::new();
    let mut coupling_written: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut ancillas: BTreeSet<u32> = BTreeSet::new();
    for (i, cell) in netlist.cells.iter().enumerate() {
        let to_global = |l: u32| placement.global_qubit(graph, cell, i, l);
        raw.offset += &cell.penalty.model.offset;
        for (&q, v) in &cell.penalty.model.biases {
            let g = to_global(q);
            if !bias_written.insert(g) {
                return Err(Error::Internal(format!("bias collision at qubit {g}")));
            }
            raw.add_bias(g, v.clone())?;
        }
        for (&(a, b), v) in &cell.penalty.model.couplings {
            let (ga, gb) = (to_global(a), to_global(b));
            let key = (ga.min(gb), ga.max(gb));
            if !coupling_written.insert(key) {
                return Err(Error::Internal(format!("coupling collision at {key:?}")));
            }
            raw.add_coupling(ga, gb, v.clone())?;
        }
        for &a in &cell.penalty.ancillas {
            ancillas.insert(to_global(a));
        }
    }
    // Chains: spanning-tree edges within each chain's induced subgraph.
    for (&v, chain) in &routing.chains {
        for (a, b) in chain_spanning_edges(graph, chain)
            .ok_or_else(|| Error::Routing(format!("chain of variable {v} is disconnected")))?
        {
            let key = (a.min(b), a.max(b));
            if !coupling_written.insert(key) {
                return Err(Error::Internal(format!("coupling collision at {key:?}")));
            }
            raw.offset += chain_weight;
            raw.add_coupling(a, b, -chain_weight.clone())?;
        }
    }
    let (model, scale) = raw.normalize()?;
    if !model.is_in_range() {
        return Err(Error::Internal("normalized model out of range".into()));
    }
    let decode = DecodeMap {
        chains: routing.chains.clone(),
        negated: routing.chains.keys().map(|&v| (v, false)).collect(),
        ancillas,
    };
    Ok(Assembled { raw, model, scale, decode })
}

/// BFS spanning-tree edges of a chain; `None` if the induced subgraph is
/// disconnected.
pub fn chain_spanning_edges(graph: &ChimeraGraph, chain: &[u32]) -> Option<Vec<(u32, u32)>> {
    if chain.is_empty() {
        return Some(Vec::new());
    }
    let set: BTreeSet<u32> = chain.iter().copied().collect();
    let mut seen = BTreeSet::from([chain[0]]);
    let mut queue = vec![chain[0]];
    let mut edges = Vec::new();
    while let Some(q) = queue.pop() {
        for p in graph.neighbors(q) {
            if set.contains(&p) && seen.insert(p) {
                edges.push((q.min(p), q.max(p)));
                queue.push(p);
            }
        }
    }
    (seen.len() == set.len()).then_some(edges)
}

// ---------------------------------------------------------------------------
// Embedding verification
// ---------------------------------------------------------------------------

/// Minor-embedding check report.
#[derive(Debug, Clone)]
pub struct EmbeddingReport {
    pub pass: bool,
    pub violations: Vec<String>,
    /// Chain length → number of chains.
    pub chain_histogram: BTreeMap<usize, usize>,
    pub max_chain_len: usize,
}

/// Check the three minor-embedding conditions: chains connected, chains (and
/// cell ancillas) pairwise disjoint, and every cell coupling realized by a
/// hardware edge.
pub fn verify_embedding(
    netlist: &Netlist,
    placement: &Placement,
    graph: &ChimeraGraph,
    routing: &RoutingSolution,
) -> EmbeddingReport {
    let mut violations = Vec::new();
    let mut owner: BTreeMap<u32, u32> = BTreeMap::new();
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for (&v, chain) in &routing.chains {
        *histogram.entry(chain.len()).or_default() += 1;
        for &q in chain {
            if !graph.is_enabled(q) {
                violations.push(format!("chain of {v} uses disabled qubit {q}"));
            }
            if let Some(&u) = owner.get(&q) {
                violations.push(format!("chains of {u} and {v} share qubit {q}"));
            }
            owner.insert(q, v);
        }
        if chain_spanning_edges(graph, chain).is_none() {
            violations.push(format!("chain of {v} is disconnected"));
        }
    }
    for (i, cell) in netlist.cells.iter().enumerate() {
        // Pin containment: each pin qubit belongs to its variable's chain.
        for (pi, &v) in cell.vars.iter().enumerate() {
            let q = placement.pin_qubit(graph, netlist, i, pi);
            if routing.chains.get(&v).map(|c| c.contains(&q)) != Some(true) {
                violations.push(format!("pin {pi} of cell {i} (qubit {q}) missing from chain of {v}"));
            }
        }
        // Ancillas must not collide with any chain.
        for &a in &cell.penalty.ancillas {
            let g = placement.global_qubit(graph, cell, i, a);
            if let Some(&u) = owner.get(&g) {
                violations.push(format!("ancilla qubit {g} of cell {i} collides with chain of {u}"));
            }
        }
        // Adjacency realization: every cell coupling is a hardware edge.
        for &(a, b) in cell.penalty.model.couplings.keys() {
            let (ga, gb) = (
                placement.global_qubit(graph, cell, i, a),
                placement.global_qubit(graph, cell, i, b),
            );
            if !graph.has_edge(ga, gb) {
                violations.push(format!("cell {i} coupling ({ga},{gb}) is not a hardware edge"));
            }
        }
    }
    let max_chain_len = histogram.keys().max().copied().unwrap_or(0);
    EmbeddingReport {
        pass: violations.is_empty(),
        violations,
        chain_histogram: histogram,
        max_chain_len,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penalty::examples::{and_tile_on, xor_tile_at};
    use crate::rat::rat;

    fn half_tile_and_cell(vars: [u32; 3]) -> NetlistCell {
        NetlistCell {
            footprint: Footprint::HalfTile,
            penalty: and_tile_on(Footprint::HalfTile.graph()),
            vars: vars.to_vec(),
        }
    }

    fn grid(rows: u32, cols: u32) -> ChimeraGraph {
        ChimeraGraph::new(rows, cols, 4, Default::default()).unwrap()
    }

    #[test]
    fn single_cell_places_with_zero_hpwl() {
        let netlist = Netlist::new(vec![half_tile_and_cell([1, 2, 3])]).unwrap();
        let p = place(&netlist, &grid(2, 2), 1, 500).unwrap();
        assert_eq!(p.hpwl, 0);
    }

    #[test]
    fn two_cells_sharing_a_variable_reach_adjacent_tiles() {
        // Exhaustive optimum on a 2×2 grid is HPWL ≤ 1 (they can even share a tile → 0).
        for seed in 0..5u64 {
            let netlist = Netlist::new(vec![
                half_tile_and_cell([1, 2, 3]),
                half_tile_and_cell([3, 4, 5]),
            ])
            .unwrap();
            let p = place(&netlist, &grid(2, 2), seed, 2000).unwrap();
            assert!(p.hpwl <= 1, "seed {seed}: HPWL {}", p.hpwl);
        }
    }

    #[test]
    fn placement_is_seed_deterministic() {
        let netlist = Netlist::new(vec![
            half_tile_and_cell([1, 2, 3]),
            half_tile_and_cell([3, 4, 5]),
            half_tile_and_cell([5, 6, 1]),
        ])
        .unwrap();
        let a = place(&netlist, &grid(3, 3), 7, 3000).unwrap();
        let b = place(&netlist, &grid(3, 3), 7, 3000).unwrap();
        assert_eq!(a.sites, b.sites);
        assert_eq!(a.hpwl, b.hpwl);
    }

    #[test]
    fn reduced_graph_of_empty_3x3() {
        let g = grid(3, 3);
        let r = reduce_graph(&g, &BTreeSet::new());
        assert_eq!(r.num_vertices(), 18);
        assert!(r.cap.iter().all(|&c| c == 4));
        // Accounting identity: capacities sum to enabled minus occupied.
        let occupied: BTreeSet<u32> = (0..8).collect(); // tile (0,0) fully used
        let r2 = reduce_graph(&g, &occupied);
        let total: u32 = r2.cap.iter().sum();
        assert_eq!(total, g.qubit_count() - 8);
        assert_eq!(r2.cap[0], 0);
        assert_eq!(r2.cap[1], 0);
    }

    #[test]
    fn steiner_degenerate_cases() {
        let g = grid(2, 2);
        let r = reduce_graph(&g, &BTreeSet::new());
        let w = vec![1.0; r.num_vertices()];
        let usable = vec![true; r.num_vertices()];
        let one = steiner_tree(&r.adj, &w, &usable, &[3]).unwrap();
        assert_eq!(one.vertices, vec![3]);
        assert!(one.edges.is_empty());
        let two = steiner_tree(&r.adj, &w, &usable, &[0, 1]).unwrap();
        assert_eq!(two.vertices, vec![0, 1]);
        assert_eq!(two.edges, vec![(0, 1)]);
    }

    #[test]
    fn single_net_routes_with_probability_one() {
        let g = grid(2, 2);
        let r = reduce_graph(&g, &BTreeSet::new());
        // Adjacent terminals: the direct tree always beats any detour (every
        // other tree pays the same endpoint weights plus intermediates).
        let dists = route(&r, &[vec![0, 1]], 16, 2.0).unwrap();
        assert_eq!(dists[0].len(), 1);
        assert_eq!(dists[0][0].0.vertices, vec![0, 1]);
        assert!((dists[0][0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn competing_nets_split_and_select_disjointly() {
        // Two nets whose cheapest routes both cross the same tile; with capacity
        // pressure removed they must still select capacity-feasible trees.
        let g = grid(3, 3);
        // Leave only 1 free qubit in the center tile shores.
        let mut occupied = BTreeSet::new();
        for q in g.enabled_qubits() {
            let (r, c) = g.tile_of(q);
            if (r, c) == (1, 1) && g.shore_index(q) < 3 {
                occupied.insert(q);
            }
        }
        let r = reduce_graph(&g, &occupied);
        let sv = |row: u32, col: u32, dir: usize| ((row * 3 + col) * 2) as usize + dir;
        let nets = vec![vec![sv(0, 1, 0), sv(2, 1, 0)], vec![sv(1, 0, 1), sv(1, 2, 1)]];
        let dists = route(&r, &nets, 64, 2.0).unwrap();
        let trees = select_trees(&r, &nets, &dists, 10_000).unwrap();
        // Capacity feasibility: total non-terminal demand per vertex ≤ cap.
        let mut load = vec![0i64; r.num_vertices()];
        for (tree, terms) in trees.iter().zip(&nets) {
            let ts: BTreeSet<usize> = terms.iter().copied().collect();
            for v in tree_demand(tree, &ts) {
                load[v] += 1;
            }
        }
        for (v, &l) in load.iter().enumerate() {
            assert!(l <= i64::from(r.cap[v]), "vertex {v} overloaded");
        }
    }

    #[test]
    fn non_conflicting_nets_get_smallest_trees() {
        let g = grid(2, 2);
        let r = reduce_graph(&g, &BTreeSet::new());
        let nets = vec![vec![0, 1], vec![6, 7]];
        let dists = route(&r, &nets, 8, 2.0).unwrap();
        let trees = select_trees(&r, &nets, &dists, 1000).unwrap();
        assert_eq!(trees[0].vertices.len(), 2);
        assert_eq!(trees[1].vertices.len(), 2);
    }

    /// The worked two-cell combination: AND on tile (0,0) slot 0, XOR on tile
    /// (0,1), variable 3 chained over qubits 5–13.
    fn combination_fixture() -> (Netlist, Placement, ChimeraGraph, RoutingSolution) {
        let g = grid(1, 2);
        let and = NetlistCell {
            footprint: Footprint::HalfTile,
            penalty: and_tile_on(Footprint::HalfTile.graph()),
            vars: vec![1, 2, 3],
        };
        let xor = NetlistCell {
            footprint: Footprint::Tile,
            penalty: xor_tile_at(Footprint::Tile.graph(), [5, 6, 7], [0, 1, 2]),
            vars: vec![3, 4, 5],
        };
        let netlist = Netlist::new(vec![and, xor]).unwrap();
        let placement = Placement {
            sites: vec![Site { row: 0, col: 0, slot: 0 }, Site { row: 0, col: 1, slot: 0 }],
            hpwl: 1,
        };
        let chains: BTreeMap<u32, Vec<u32>> = [
            (1, vec![0]),
            (2, vec![4]),
            (3, vec![5, 13]),
            (4, vec![14]),
            (5, vec![15]),
        ]
        .into_iter()
        .collect();
        let routing = RoutingSolution {
            chain_signs: chains.keys().map(|&v| (v, 1)).collect(),
            chains,
            tree_cost: 2,
        };
        (netlist, placement, g, routing)
    }

    #[test]
    fn assemble_reproduces_the_17_2_combination() {
        let (netlist, placement, g, routing) = combination_fixture();
        let asm = assemble(&netlist, &placement, &g, &routing, &rint(1)).unwrap();
        assert_eq!(asm.raw.offset, rat(17, 2));
        assert!(asm.model.is_in_range());
        // Chain coupling present with weight −1 on edge (5,13).
        assert_eq!(asm.raw.coupling(5, 13), rint(-1));
        // The ground states have energy 0.
        let (min, _) = asm.raw.exact_ground_states().unwrap();
        assert_eq!(min, rint(0));
        let report = verify_embedding(&netlist, &placement, &g, &routing);
        assert!(report.pass, "{:?}", report.violations);
        assert_eq!(report.max_chain_len, 2);
    }

    #[test]
    fn eq11_structure_cells_are_disjoint_in_the_sum() {
        let (netlist, placement, g, routing) = combination_fixture();
        let asm = assemble(&netlist, &placement, &g, &routing, &rint(1)).unwrap();
        // Remove chain terms: the rest must be exactly the disjoint union of the
        // translated cell models.
        let mut stripped = asm.raw.clone();
        for (&v, chain) in &routing.chains {
            let _ = v;
            for (a, b) in chain_spanning_edges(&g, chain).unwrap() {
                stripped.offset -= rint(1);
                stripped.add_coupling(a, b, rint(1)).unwrap();
            }
        }
        let mut expected = IsingModel::new(Arc::new(Topology::Chimera(g.clone())));
        for (i, cell) in netlist.cells.iter().enumerate() {
            expected.offset += &cell.penalty.model.offset;
            for (&q, v) in &cell.penalty.model.biases {
                expected
                    .add_bias(placement.global_qubit(&g, cell, i, q), v.clone())
                    .unwrap();
            }
            for (&(a, b), v) in &cell.penalty.model.couplings {
                expected
                    .add_coupling(
                        placement.global_qubit(&g, cell, i, a),
                        placement.global_qubit(&g, cell, i, b),
                        v.clone(),
                    )
                    .unwrap();
            }
        }
        assert_eq!(stripped, expected);
    }

    #[test]
    fn collision_is_an_internal_error() {
        let (mut netlist, mut placement, g, routing) = combination_fixture();
        // Second copy of the AND cell at the same site: guaranteed collisions.
        netlist.cells.push(netlist.cells[0].clone());
        placement.sites.push(placement.sites[0]);
        match assemble(&netlist, &placement, &g, &routing, &rint(1)) {
            Err(Error::Internal(_)) => {}
            other => panic!("expected collision error, got {other:?}"),
        }
    }

    #[test]
    fn verify_embedding_flags_violations() {
        let (netlist, placement, g, mut routing) = combination_fixture();
        // Overlap: variable 4's chain grabs qubit 5 (owned by variable 3).
        routing.chains.insert(4, vec![5, 14]);
        let report = verify_embedding(&netlist, &placement, &g, &routing);
        assert!(!report.pass);
        assert!(report.violations.iter().any(|v| v.contains("share qubit 5")));
        // Disconnected chain: 0 and 15 are not adjacent.
        routing.chains.insert(4, vec![14]);
        routing.chains.insert(1, vec![0, 15]);
        let report = verify_embedding(&netlist, &placement, &g, &routing);
        assert!(report.violations.iter().any(|v| v.contains("disconnected")));
    }

    #[test]
    fn end_to_end_place_route_assemble_verify() {
        // Three AND cells chained through shared variables on a 3×3 grid.
        let netlist = Netlist::new(vec![
            half_tile_and_cell([1, 2, 3]),
            half_tile_and_cell([3, 4, 5]),
            half_tile_and_cell([5, 6, 1]),
        ])
        .unwrap();
        let g = grid(3, 3);
        let placement = place(&netlist, &g, 11, 3000).unwrap();
        let routing = route_nets(&netlist, &placement, &g, &RouteConfig::default()).unwrap();
        let asm = assemble(&netlist, &placement, &g, &routing, &rint(1)).unwrap();
        assert!(asm.model.is_in_range());
        let report = verify_embedding(&netlist, &placement, &g, &routing);
        assert!(report.pass, "{:?}", report.violations);
        // Every variable has a chain; pins are inside them.
        assert_eq!(routing.chains.len(), 6);
    }
}
