//! End-to-end acceptance suite: one pass/fail line per criterion.
//!
//! Runs without the libtest harness so every criterion always prints its
//! verdict, timing, and a short detail string. The process exits non-zero if
//! any criterion fails, so `cargo test` still gates on it.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use quboforge_core::benchgen::{
    gen_maxsat_biased, gen_sgen_sat, ConstraintInstance, SgenVariant,
};
use quboforge_core::boolfn::{
    and_relation, equivalence, exactly_k_of_n, npn_class_count, or_relation, xor_relation,
    TruthTable,
};
use quboforge_core::chimera::{ChimeraGraph, Topology};
use quboforge_core::penalty::{compose_with_chains, examples, ChainSign};
use quboforge_core::pipeline::{solve_instance, CellCache, Outcome, PipelineConfig};
use quboforge_core::placeroute::steiner_tree;
use quboforge_core::rat::{format_rat, rat, rint};
use quboforge_core::synth::{
    build_shannon_system, build_ve_system, enumerate_placements, maximize_gap, Footprint,
    SearchConfig, SynthResult, SynthesisSpec,
};
type Check = std::result::Result<String, String>;

fn main() {
    let mut failures = 0usize;
    let mut embeddings: Vec<bool> = Vec::new();

    let mut run = |label: &str, check: Check, elapsed: f64| {
        match check {
            Ok(detail) => println!("PASS  {label}: {detail} ({elapsed:.2}s)"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {label}: {detail} ({elapsed:.2}s)");
            }
        }
    };

    let t = Instant::now();
    run("criterion 1  worked examples", c1_worked_examples(), t.elapsed().as_secs_f64());
    let t = Instant::now();
    run("criterion 2  synthesis optimality", c2_synthesis_optimality(), t.elapsed().as_secs_f64());
    let t = Instant::now();
    run("criterion 3  NPN census", c3_npn_census(), t.elapsed().as_secs_f64());
    let t = Instant::now();
    run("criterion 4  symmetry reduction", c4_symmetry_reduction(), t.elapsed().as_secs_f64());
    let t = Instant::now();
    run("criterion 5  unbiased 2-in-4 cell", c5_unbiased_cell(), t.elapsed().as_secs_f64());
    let t = Instant::now();
    run("criterion 6  VE/Shannon equivalence", c6_ve_shannon(), t.elapsed().as_secs_f64());
    let t = Instant::now();
    run("criterion 7  end-to-end SAT", c7_end_to_end_sat(&mut embeddings), t.elapsed().as_secs_f64());
    let t = Instant::now();
    run("criterion 8  end-to-end MaxSAT", c8_end_to_end_maxsat(&mut embeddings), t.elapsed().as_secs_f64());
    let t = Instant::now();
    run("criterion 9  embedding validity", c9_embedding_validity(&embeddings), t.elapsed().as_secs_f64());
    let t = Instant::now();
    run("criterion 10 Steiner quality", c10_steiner_quality(), t.elapsed().as_secs_f64());

    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------------------
// Criterion 1: worked-example penalties all verify with gap exactly 2, and the
// two-tile AND+XOR composition has offset 17/2. Total runtime < 1 s.
// ---------------------------------------------------------------------------

fn c1_worked_examples() -> Check {
    let t0 = Instant::now();
    let two = rint(2);
    let cases: Vec<(&str, quboforge_core::penalty::PenaltyFunction, TruthTable)> = vec![
        ("equivalence", examples::equivalence_chain(), equivalence()),
        ("AND on K3", examples::and_k3(), and_relation()),
        ("AND on tile", examples::and_tile(), and_relation()),
        ("XOR on tile", examples::xor_tile(), xor_relation()),
        ("OR on tile", examples::or_tile(), or_relation()),
    ];
    for (name, pf, tt) in &cases {
        let report = pf.verify(tt).map_err(|e| format!("{name}: {e}"))?;
        if !report.pass || report.true_gap != Some(two.clone()) {
            return Err(format!(
                "{name}: gap {:?}, pass {}",
                report.true_gap.as_ref().map(format_rat),
                report.pass
            ));
        }
    }

    // AND + XOR on adjacent tiles of a 1×2 Chimera, joined by one chain.
    let graph = Arc::new(Topology::Chimera(
        ChimeraGraph::new(1, 2, 4, Default::default()).map_err(|e| e.to_string())?,
    ));
    let and = examples::and_tile_on(graph.clone());
    let xor = examples::xor_tile_at(graph, [13, 14, 15], [8, 9, 10]);
    let comp = compose_with_chains(&[and, xor], &[(5, 13, ChainSign::Plus)], &rint(1))
        .map_err(|e| e.to_string())?;
    if comp.penalty.model.offset != rat(17, 2) {
        return Err(format!(
            "combination offset {}, expected 17/2",
            format_rat(&comp.penalty.model.offset)
        ));
    }
    let f = TruthTable::from_fn(6, |k| {
        let (x1, x2, y) = (k & 1 == 1, k >> 1 & 1 == 1, k >> 2 & 1 == 1);
        let (u, v, w) = (k >> 3 & 1 == 1, k >> 4 & 1 == 1, k >> 5 & 1 == 1);
        (y == (x1 && x2)) && (w == (u ^ v)) && (y == u)
    })
    .map_err(|e| e.to_string())?;
    let report = comp.penalty.verify(&f).map_err(|e| e.to_string())?;
    if !report.pass || report.true_gap != Some(two) {
        return Err("combination gap is not exactly 2".into());
    }
    let dt = t0.elapsed().as_secs_f64();
    if dt >= 1.0 {
        return Err(format!("runtime {dt:.2}s exceeds 1 s budget"));
    }
    Ok("5 example penalties + combination: gap 2, offset 17/2".into())
}

// ---------------------------------------------------------------------------
// Criterion 2: maximize_gap reproduces gap 2 for AND on K3 (h = 0) and proves
// XOR on K3 (h = 0) infeasible. Runtime < 10 s.
// ---------------------------------------------------------------------------

fn spec_on_k3(function: TruthTable) -> SynthesisSpec {
    SynthesisSpec {
        function,
        graph: Arc::new(Topology::Custom(
            quboforge_core::chimera::CustomGraph::complete(3),
        )),
        inputs: vec![0, 1, 2],
        ancillas: vec![],
        require_exact: false,
        countermodel_filter: None,
    }
}

fn c2_synthesis_optimality() -> Check {
    let t0 = Instant::now();
    let sys = build_shannon_system(&spec_on_k3(and_relation())).map_err(|e| e.to_string())?;
    match maximize_gap(&sys, &SearchConfig::default()).map_err(|e| e.to_string())? {
        SynthResult::Found(pf) if pf.gap == rint(2) => {}
        SynthResult::Found(pf) => {
            return Err(format!("AND on K3: gap {}, expected 2", format_rat(&pf.gap)))
        }
        SynthResult::Infeasible => return Err("AND on K3 reported infeasible".into()),
    }
    let sys = build_shannon_system(&spec_on_k3(xor_relation())).map_err(|e| e.to_string())?;
    match maximize_gap(&sys, &SearchConfig::default()).map_err(|e| e.to_string())? {
        SynthResult::Infeasible => {}
        SynthResult::Found(pf) => {
            return Err(format!(
                "XOR on K3 without ancillas found gap {} but must be infeasible",
                format_rat(&pf.gap)
            ))
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    if dt >= 10.0 {
        return Err(format!("runtime {dt:.2}s exceeds 10 s budget"));
    }
    Ok("AND on K3 gap 2; XOR on K3 infeasible".into())
}

// ---------------------------------------------------------------------------
// Criterion 3: exactly 222 NPN classes over all 65536 4-input functions.
// Runtime < 60 s.
// ---------------------------------------------------------------------------

fn c3_npn_census() -> Check {
    let t0 = Instant::now();
    let count = npn_class_count(4).map_err(|e| e.to_string())?;
    let dt = t0.elapsed().as_secs_f64();
    if count != 222 {
        return Err(format!("{count} classes, expected 222"));
    }
    if dt >= 60.0 {
        return Err(format!("runtime {dt:.2}s exceeds 60 s budget"));
    }
    Ok("222 NPN classes over 65536 functions".into())
}

// ---------------------------------------------------------------------------
// Criterion 4: placement counts under footprint automorphisms: 35 for 8
// distinguishable variables on a tile, 3 on the half-tile (4 variables), and 3
// for a fully symmetric 4-input function on a tile.
// ---------------------------------------------------------------------------

fn c4_symmetry_reduction() -> Check {
    let distinct = |n: u8| -> Vec<Vec<u8>> { (0..n).map(|v| vec![v]).collect() };
    let cases = [
        (Footprint::Tile, 8usize, distinct(8), 35usize),
        (Footprint::HalfTile, 4, distinct(4), 3),
        (Footprint::Tile, 4, vec![vec![0, 1, 2, 3]], 3),
    ];
    for (fp, n, classes, want) in cases {
        let got = enumerate_placements(fp, n, &classes)
            .map_err(|e| e.to_string())?
            .len();
        if got != want {
            return Err(format!(
                "{} with {n} inputs in {} classes: {got} placements, expected {want}",
                fp.name(),
                classes.len()
            ));
        }
    }
    Ok("placement counts 35 / 3 / 3".into())
}

// ---------------------------------------------------------------------------
// Criterion 5: the unbiased 2-in-4 cell's min-over-ancilla energies are
// 0 / 2 / 8 as the count of true inputs deviates from two by 0 / 1 / 2, and
// the exactness check fails.
// ---------------------------------------------------------------------------

fn c5_unbiased_cell() -> Check {
    let pf = quboforge_core::benchgen::unbiased_2in4_cell();
    let report = pf
        .verify(&exactly_k_of_n(2, 4))
        .map_err(|e| e.to_string())?;
    for (mask, energy) in report.min_energy.iter().enumerate() {
        let want = match (mask.count_ones() as i32 - 2).abs() {
            0 => rint(0),
            1 => rint(2),
            _ => rint(8),
        };
        if *energy != want {
            return Err(format!(
                "input mask {mask:04b}: energy {}, expected {}",
                format_rat(energy),
                format_rat(&want)
            ));
        }
    }
    if report.exact {
        return Err("exactness check unexpectedly passed".into());
    }
    if !report.pass {
        return Err("cell failed verification against its declared gap".into());
    }
    Ok("energies 0/2/8 by deviation from two-true; exactness fails".into())
}

// ---------------------------------------------------------------------------
// Criterion 6: on ≥ 20 random specs (n + h ≤ 10) on tile subgraphs, the
// variable-elimination and Shannon constraint systems have identical optima.
// ---------------------------------------------------------------------------

fn c6_ve_shannon() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xace1);
    let graph = Footprint::Tile.graph();
    let cfg = SearchConfig::default();
    let mut checked = 0usize;
    while checked < 24 {
        let n = rng.gen_range(2..=3usize);
        let h = rng.gen_range(0..=2usize);
        // Random disjoint input/ancilla qubits on the tile.
        let mut qubits: Vec<u32> = (0..8).collect();
        qubits.shuffle(&mut rng);
        let inputs = qubits[..n].to_vec();
        let ancillas = qubits[n..n + h].to_vec();
        // Random non-constant function.
        let bits: u32 = rng.gen_range(1..(1u32 << (1 << n)) - 1);
        let function = TruthTable::from_fn(n as u8, |k| bits >> k & 1 == 1).unwrap();
        let spec = SynthesisSpec {
            function,
            graph: graph.clone(),
            inputs,
            ancillas,
            require_exact: false,
            countermodel_filter: None,
        };
        let mut order: Vec<usize> = (0..h).collect();
        order.shuffle(&mut rng);
        let optimum = |sys| match maximize_gap(&sys, &cfg) {
            Ok(SynthResult::Found(pf)) => Ok(Some(pf.gap)),
            Ok(SynthResult::Infeasible) => Ok(None),
            Err(e) => Err(e.to_string()),
        };
        let shannon = optimum(build_shannon_system(&spec).map_err(|e| e.to_string())?)?;
        let ve = optimum(build_ve_system(&spec, &order).map_err(|e| e.to_string())?)?;
        if shannon != ve {
            return Err(format!(
                "spec {checked}: Shannon {:?} vs VE {:?}",
                shannon.as_ref().map(format_rat),
                ve.as_ref().map(format_rat)
            ));
        }
        checked += 1;
    }
    Ok(format!("{checked} random specs: optima agree exactly"))
}

// ---------------------------------------------------------------------------
// Criterion 7: sgen 2-in-4 SAT, 20 seeds × n ∈ {32, 40, 48} on 16×16 Chimera
// with SA ≤ 20 samples × 2000 sweeps: ≥ 90% solved, every zero-energy sample
// decodes satisfying (no tolerance), < 10 min total.
// ---------------------------------------------------------------------------

fn satisfies(inst: &ConstraintInstance, assignment: &std::collections::BTreeMap<u32, bool>) -> bool {
    let bools: Vec<bool> = (1..=inst.n_vars as u32)
        .map(|v| assignment.get(&v).copied().unwrap_or(false))
        .collect();
    inst.cost(&bools) == Some(0)
}

fn c7_end_to_end_sat(embeddings: &mut Vec<bool>) -> Check {
    let t0 = Instant::now();
    let cache = CellCache::new();
    let runs: Vec<(usize, u64)> = [32usize, 40, 48]
        .iter()
        .flat_map(|&n| (0..20u64).map(move |seed| (n, seed)))
        .collect();
    let results: Vec<std::result::Result<(bool, bool, bool), String>> = runs
        .par_iter()
        .map(|&(n, seed)| {
            let inst = gen_sgen_sat(n, SgenVariant::TwoInFour, seed).map_err(|e| e.to_string())?;
            let cfg = PipelineConfig {
                seed: seed.wrapping_mul(0x9e37).wrapping_add(n as u64),
                ..PipelineConfig::default()
            };
            let res = solve_instance(&inst, &cache, &cfg)
                .map_err(|e| format!("n={n} seed={seed}: {e}"))?;
            let solved = match &res.outcome {
                Outcome::Satisfied { assignment } => satisfies(&inst, assignment),
                _ => false,
            };
            Ok((solved, res.zero_energy_sound, res.encoded.embedding.pass))
        })
        .collect();
    let mut solved = 0usize;
    for r in &results {
        let (ok, sound, emb) = r.clone()?;
        if !sound {
            return Err("a zero-energy sample decoded to a falsifying assignment".into());
        }
        embeddings.push(emb);
        if ok {
            solved += 1;
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    let total = results.len();
    if solved * 10 < total * 9 {
        return Err(format!("{solved}/{total} solved, below the 90% bar"));
    }
    if dt >= 600.0 {
        return Err(format!("runtime {dt:.1}s exceeds the 10 min budget"));
    }
    Ok(format!(
        "{solved}/{total} instances satisfied; zero-energy soundness 100%"
    ))
}

// ---------------------------------------------------------------------------
// Criterion 8: biased MaxSAT, 10 seeds at n = 20: pipeline best cost equals
// the brute-force optimum in ≥ 8/10 instances, and energy = g × cost holds on
// every intact-chain sample.
// ---------------------------------------------------------------------------

fn brute_force_optimum(inst: &ConstraintInstance) -> u64 {
    // All constraints are weighted; cost = Σ violated weights. Precompute each
    // constraint's variable bitmask for a fast sweep over all 2^n assignments.
    struct Packed {
        mask: u32,
        kind: quboforge_core::benchgen::ConstraintKind,
        weight: u64,
    }
    let packed: Vec<Packed> = inst
        .constraints
        .iter()
        .map(|c| Packed {
            mask: c.vars.iter().fold(0u32, |m, &v| m | 1 << (v - 1)),
            kind: c.kind,
            weight: c.weight.expect("biased instances are fully weighted"),
        })
        .collect();
    (0u32..1 << inst.n_vars)
        .into_par_iter()
        .map(|a| {
            packed
                .iter()
                .filter(|p| !p.kind.holds((a & p.mask).count_ones() as usize))
                .map(|p| p.weight)
                .sum::<u64>()
        })
        .min()
        .unwrap()
}

fn c8_end_to_end_maxsat(embeddings: &mut Vec<bool>) -> Check {
    let cache = CellCache::new();
    let results: Vec<std::result::Result<(bool, bool, bool), String>> = (0..10u64)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&seed| {
            let inst = gen_maxsat_biased(20, seed, 200).map_err(|e| e.to_string())?;
            let cfg = PipelineConfig {
                seed: 0x5eed ^ seed,
                ..PipelineConfig::default()
            };
            let res =
                solve_instance(&inst, &cache, &cfg).map_err(|e| format!("seed={seed}: {e}"))?;
            let optimum = brute_force_optimum(&inst);
            let hit = matches!(&res.outcome, Outcome::BestCost { cost, .. } if *cost == optimum);
            let identity = res.energy_identity == Some(true);
            Ok((hit, identity, res.encoded.embedding.pass))
        })
        .collect();
    let mut optimal = 0usize;
    for r in &results {
        let (hit, identity, emb) = r.clone()?;
        if !identity {
            return Err("energy = g × cost violated on an intact-chain sample".into());
        }
        embeddings.push(emb);
        if hit {
            optimal += 1;
        }
    }
    if optimal < 8 {
        return Err(format!("{optimal}/10 optima found, below the 8/10 bar"));
    }
    Ok(format!(
        "{optimal}/10 brute-force optima matched; energy–cost identity exact"
    ))
}

// ---------------------------------------------------------------------------
// Criterion 9: verify_embedding passed on every pipeline run above.
// ---------------------------------------------------------------------------

fn c9_embedding_validity(embeddings: &[bool]) -> Check {
    if embeddings.is_empty() {
        return Err("no pipeline runs recorded (criteria 7–8 did not complete)".into());
    }
    let ok = embeddings.iter().filter(|&&b| b).count();
    if ok != embeddings.len() {
        return Err(format!(
            "{ok}/{} embeddings verified; must be 100%",
            embeddings.len()
        ));
    }
    Ok(format!("{ok}/{ok} embeddings verified"))
}

// ---------------------------------------------------------------------------
// Criterion 10: on ≥ 50 random instances with ≤ 12 vertices, the heuristic
// Steiner tree costs at most twice the exhaustive optimum. Both sides use the
// tree's edge cost (half-sum of endpoint weights per edge).
// ---------------------------------------------------------------------------

fn tree_edge_cost(edges: &[(usize, usize)], weights: &[f64]) -> f64 {
    edges
        .iter()
        .map(|&(u, v)| (weights[u] + weights[v]) / 2.0)
        .sum()
}

/// Exact optimum by enumerating vertex subsets containing the terminals and
/// taking the minimum-spanning-tree cost of each connected induced subgraph.
fn exhaustive_optimum(adj: &[Vec<usize>], weights: &[f64], terminals: &[usize]) -> Option<f64> {
    let nv = adj.len();
    let tmask: u32 = terminals.iter().fold(0, |m, &t| m | 1 << t);
    let mut best: Option<f64> = None;
    for sub in 0u32..1 << nv {
        if sub & tmask != tmask {
            continue;
        }
        // Prim's algorithm doubles as the connectivity check.
        let verts: Vec<usize> = (0..nv).filter(|&v| sub >> v & 1 == 1).collect();
        let mut in_tree = vec![false; nv];
        let mut cost = 0.0f64;
        in_tree[verts[0]] = true;
        for _ in 1..verts.len() {
            let mut pick: Option<(f64, usize)> = None;
            for &u in &verts {
                if !in_tree[u] {
                    continue;
                }
                for &v in &adj[u] {
                    if sub >> v & 1 == 1 && !in_tree[v] {
                        let w = (weights[u] + weights[v]) / 2.0;
                        if pick.map_or(true, |(pw, _)| w < pw) {
                            pick = Some((w, v));
                        }
                    }
                }
            }
            match pick {
                Some((w, v)) => {
                    cost += w;
                    in_tree[v] = true;
                }
                None => {
                    cost = f64::INFINITY;
                    break;
                }
            }
        }
        if cost.is_finite() && best.map_or(true, |b| cost < b) {
            best = Some(cost);
        }
    }
    best
}

fn c10_steiner_quality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x57e1);
    let mut checked = 0usize;
    let mut worst = 1.0f64;
    while checked < 60 {
        let nv = rng.gen_range(5..=12usize);
        let mut adj = vec![Vec::new(); nv];
        let mut connected_pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
        // Random spanning tree for connectivity, then extra random edges.
        for v in 1..nv {
            let u = rng.gen_range(0..v);
            connected_pairs.insert((u, v));
        }
        for u in 0..nv {
            for v in u + 1..nv {
                if rng.gen_bool(0.25) {
                    connected_pairs.insert((u, v));
                }
            }
        }
        for &(u, v) in &connected_pairs {
            adj[u].push(v);
            adj[v].push(u);
        }
        let weights: Vec<f64> = (0..nv).map(|_| rng.gen_range(0.5..2.0)).collect();
        let usable = vec![true; nv];
        let k = rng.gen_range(2..=4usize.min(nv));
        let mut verts: Vec<usize> = (0..nv).collect();
        verts.shuffle(&mut rng);
        let terminals = &verts[..k];

        let tree = steiner_tree(&adj, &weights, &usable, terminals).map_err(|e| e.to_string())?;
        let heuristic = tree_edge_cost(&tree.edges, &weights);
        let optimum = exhaustive_optimum(&adj, &weights, terminals)
            .ok_or("exhaustive search found no connecting subgraph")?;
        let ratio = if optimum == 0.0 { 1.0 } else { heuristic / optimum };
        if heuristic > 2.0 * optimum + 1e-9 {
            return Err(format!(
                "instance {checked}: heuristic {heuristic:.3} > 2 × optimum {optimum:.3}"
            ));
        }
        worst = worst.max(ratio);
        checked += 1;
    }
    Ok(format!(
        "{checked} random instances within 2× of optimum (worst ratio {worst:.3})"
    ))
}
