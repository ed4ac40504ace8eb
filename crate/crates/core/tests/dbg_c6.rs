use std::sync::Arc;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use quboforge_core::boolfn::TruthTable;
use quboforge_core::synth::{build_shannon_system, build_ve_system, maximize_gap, Footprint, SearchConfig, SynthResult, SynthesisSpec};
use quboforge_core::rat::format_rat;

#[test]
fn dbg_c6() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xace1);
    let graph = Footprint::Tile.graph();
    let cfg = SearchConfig::default();
    for i in 0..24 {
        let n = rng.gen_range(2..=3usize);
        let h = rng.gen_range(0..=2usize);
        let mut qubits: Vec<u32> = (0..8).collect();
        qubits.shuffle(&mut rng);
        let inputs = qubits[..n].to_vec();
        let ancillas = qubits[n..n + h].to_vec();
        let bits: u32 = rng.gen_range(1..(1u32 << (1 << n)) - 1);
        let function = TruthTable::from_fn(n as u8, |k| bits >> k & 1 == 1).unwrap();
        let spec = SynthesisSpec { function, graph: graph.clone(), inputs: inputs.clone(), ancillas: ancillas.clone(), require_exact: false, countermodel_filter: None };
        let mut order: Vec<usize> = (0..h).collect();
        order.shuffle(&mut rng);
        let go = |sys| match maximize_gap(&sys, &cfg) {
            Ok(SynthResult::Found(pf)) => format!("gap {}", format_rat(&pf.gap)),
            Ok(SynthResult::Infeasible) => "infeasible".into(),
            Err(e) => format!("ERR {e}"),
        };
        let s = go(build_shannon_system(&spec).unwrap());
        let v = go(build_ve_system(&spec, &order).unwrap());
        eprintln!("{i}: n={n} h={h} in={inputs:?} anc={ancillas:?} bits={bits:#x} order={order:?} shannon=[{s}] ve=[{v}]");
    }
}
