//! Maximum-gap penalty-function synthesis.
//!
//! Given a Boolean function, a subgraph and a placement of its inputs, find the
//! Ising coefficients maximizing the gap `g_min` (see [`crate::penalty`]). Two
//! constraint generators feed a shared witness branch-and-bound over an exact
//! rational LP: [`shannon::build_shannon_system`] (one row per full assignment) and
//! [`ve::build_ve_system`] (bucket elimination with message unknowns, for larger
//! ancilla counts). [`synthesize`] wraps the search in placement enumeration with
//! NPN-symmetry reduction and re-verifies every result by brute force.

pub mod placements;
pub mod shannon;
pub mod system;
pub mod ve;

use std::sync::Arc;

use rayon::prelude::*;

use crate::boolfn::{npn_symmetry_classes, TruthTable};
use crate::chimera::Topology;
use crate::penalty::PenaltyFunction;
use crate::{Error, Result};

pub use placements::{enumerate_placements, Footprint, Placement};
pub use shannon::build_shannon_system;
pub use system::{maximize_gap, ConstraintSystem, SearchConfig, SynthResult};
pub use ve::build_ve_system;

/// A synthesis target: function, host subgraph, and variable placement.
#[derive(Debug, Clone)]
pub struct SynthesisSpec {
    pub function: TruthTable,
    pub graph: Arc<Topology>,
    /// Input index → qubit.
    pub inputs: Vec<u32>,
    /// Qubits available as ancillas.
    pub ancillas: Vec<u32>,
    /// Require countermodels to attain the gap exactly (MaxSAT cells).
    pub require_exact: bool,
    /// Keep only countermodels within this Hamming distance of a model; results
    /// are re-verified against the full set, falling back to no filter on failure.
    pub countermodel_filter: Option<u32>,
}

/// Knobs for [`synthesize`].
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub search: SearchConfig,
    /// Default countermodel filter radius (None disables).
    pub filter: Option<u32>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            search: SearchConfig::default(),
            filter: Some(3),
        }
    }
}

/// Synthesize the maximum-gap penalty for `function` on a footprint with `h`
/// ancillas: enumerate inequivalent placements, maximize the gap on each, keep the
/// best, normalize, and re-verify by brute force.
pub fn synthesize(
    function: &TruthTable,
    footprint: Footprint,
    h: usize,
    require_exact: bool,
    cfg: &SynthConfig,
) -> Result<PenaltyFunction> {
    let n = function.arity() as usize;
    if n + h > footprint.capacity() {
        return Err(Error::Capacity(format!(
            "{n} inputs + {h} ancillas exceed the {} footprint",
            footprint.name()
        )));
    }
    match try_synthesize(function, footprint, h, require_exact, cfg) {
        Ok(pf) => Ok(pf),
        // A Hamming-filtered system is a relaxation; on verification failure retry
        // against the full countermodel set.
        Err(Error::Internal(_)) if cfg.filter.is_some() => {
            let unfiltered = SynthConfig {
                filter: None,
                ..cfg.clone()
            };
            try_synthesize(function, footprint, h, require_exact, &unfiltered)
        }
        Err(e) => Err(e),
    }
}

fn try_synthesize(
    function: &TruthTable,
    footprint: Footprint,
    h: usize,
    require_exact: bool,
    cfg: &SynthConfig,
) -> Result<PenaltyFunction> {
    let n = function.arity() as usize;
    // Ancillas are mutually interchangeable: model them as one extra symmetry
    // class of pseudo-variables so placement enumeration also chooses which
    // footprint qubits host them (the rest stay unused).
    let mut classes = npn_symmetry_classes(function)?;
    if h > 0 {
        classes.push(((n as u8)..(n + h) as u8).collect());
    }
    let placements = enumerate_placements(footprint, n + h, &classes)?;
    let graph = footprint.graph();

    let outcomes: Vec<Result<Option<PenaltyFunction>>> = placements
        .par_iter()
        .map(|pl| {
            let spec = SynthesisSpec {
                function: function.clone(),
                graph: graph.clone(),
                inputs: pl.inputs[..n].to_vec(),
                ancillas: pl.inputs[n..].to_vec(),
                require_exact,
                countermodel_filter: cfg.filter,
            };
            let sys = build_shannon_system(&spec)?;
            match maximize_gap(&sys, &cfg.search)? {
                SynthResult::Found(pf) => Ok(Some(pf)),
                SynthResult::Infeasible => Ok(None),
            }
        })
        .collect();

    let mut best: Option<PenaltyFunction> = None;
    for outcome in outcomes {
        if let Some(pf) = outcome? {
            if best.as_ref().map(|b| pf.gap > b.gap).unwrap_or(true) {
                best = Some(pf);
            }
        }
    }
    let pf = best.ok_or_else(|| {
        Error::Infeasible(format!(
            "no placement of {} on a {} with {h} ancillas admits a positive gap",
            function.to_literal(),
            footprint.name()
        ))
    })?;

    // Normalize (scale so some coefficient attains its range bound; the gap scales
    // along) and re-verify against the FULL countermodel set.
    let (model, c) = pf.model.normalize()?;
    let pf = PenaltyFunction {
        model,
        gap: &pf.gap * &c,
        ..pf
    };
    let report = pf.verify(function)?;
    if !report.pass {
        return Err(Error::Internal(format!(
            "synthesized penalty failed verification: declared gap {}, verified {:?}",
            crate::rat::format_rat(&pf.gap),
            report.true_gap.as_ref().map(crate::rat::format_rat)
        )));
    }
    Ok(pf)
}

#[cfg(test)]
mod tests {
    use super::system::{maximize_gap, SearchConfig, SynthResult};
    use super::*;
    use crate::boolfn::{and_relation, equivalence, xor_relation};
    use crate::chimera::CustomGraph;
    use crate::rat::{rat, rint};

    fn spec_on_complete(
        function: TruthTable,
        n: usize,
        h: usize,
        require_exact: bool,
    ) -> SynthesisSpec {
        let graph = Arc::new(Topology::Custom(CustomGraph::complete((n + h) as u32)));
        SynthesisSpec {
            function,
            graph,
            inputs: (0..n as u32).collect(),
            ancillas: (n as u32..(n + h) as u32).collect(),
            require_exact,
            countermodel_filter: None,
        }
    }

    fn gap_of(spec: &SynthesisSpec) -> Option<crate::Rat> {
        let sys = build_shannon_system(spec).unwrap();
        match maximize_gap(&sys, &SearchConfig::default()).unwrap() {
            SynthResult::Found(pf) => {
                // Soundness: every synthesized penalty passes brute-force checks.
                let report = pf.verify(&spec.function).unwrap();
                assert!(report.pass, "verification failed: {report:?}");
                Some(pf.gap)
            }
            SynthResult::Infeasible => None,
        }
    }

    #[test]
    fn identity_on_one_qubit_gap_four() {
        // Rows {o+θ₁=0, o−θ₁≥g}: optimum θ₁=−2, g=4.
        let f = TruthTable::from_fn(1, |k| k == 1).unwrap();
        let spec = spec_on_complete(f, 1, 0, false);
        assert_eq!(gap_of(&spec), Some(rint(4)));
    }

    #[test]
    fn equivalence_on_edge_gap_two() {
        let spec = spec_on_complete(equivalence(), 2, 0, false);
        let sys = build_shannon_system(&spec).unwrap();
        let SynthResult::Found(pf) = maximize_gap(&sys, &SearchConfig::default()).unwrap() else {
            panic!("expected feasible")
        };
        assert_eq!(pf.gap, rint(2));
        // Example 2 exactly: 1 − x₁x₂.
        assert_eq!(pf.model.offset, rint(1));
        assert_eq!(pf.model.coupling(0, 1), rint(-1));
        assert!(pf.model.biases.is_empty());
    }

    #[test]
    fn and_on_k3_gap_two() {
        let spec = spec_on_complete(and_relation(), 3, 0, false);
        assert_eq!(gap_of(&spec), Some(rint(2)));
    }

    #[test]
    fn xor_on_k3_infeasible() {
        // Example 4: the XOR relation has no ancilla-free encoding.
        let spec = spec_on_complete(xor_relation(), 3, 0, false);
        assert_eq!(gap_of(&spec), None);
    }

    #[test]
    fn xor_synthesized_with_ancillas_on_tile() {
        let pf = synthesize(
            &xor_relation(),
            Footprint::Tile,
            3,
            false,
            &SynthConfig::default(),
        )
        .unwrap();
        assert!(pf.gap >= rint(2), "gap {}", crate::rat::format_rat(&pf.gap));
        let report = pf.verify(&xor_relation()).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn ve_matches_shannon_on_and_k3() {
        let spec = spec_on_complete(and_relation(), 3, 0, false);
        let sys = build_ve_system(&spec, &[]).unwrap();
        let SynthResult::Found(pf) = maximize_gap(&sys, &SearchConfig::default()).unwrap() else {
            panic!("expected feasible")
        };
        assert_eq!(pf.gap, rint(2));
    }

    #[test]
    fn ve_matches_shannon_with_ancilla() {
        // AND relation with one ancilla on the tile layout of Example 3.
        let graph = Footprint::Tile.graph();
        let spec = SynthesisSpec {
            function: and_relation(),
            graph,
            inputs: vec![0, 4, 5],
            ancillas: vec![1],
            require_exact: false,
            countermodel_filter: None,
        };
        let shannon = build_shannon_system(&spec).unwrap();
        let ve = build_ve_system(&spec, &[0]).unwrap();
        let gap = |sys| match maximize_gap(&sys, &SearchConfig::default()).unwrap() {
            SynthResult::Found(pf) => Some(pf.gap),
            SynthResult::Infeasible => None,
        };
        let gs = gap(shannon);
        assert_eq!(gs, gap(ve));
        assert_eq!(gs, Some(rint(2)));
    }

    #[test]
    fn hamming_filter_still_verifies() {
        let pf = synthesize(
            &and_relation(),
            Footprint::HalfTile,
            1,
            false,
            &SynthConfig {
                filter: Some(1),
                ..Default::default()
            },
        )
        .unwrap();
        // Verified against the FULL countermodel set despite the filter.
        assert!(pf.verify(&and_relation()).unwrap().pass);
        assert!(pf.gap >= rat(1, 1));
    }
}
