//! `quboforge`: batch command-line driver for the SAT/MaxSAT → Chimera-Ising
//! toolchain. Stages exchange JSON artifacts so each can be rerun on its own:
//! `genlib` (offline cell synthesis), `bench` (instance generation), `encode`
//! (frontend + place & route), `solve` (sampling + decoding), `verify`
//! (penalty or embedding checks), `npn-stats`.
//!
//! Exit codes: 0 = found/pass, 2 = unknown (no certificate), 1 = error.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use quboforge_core::benchgen::{
    dimacs_string, gen_maxsat_biased, gen_maxsat_unbiased, gen_sgen_sat, wcnf_string, SgenVariant,
};
use quboforge_core::boolfn::{npn_class_count, TruthTable};
use quboforge_core::chimera::ChimeraGraph;
use quboforge_core::frontend::{parse_dimacs, parse_wcnf, CnfProblem};
use quboforge_core::gatelib::{build_library, standard_cells, GateLibrary};
use quboforge_core::ising::{spins, IsingModel};
use quboforge_core::penalty::PenaltyFunction;
use quboforge_core::pipeline::{encode_cnf, solve_cnf, CellCache, Encoded, Outcome, PipelineConfig};
use quboforge_core::placeroute::{chain_spanning_edges, DecodeMap};
use quboforge_core::rat::{format_rat, rint};
use quboforge_core::sampler::{anneal, check_sat, decode, maxsat_cost, MaxSatCost, Schedule};
use quboforge_core::synth::{Footprint, SynthConfig};

#[derive(Parser)]
#[command(name = "quboforge", version, about = "Compile SAT/MaxSAT to Chimera Ising models and solve them classically")]
struct Cli {
    /// Worker threads for internal parallelism (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize a penalty-cell library (offline phase).
    Genlib {
        /// `standard` (worked-example cells, no synthesis) or a file of
        /// truth-table literals (`tt<arity>:<hex>`, one per line).
        #[arg(long)]
        functions: String,
        /// Comma-separated: half-tile, tile, 2-tile.
        #[arg(long, value_delimiter = ',', default_values_t = ["half-tile".to_string(), "tile".to_string(), "2-tile".to_string()])]
        footprints: Vec<String>,
        /// Require exact penalties (countermodels attain the gap).
        #[arg(long)]
        exact: bool,
        /// Branch-and-bound node budget per placement.
        #[arg(long)]
        node_budget: Option<usize>,
        /// Per-placement time budget in seconds.
        #[arg(long)]
        time_budget_s: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode a CNF/WCNF onto a Chimera graph (frontend + place & route).
    Encode {
        /// DIMACS CNF or WCNF file (format sniffed from the header).
        #[arg(long)]
        cnf: PathBuf,
        /// Cell library JSON; defaults to $QUBOFORGE_LIB, then built-in cells.
        #[arg(long)]
        lib: Option<PathBuf>,
        /// Grid size, e.g. 16x16.
        #[arg(long, default_value = "16x16")]
        graph: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Model artifact (Ising coefficients + decode map).
        #[arg(long)]
        out: PathBuf,
        /// Embedding artifact (chains + verification report).
        #[arg(long)]
        embedding: PathBuf,
    },
    /// Sample a model and decode; or run end-to-end with --cnf alone.
    Solve {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        embedding: Option<PathBuf>,
        /// Source formula: judges samples (and enables one-shot mode).
        #[arg(long)]
        cnf: Option<PathBuf>,
        #[arg(long)]
        lib: Option<PathBuf>,
        #[arg(long, default_value = "16x16")]
        graph: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 2000)]
        sweeps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Results JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a penalty cell against a truth table, or an embedding artifact.
    Verify {
        #[arg(long)]
        penalty: Option<PathBuf>,
        /// Truth-table literal, e.g. tt3:96.
        #[arg(long)]
        tt: Option<String>,
        #[arg(long)]
        embedding: Option<PathBuf>,
    },
    /// Generate benchmark instances (DIMACS/WCNF + JSON sidecar).
    Bench {
        #[command(subcommand)]
        family: BenchCmd,
    },
    /// Count NPN equivalence classes of n-input functions.
    NpnStats {
        #[arg(long, default_value_t = 4)]
        arity: u8,
    },
}

#[derive(Subcommand)]
enum BenchCmd {
    /// Satisfiable sgen-style instance with a planted solution.
    Sgen {
        #[arg(long)]
        n: usize,
        /// one-in-five | two-in-four
        #[arg(long, default_value = "two-in-four")]
        variant: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output prefix; writes <prefix>.cnf and <prefix>.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Unsatisfiable weighted instance with a verified optimum profile.
    MaxsatBiased {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        max_tries: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Equal-weight MaxSAT instance (flip one constraint, remove five).
    MaxsatUnbiased {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("error: jobs: {e}");
            std::process::exit(1);
        }
    }
    match run(cli.cmd) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}

fn run(cmd: Cmd) -> Result<i32> {
    match cmd {
        Cmd::Genlib { functions, footprints, exact, node_budget, time_budget_s, out } => {
            genlib(&functions, &footprints, exact, node_budget, time_budget_s, &out)
        }
        Cmd::Encode { cnf, lib, graph, seed, out, embedding } => {
            encode(&cnf, lib.as_deref(), &graph, seed, &out, &embedding)
        }
        Cmd::Solve { model, embedding, cnf, lib, graph, samples, sweeps, seed, out } => solve(
            model.as_deref(),
            embedding.as_deref(),
            cnf.as_deref(),
            lib.as_deref(),
            &graph,
            samples,
            sweeps,
            seed,
            out.as_deref(),
        ),
        Cmd::Verify { penalty, tt, embedding } => verify(penalty.as_deref(), tt.as_deref(), embedding.as_deref()),
        Cmd::Bench { family } => bench(family),
        Cmd::NpnStats { arity } => {
            let count = npn_class_count(arity).context("npn-stats")?;
            println!("{count}");
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn parse_grid(s: &str) -> Result<(u32, u32)> {
    let (r, c) = s.split_once('x').context("grid must look like 16x16")?;
    Ok((r.trim().parse()?, c.trim().parse()?))
}

fn read_formula(path: &Path) -> Result<CnfProblem> {
    let text = std::fs::read_to_string(path).with_context(|| format!("parse: reading {}", path.display()))?;
    let weighted = text.lines().any(|l| l.trim_start().starts_with("p wcnf"));
    let r = if weighted { parse_wcnf(&text) } else { parse_dimacs(&text) };
    r.with_context(|| format!("parse: {}", path.display()))
}

fn load_library(path: Option<&Path>) -> Result<GateLibrary> {
    let env_path = std::env::var_os("QUBOFORGE_LIB").map(PathBuf::from);
    match path.or(env_path.as_deref()) {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("genlib: reading {}", p.display()))?;
            let v: Value = serde_json::from_str(&text).context("genlib: library JSON")?;
            GateLibrary::from_json(&v).context("genlib: library JSON")
        }
        None => standard_cells().context("genlib: built-in cells"),
    }
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(v)? + "\n")
        .with_context(|| format!("io: writing {}", path.display()))
}

fn decode_map_json(map: &DecodeMap) -> Value {
    json!({
        "chains": map.chains.iter().map(|(v, c)| (v.to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
        "negated": map.negated.iter().map(|(v, n)| (v.to_string(), json!(n))).collect::<serde_json::Map<_, _>>(),
        "ancillas": map.ancillas.iter().collect::<Vec<_>>(),
    })
}

fn decode_map_from_json(v: &Value) -> Result<DecodeMap> {
    let chains: BTreeMap<u32, Vec<u32>> = v
        .get("chains")
        .and_then(Value::as_object)
        .context("model artifact: decode.chains")?
        .iter()
        .map(|(k, qs)| {
            let var: u32 = k.parse().context("decode.chains key")?;
            let qubits = qs
                .as_array()
                .context("decode.chains value")?
                .iter()
                .filter_map(Value::as_u64)
                .map(|q| q as u32)
                .collect();
            Ok((var, qubits))
        })
        .collect::<Result<_>>()?;
    let negated = v
        .get("negated")
        .and_then(Value::as_object)
        .map(|m| {
            m.iter()
                .filter_map(|(k, b)| Some((k.parse().ok()?, b.as_bool()?)))
                .collect()
        })
        .unwrap_or_else(|| chains.keys().map(|&v| (v, false)).collect());
    let ancillas: BTreeSet<u32> = v
        .get("ancillas")
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(Value::as_u64).map(|q| q as u32).collect())
        .unwrap_or_default();
    Ok(DecodeMap { chains, negated, ancillas })
}

fn embedding_json(encoded: &Encoded) -> Value {
    json!({
        "graph": {
            "rows": encoded.graph.rows,
            "cols": encoded.graph.cols,
            "shore": encoded.graph.shore,
            "disabled": encoded.graph.disabled.iter().collect::<Vec<_>>(),
        },
        "chains": encoded.routing.chains.iter().map(|(v, c)| (v.to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
        "hpwl": encoded.placement.hpwl,
        "tree_cost": encoded.routing.tree_cost,
        "report": {
            "pass": encoded.embedding.pass,
            "violations": encoded.embedding.violations,
            "max_chain_len": encoded.embedding.max_chain_len,
            "chain_histogram": encoded.embedding.chain_histogram.iter()
                .map(|(l, n)| (l.to_string(), json!(n))).collect::<serde_json::Map<_, _>>(),
        },
    })
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn genlib(
    functions: &str,
    footprints: &[String],
    exact: bool,
    node_budget: Option<usize>,
    time_budget_s: Option<u64>,
    out: &Path,
) -> Result<i32> {
    let lib = if functions == "standard" {
        standard_cells().context("genlib: built-in cells")?
    } else {
        let text = std::fs::read_to_string(functions)
            .with_context(|| format!("genlib: reading {functions}"))?;
        let tts: Vec<TruthTable> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(TruthTable::from_literal)
            .collect::<quboforge_core::Result<_>>()
            .context("genlib: truth-table literal")?;
        let fps: Vec<Footprint> = footprints
            .iter()
            .map(|s| Footprint::parse(s))
            .collect::<quboforge_core::Result<_>>()
            .context("genlib: footprint")?;
        let mut cfg = SynthConfig::default();
        if let Some(n) = node_budget {
            cfg.search.node_budget = n;
        }
        if let Some(s) = time_budget_s {
            cfg.search.time_budget = Some(Duration::from_secs(s));
        }
        build_library(&tts, &fps, exact, &cfg).context("synth")?
    };
    let n_cells: usize = lib.cells.values().map(Vec::len).sum();
    write_json(out, &lib.to_json())?;
    println!("genlib: {} cells across {} classes, {} skipped → {}",
        n_cells, lib.cells.len(), lib.metadata.skipped.len(), out.display());
    for (what, why) in &lib.metadata.skipped {
        println!("  skipped {what}: {why}");
    }
    Ok(0)
}

fn encode(
    cnf_path: &Path,
    lib_path: Option<&Path>,
    graph: &str,
    seed: u64,
    out: &Path,
    emb_out: &Path,
) -> Result<i32> {
    let problem = read_formula(cnf_path)?;
    let lib = load_library(lib_path)?;
    let (rows, cols) = parse_grid(graph)?;
    let cfg = PipelineConfig { rows, cols, seed, ..PipelineConfig::default() };
    let cache = CellCache::new();
    let encoded = encode_cnf(&problem, &lib, &cache, &cfg).context("encode")?;
    let model = json!({
        "model": encoded.assembled.model.to_json().context("encode: model artifact")?,
        "raw": encoded.assembled.raw.to_json().context("encode: model artifact")?,
        "scale": format_rat(&encoded.assembled.scale),
        "decode": decode_map_json(&encoded.assembled.decode),
        "n_vars": problem.n_vars,
    });
    write_json(out, &model)?;
    write_json(emb_out, &embedding_json(&encoded))?;
    println!(
        "encode: {} cells, {} qubits, max chain {}, embedding {} → {}, {}",
        encoded.netlist.cells.len(),
        encoded.assembled.model.active_qubits().len(),
        encoded.embedding.max_chain_len,
        if encoded.embedding.pass { "pass" } else { "FAIL" },
        out.display(),
        emb_out.display(),
    );
    if !encoded.embedding.pass {
        bail!("place-route: embedding verification failed: {:?}", encoded.embedding.violations);
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn solve(
    model_path: Option<&Path>,
    _embedding: Option<&Path>,
    cnf_path: Option<&Path>,
    lib_path: Option<&Path>,
    graph: &str,
    samples: usize,
    sweeps: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<i32> {
    // One-shot mode: no model artifact, formula straight through the pipeline.
    if model_path.is_none() {
        let cnf_path = cnf_path.context("solve: needs --model or --cnf")?;
        let problem = read_formula(cnf_path)?;
        let lib = load_library(lib_path)?;
        let (rows, cols) = parse_grid(graph)?;
        let cfg = PipelineConfig {
            rows,
            cols,
            seed,
            num_samples: samples,
            sweeps,
            ..PipelineConfig::default()
        };
        let cache = CellCache::new();
        let r = solve_cnf(&problem, &lib, &cache, &cfg).context("solve")?;
        let code = r.outcome.exit_code();
        report_outcome(&r.outcome);
        if let Some(p) = out {
            let samples_json: Vec<Value> = r
                .decoded
                .samples
                .iter()
                .map(|s| {
                    json!({
                        "assignment": s.assignment.iter().map(|(v, b)| (v.to_string(), json!(b))).collect::<serde_json::Map<_, _>>(),
                        "energy": s.energy,
                        "occurrences": s.occurrences,
                        "broken_chains": s.broken_chains,
                    })
                })
                .collect();
            write_json(
                p,
                &json!({
                    "outcome": outcome_json(&r.outcome),
                    "samples": samples_json,
                    "break_rate": r.decoded.break_rate.iter().map(|(v, f)| (v.to_string(), json!(f))).collect::<serde_json::Map<_, _>>(),
                    "zero_energy_sound": r.zero_energy_sound,
                    "energy_identity": r.energy_identity,
                    "stats": {
                        "cells": r.stats.cells,
                        "qubits": r.stats.qubits,
                        "max_chain_len": r.stats.max_chain_len,
                        "encode_ms": r.stats.encode_ms as u64,
                        "sample_ms": r.stats.sample_ms as u64,
                    },
                }),
            )?;
        }
        return Ok(code);
    }

    // Artifact mode: sample a previously encoded model.
    let text = std::fs::read_to_string(model_path.unwrap())
        .with_context(|| format!("io: reading {}", model_path.unwrap().display()))?;
    let v: Value = serde_json::from_str(&text).context("solve: model artifact")?;
    let model = IsingModel::from_json(v.get("model").context("solve: model artifact missing 'model'")?)
        .context("solve: model artifact")?;
    let raw = v
        .get("raw")
        .map(IsingModel::from_json)
        .transpose()
        .context("solve: model artifact")?;
    let map = decode_map_from_json(v.get("decode").context("solve: model artifact missing 'decode'")?)?;
    let problem = cnf_path.map(read_formula).transpose()?;

    let set = anneal(&model, samples, sweeps, Schedule::default(), seed).context("sample")?;
    let decoded = decode(&set, &map);
    let zero = rint(0);
    // Judge: an exactly-zero raw energy certifies a ground state; a formula, if
    // given, is the authoritative check.
    let mut code = 2;
    let mut outcome = json!({"status": "unknown", "best_energy": set.best_energy()});
    if let Some(problem) = &problem {
        if problem.soft_clauses().next().is_some() {
            let best = decoded
                .samples
                .iter()
                .filter_map(|s| match maxsat_cost(&s.assignment, problem) {
                    MaxSatCost::Cost(c) => Some((c, s)),
                    MaxSatCost::HardViolation => None,
                })
                .min_by_key(|(c, _)| *c);
            if let Some((cost, s)) = best {
                code = 0;
                outcome = json!({"status": "best-cost", "cost": cost,
                    "assignment": s.assignment.iter().map(|(v, b)| (v.to_string(), json!(b))).collect::<serde_json::Map<_, _>>()});
            }
        } else if let Some(s) = decoded.samples.iter().find(|s| check_sat(&s.assignment, problem)) {
            code = 0;
            outcome = json!({"status": "satisfied",
                "assignment": s.assignment.iter().map(|(v, b)| (v.to_string(), json!(b))).collect::<serde_json::Map<_, _>>()});
        }
    } else if let Some(raw) = &raw {
        for s in &set.samples {
            let sv = spins(set.order.iter().copied().zip(s.spins.iter().copied()));
            if raw.energy(&sv).context("sample: re-evaluation")? == zero {
                code = 0;
                outcome = json!({"status": "ground-state", "energy": s.energy});
                break;
            }
        }
    }
    println!(
        "solve: best energy {:?}, {} distinct states → {}",
        set.best_energy(),
        set.samples.len(),
        if code == 0 { "found" } else { "unknown" }
    );
    if let Some(p) = out {
        let samples_json: Vec<Value> = decoded
            .samples
            .iter()
            .map(|s| {
                json!({
                    "assignment": s.assignment.iter().map(|(v, b)| (v.to_string(), json!(b))).collect::<serde_json::Map<_, _>>(),
                    "energy": s.energy,
                    "occurrences": s.occurrences,
                    "broken_chains": s.broken_chains,
                })
            })
            .collect();
        write_json(
            p,
            &json!({
                "outcome": outcome,
                "samples": samples_json,
                "break_rate": decoded.break_rate.iter().map(|(v, f)| (v.to_string(), json!(f))).collect::<serde_json::Map<_, _>>(),
            }),
        )?;
    }
    Ok(code)
}

fn report_outcome(outcome: &Outcome) {
    match outcome {
        Outcome::Satisfied { assignment } => {
            let line: Vec<String> = assignment
                .iter()
                .map(|(v, b)| format!("{}{v}", if *b { "" } else { "-" }))
                .collect();
            println!("satisfied: {}", line.join(" "));
        }
        Outcome::BestCost { cost, .. } => println!("best cost: {cost}"),
        Outcome::Unknown { best_energy } => {
            println!("unknown (best energy {best_energy:?}); not a proof of unsatisfiability")
        }
    }
}

fn outcome_json(outcome: &Outcome) -> Value {
    match outcome {
        Outcome::Satisfied { assignment } => json!({
            "status": "satisfied",
            "assignment": assignment.iter().map(|(v, b)| (v.to_string(), json!(b))).collect::<serde_json::Map<_, _>>(),
        }),
        Outcome::BestCost { assignment, cost } => json!({
            "status": "best-cost",
            "cost": cost,
            "assignment": assignment.iter().map(|(v, b)| (v.to_string(), json!(b))).collect::<serde_json::Map<_, _>>(),
        }),
        Outcome::Unknown { best_energy } => json!({"status": "unknown", "best_energy": best_energy}),
    }
}

fn verify(penalty: Option<&Path>, tt: Option<&str>, embedding: Option<&Path>) -> Result<i32> {
    match (penalty, embedding) {
        (Some(p), None) => {
            let tt = tt.context("verify: --penalty needs --tt <literal>")?;
            let tt = TruthTable::from_literal(tt).context("verify: truth-table literal")?;
            let text = std::fs::read_to_string(p).with_context(|| format!("io: reading {}", p.display()))?;
            let v: Value = serde_json::from_str(&text).context("verify: penalty JSON")?;
            let pf = PenaltyFunction::from_json(&v).context("verify: penalty JSON")?;
            let report = pf.verify(&tt).context("verify")?;
            println!(
                "declared gap {} ({}exact); verified gap {}; models at zero: {}; pass: {}",
                format_rat(&pf.gap),
                if pf.exact { "" } else { "not " },
                report.true_gap.as_ref().map(format_rat).unwrap_or_else(|| "—".into()),
                report.models_at_zero,
                report.pass,
            );
            Ok(if report.pass { 0 } else { 1 })
        }
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("io: reading {}", p.display()))?;
            let v: Value = serde_json::from_str(&text).context("verify: embedding JSON")?;
            let g = v.get("graph").context("verify: embedding missing graph")?;
            let num = |k: &str| -> Result<u32> {
                g.get(k).and_then(Value::as_u64).map(|x| x as u32)
                    .with_context(|| format!("verify: embedding graph.{k}"))
            };
            let disabled: BTreeSet<u32> = g
                .get("disabled")
                .and_then(Value::as_array)
                .map(|a| a.iter().filter_map(Value::as_u64).map(|q| q as u32).collect())
                .unwrap_or_default();
            let graph = ChimeraGraph::new(num("rows")?, num("cols")?, num("shore")?, disabled)
                .context("verify: embedding graph")?;
            let chains: BTreeMap<u32, Vec<u32>> = v
                .get("chains")
                .and_then(Value::as_object)
                .context("verify: embedding missing chains")?
                .iter()
                .filter_map(|(k, qs)| {
                    Some((
                        k.parse().ok()?,
                        qs.as_array()?.iter().filter_map(Value::as_u64).map(|q| q as u32).collect(),
                    ))
                })
                .collect();
            let mut violations = Vec::new();
            let mut owner: BTreeMap<u32, u32> = BTreeMap::new();
            for (&var, chain) in &chains {
                if chain_spanning_edges(&graph, chain).is_none() {
                    violations.push(format!("chain of {var} is disconnected"));
                }
                for &q in chain {
                    if !graph.is_enabled(q) {
                        violations.push(format!("chain of {var} uses disabled qubit {q}"));
                    }
                    if let Some(&u) = owner.get(&q) {
                        violations.push(format!("chains of {u} and {var} share qubit {q}"));
                    }
                    owner.insert(q, var);
                }
            }
            let pass = violations.is_empty();
            println!("embedding: {} chains, {}", chains.len(), if pass { "pass" } else { "FAIL" });
            for w in &violations {
                println!("  {w}");
            }
            Ok(if pass { 0 } else { 1 })
        }
        _ => bail!("verify: pass exactly one of --penalty (with --tt) or --embedding"),
    }
}

fn bench(family: BenchCmd) -> Result<i32> {
    match family {
        BenchCmd::Sgen { n, variant, seed, out } => {
            let variant = match variant.as_str() {
                "one-in-five" => SgenVariant::OneInFive,
                "two-in-four" => SgenVariant::TwoInFour,
                other => bail!("bench: unknown variant {other}"),
            };
            let inst = gen_sgen_sat(n, variant, seed).context("bench")?;
            let cnf_path = out.with_extension("cnf");
            std::fs::write(&cnf_path, dimacs_string(&inst.to_cnf()))
                .with_context(|| format!("io: writing {}", cnf_path.display()))?;
            write_json(&out.with_extension("json"), &inst.sidecar_json(variant.name(), seed))?;
            println!(
                "bench: sgen {} n={n} seed={seed} → {} (+ sidecar)",
                variant.name(),
                cnf_path.display()
            );
            Ok(0)
        }
        BenchCmd::MaxsatBiased { n, seed, max_tries, out } => {
            let inst = gen_maxsat_biased(n, seed, max_tries).context("bench")?;
            let wcnf_path = out.with_extension("wcnf");
            std::fs::write(&wcnf_path, wcnf_string(&inst.to_wcnf()))
                .with_context(|| format!("io: writing {}", wcnf_path.display()))?;
            write_json(&out.with_extension("json"), &inst.sidecar_json("maxsat-biased", seed))?;
            println!(
                "bench: biased MaxSAT n={n} seed={seed} profile_verified={:?} → {}",
                inst.profile_verified,
                wcnf_path.display()
            );
            Ok(0)
        }
        BenchCmd::MaxsatUnbiased { n, seed, out } => {
            let inst = gen_maxsat_unbiased(n, seed).context("bench")?;
            let wcnf_path = out.with_extension("wcnf");
            std::fs::write(&wcnf_path, wcnf_string(&inst.to_wcnf()))
                .with_context(|| format!("io: writing {}", wcnf_path.display()))?;
            write_json(&out.with_extension("json"), &inst.sidecar_json("maxsat-unbiased", seed))?;
            println!("bench: unbiased MaxSAT n={n} seed={seed} → {}", wcnf_path.display());
            Ok(0)
        }
    }
}
