//! Experiment drivers shared by the CLI and the acceptance suite.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use rand::Rng;
use rayon::prelude::*;
use semirandom_core::engine::{run, run_rounds, run_to_completion, RunMetrics, RunOptions};
use semirandom_core::graph::{Adjacency, ProcessState, SimpleGraph, Vertex};
use semirandom_core::lower_bound::{eps1, first_phase_len, min_degree_baseline, xi, FDelta};
use semirandom_core::property_p::{
    local_solve, run_start, summarize, LocalResult, MultistartReport, OptimizerConfig,
    PartitionVector,
};
use semirandom_core::rng;
use semirandom_core::strategy::{one_based, upper_bound_replicate, FourPhaseConfig};
use semirandom_core::twomatching::{
    cyclic_proxy, cyclic_subset_count, kappa_bruteforce, short_cycle_census, tutte_berge_min,
    CyclicProxy, TBCertificate, CYCLE_LENGTH_LIMIT, CYCLIC_SUBSET_VERTEX_LIMIT, KAPPA_EDGE_LIMIT,
    TUTTE_BERGE_VERTEX_LIMIT,
};
use serde::{Deserialize, Serialize};

use crate::trace::write_trace;

/// Files written next to the main output of `simulate-upper`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Artifacts<'a> {
    pub dir: Option<&'a Path>,
    pub trace: bool,
    pub cycle: bool,
}

/// One CSV row of `simulate-upper`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperRow {
    pub seed: u64,
    pub n: usize,
    pub yellow_budget: f64,
    pub tau1: Option<u64>,
    pub tau2: Option<u64>,
    pub tau3: Option<u64>,
    pub tau4: Option<u64>,
    pub tau4_over_n: Option<f64>,
    pub v0_over_n: Option<f64>,
    pub v1_over_n: Option<f64>,
    pub green_count: Option<usize>,
    pub edges_total: u64,
    pub edges_discarded: u64,
    pub matching_components: Option<usize>,
    pub completion_rounds: u64,
    pub min_end_set: Option<usize>,
    pub hamilton_verified: bool,
    pub success: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UpperRun {
    pub seed: u64,
    pub metrics: RunMetrics,
}

impl UpperRun {
    pub fn row(&self, yellow_budget: f64) -> UpperRow {
        let m = &self.metrics;
        let n = m.n as f64;
        let tau = |i: usize| m.tau.get(i).copied();
        UpperRow {
            seed: self.seed,
            n: m.n,
            yellow_budget,
            tau1: tau(0),
            tau2: tau(1),
            tau3: tau(2),
            tau4: tau(3),
            tau4_over_n: tau(3).map(|t| t as f64 / n),
            v0_over_n: m.v0_count.map(|c| c as f64 / n),
            v1_over_n: m.v1_count.map(|c| c as f64 / n),
            green_count: m.green_count,
            edges_total: m.edges_total,
            edges_discarded: m.edges_discarded,
            matching_components: m.matching_components,
            completion_rounds: m.completion_rounds,
            min_end_set: m.min_end_set,
            hamilton_verified: m.hamilton_verified == Some(true),
            success: m.success,
        }
    }
}

/// Runs the upper-bound strategy to a verified Hamilton cycle for `seed`.
pub fn simulate_upper(
    n: usize,
    config: FourPhaseConfig,
    seed: u64,
    art: Artifacts<'_>,
) -> anyhow::Result<UpperRun> {
    let (mut st, mut s) = upper_bound_replicate(n, config, seed, 0)?;
    let metrics = run_to_completion(&mut st, &mut s, &RunOptions::default());
    if let Some(dir) = art.dir {
        if art.trace {
            let path = dir.join(format!("trace_seed{seed}.jsonl"));
            let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_trace(BufWriter::new(f), st.edges())?;
        }
        if let (true, Some(c)) = (art.cycle, s.cycle()) {
            let path = dir.join(format!("cycle_seed{seed}.txt"));
            let mut w = BufWriter::new(
                File::create(&path).with_context(|| format!("creating {}", path.display()))?,
            );
            let labels: Vec<String> = one_based(c).iter().map(u64::to_string).collect();
            writeln!(w, "{}", labels.join(" "))?;
        }
    }
    Ok(UpperRun { seed, metrics })
}

pub fn simulate_upper_many(
    n: usize,
    config: FourPhaseConfig,
    seeds: &[u64],
    art: Artifacts<'_>,
) -> anyhow::Result<Vec<UpperRun>> {
    seeds
        .par_iter()
        .map(|&s| simulate_upper(n, config, s, art))
        .collect()
}

/// One CSV row of `simulate-lower`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerRow {
    pub seed: u64,
    pub n: usize,
    pub delta: f64,
    pub phase1_rounds: u64,
    pub x111_over_n: f64,
    pub xi: f64,
    pub completion_round: Option<u64>,
    pub completion_over_n: Option<f64>,
    pub predicted_completion_over_n: f64,
    pub non_greedy_moves: u64,
    pub forced_moves: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LowerRun {
    pub row: LowerRow,
    /// `(t, X111(t) / n)` during the first phase.
    pub trajectory: Vec<(u64, f64)>,
}

/// Plays `F_δ` (greedy for `δ = 0`) through the first phase while tracking
/// problematic vertices, then until minimum degree 2.
pub fn simulate_lower(
    n: usize,
    delta: f64,
    seed: u64,
    sample_every: Option<u64>,
) -> anyhow::Result<LowerRun> {
    let mut st = ProcessState::for_replicate(n, seed, 0)?;
    let mut f = FDelta::new(&st, delta)?;
    let phase1 = first_phase_len(n);
    let opts = RunOptions {
        round_cap: None,
        sample_every,
        track_problematic: true,
    };
    let m = run_rounds(&mut st, &mut f, phase1, &opts);
    if let Some(d) = m.diagnostic {
        anyhow::bail!("seed {seed}: {d}");
    }
    let x111 = m.problematic_count_trajectory.last().map_or(0.0, |p| p.1);
    let rest = run(
        &mut st,
        &mut f,
        |_, s: &FDelta| s.completion().is_some(),
        &RunOptions::default(),
    );
    let completion = f.completion().filter(|_| rest.success);
    Ok(LowerRun {
        row: LowerRow {
            seed,
            n,
            delta,
            phase1_rounds: phase1,
            x111_over_n: x111,
            xi: xi(),
            completion_round: completion,
            completion_over_n: completion.map(|t| t as f64 / n as f64),
            predicted_completion_over_n: min_degree_baseline() + eps1(delta)?,
            non_greedy_moves: f.non_greedy_moves(),
            forced_moves: f.forced_moves(),
        },
        trajectory: m.problematic_count_trajectory,
    })
}

pub fn simulate_lower_many(
    n: usize,
    delta: f64,
    seeds: &[u64],
    sample_every: Option<u64>,
) -> anyhow::Result<Vec<LowerRun>> {
    seeds
        .par_iter()
        .map(|&s| simulate_lower(n, delta, s, sample_every))
        .collect()
}

/// Multi-start search with starts spread over the worker pool. A warm
/// start, when given, is solved as an extra start after the random ones.
pub fn verify_p(
    cfg: &OptimizerConfig,
    warm: Option<&PartitionVector>,
) -> anyhow::Result<MultistartReport> {
    cfg.validate()?;
    let mut starts = (0..cfg.n_starts)
        .into_par_iter()
        .map(|i| run_start(cfg, i))
        .collect::<Result<Vec<LocalResult>, _>>()?;
    if let Some(p) = warm {
        starts.push(local_solve(cfg, p, cfg.n_starts)?);
    }
    Ok(summarize(cfg, starts)?)
}

/// Reads a point either as JSON (a `PartitionVector` or a bare array) or
/// as whitespace-separated numbers in variable order.
pub fn load_point(text: &str) -> anyhow::Result<PartitionVector> {
    let t = text.trim_start();
    if t.starts_with('{') {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wrapped {
            Point(PartitionVector),
            Report { best_point: PartitionVector },
        }
        return Ok(match serde_json::from_str::<Wrapped>(t)? {
            Wrapped::Point(p) | Wrapped::Report { best_point: p } => p,
        });
    }
    let values: Vec<f64> = if t.starts_with('[') {
        serde_json::from_str(t)?
    } else {
        t.split_whitespace()
            .map(|w| {
                w.parse::<f64>()
                    .with_context(|| format!("bad number {w:?}"))
            })
            .collect::<anyhow::Result<_>>()?
    };
    Ok(PartitionVector::from_slice(&values)?)
}

/// Exact oracles on one small graph; each is `None` when the graph exceeds
/// its size limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphOracleReport {
    pub n: usize,
    pub edges: usize,
    pub kappa: Option<usize>,
    pub tutte_berge: Option<TBCertificate>,
    pub kappa_equals_tutte_berge: Option<bool>,
    pub short_cycles: Option<u64>,
    pub cycle_cap: usize,
    pub cyclic_subsets: Option<u64>,
    pub cyclic_proxy: Option<CyclicProxy>,
}

pub fn graph_oracles(
    g: &SimpleGraph,
    cycle_cap: Option<usize>,
) -> anyhow::Result<GraphOracleReport> {
    let n = g.vertex_count();
    let kappa = (g.edge_count() <= KAPPA_EDGE_LIMIT)
        .then(|| kappa_bruteforce(g))
        .transpose()?;
    let tutte_berge = (n <= TUTTE_BERGE_VERTEX_LIMIT)
        .then(|| tutte_berge_min(g))
        .transpose()?;
    let cap = cycle_cap.unwrap_or(n.min(CYCLE_LENGTH_LIMIT));
    let short_cycles = (cap <= CYCLE_LENGTH_LIMIT)
        .then(|| short_cycle_census(g, cap))
        .transpose()?;
    let cyclic_subsets = (n <= CYCLIC_SUBSET_VERTEX_LIMIT)
        .then(|| cyclic_subset_count(g, n))
        .transpose()?;
    let proxy = (n >= 2).then(|| cyclic_proxy(g, cycle_cap)).transpose()?;
    Ok(GraphOracleReport {
        n,
        edges: g.edge_count(),
        kappa_equals_tutte_berge: match (&kappa, &tutte_berge) {
            (Some(k), Some(c)) => Some(*k == c.value),
            _ => None,
        },
        kappa,
        tutte_berge,
        short_cycles,
        cycle_cap: cap,
        cyclic_subsets,
        cyclic_proxy: proxy,
    })
}

/// Random graph with `2..=max_n` vertices and at most `max_edges` edges.
pub fn random_small_graph<R: Rng>(rng: &mut R, max_n: usize, max_edges: usize) -> SimpleGraph {
    let n = rng.gen_range(2..=max_n.max(2));
    let pairs: Vec<(Vertex, Vertex)> = (0..n as Vertex)
        .flat_map(|a| (a + 1..n as Vertex).map(move |b| (a, b)))
        .collect();
    let m = rng.gen_range(0..=max_edges.min(pairs.len()));
    let picked = rand::seq::index::sample(rng, pairs.len(), m);
    let edges: Vec<_> = picked.iter().map(|i| pairs[i]).collect();
    SimpleGraph::from_edges(n, &edges).expect("endpoints are in range")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleMismatch {
    pub index: usize,
    pub edges: Vec<(u64, u64)>,
    pub kappa: usize,
    pub tutte_berge: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleBatchReport {
    pub count: usize,
    pub seed: u64,
    pub max_n: usize,
    pub max_edges: usize,
    pub checked: usize,
    pub mismatches: Vec<OracleMismatch>,
}

/// Compares brute-force `κ` with the Tutte-Berge minimum on `count` random
/// graphs; graph `i` is drawn from stream `i` of `seed`.
pub fn oracle_batch(
    count: usize,
    seed: u64,
    max_n: usize,
    max_edges: usize,
) -> anyhow::Result<OracleBatchReport> {
    if max_n > TUTTE_BERGE_VERTEX_LIMIT || max_edges > KAPPA_EDGE_LIMIT {
        anyhow::bail!(
            "random graphs are limited to {TUTTE_BERGE_VERTEX_LIMIT} vertices and {KAPPA_EDGE_LIMIT} edges"
        );
    }
    let results = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let g = random_small_graph(&mut r, max_n, max_edges);
            let k = kappa_bruteforce(&g)?;
            let tb = tutte_berge_min(&g)?.value;
            Ok((k != tb).then(|| OracleMismatch {
                index: i,
                edges: g
                    .edge_list()
                    .iter()
                    .map(|&(a, b)| (a as u64 + 1, b as u64 + 1))
                    .collect(),
                kappa: k,
                tutte_berge: tb,
            }))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(OracleBatchReport {
        count,
        seed,
        max_n,
        max_edges,
        checked: results.len(),
        mismatches: results.into_iter().flatten().collect(),
    })
}
