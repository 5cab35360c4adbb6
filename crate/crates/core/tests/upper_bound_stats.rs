use std::collections::HashSet;

use semirandom_core::engine::{measure_edge_probabilities, run, RunOptions};
use semirandom_core::graph::ProcessState;
use semirandom_core::rng::strategy_stream;
use semirandom_core::strategy::{FourPhase, FourPhaseConfig, Phase};

fn construct(n: usize, seed: u64) -> (ProcessState, FourPhase) {
    let mut st = ProcessState::for_replicate(n, 77, seed).unwrap();
    let mut fp = FourPhase::new(n, FourPhaseConfig::default(), strategy_stream(77, seed)).unwrap();
    let m = run(
        &mut st,
        &mut fp,
        |_, f| f.phase() == Phase::Complete,
        &RunOptions::default(),
    );
    assert!(m.success);
    (st, fp)
}

/// Sum over rounds of `P(round t is discarded | history) = (1 + deg(v_t)) / n`,
/// recomputed from the raw trace.
fn discard_compensator(st: &ProcessState) -> f64 {
    let n = st.n();
    let mut deg = vec![0u32; n];
    let mut seen = HashSet::new();
    let mut total = 0.0;
    for e in st.edges() {
        total += (1 + deg[e.tail as usize]) as f64 / n as f64;
        let key = (e.tail.min(e.head), e.tail.max(e.head));
        if e.tail != e.head && seen.insert(key) {
            deg[e.tail as usize] += 1;
            deg[e.head as usize] += 1;
        }
    }
    total
}

#[test]
fn property_e_over_seeds() {
    let n = 100_000;
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..20u64)
            .map(|seed| {
                s.spawn(move || {
                    let (st, fp) = construct(n, seed);
                    (
                        st.property_e_report(fp.deficit_vertices()),
                        discard_compensator(&st),
                    )
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut observed = 0.0;
    let mut expected = 0.0;
    for (r, comp) in &results {
        assert!(r.double_or_loop_disjoint, "{r:?}");
        assert!(r.golden_paths_ok, "{r:?}");
        assert!(r.double_or_loop_count <= 40, "{r:?}");
        observed += r.double_or_loop_count as f64;
        expected += comp;
    }
    // Discards minus their compensator is a martingale with variance at most
    // the compensator itself.
    assert!(
        (observed - expected).abs() <= 4.0 * expected.sqrt(),
        "{observed} vs {expected}"
    );
}

fn binomial_upper_tail(trials: u64, p: f64, k: u64) -> f64 {
    let mut pmf = (1.0 - p).powi(trials as i32);
    let mut below = 0.0;
    for j in 0..k {
        below += pmf;
        pmf *= (trials - j) as f64 / (j + 1) as f64 * p / (1.0 - p);
    }
    1.0 - below
}

#[test]
fn edge_probabilities_at_tau2() {
    let n = 2000;
    let reps = 500;
    let pairs: Vec<(u32, u32)> = (0..1000u32)
        .map(|k| (k, (k * 7 + 13) % n as u32))
        .filter(|(a, b)| a != b)
        .collect();
    let rep = measure_edge_probabilities(n, FourPhaseConfig::default(), Phase::P2, &pairs, reps, 3)
        .unwrap();
    assert!(rep.mean_freq_times_n <= 8.0, "{}", rep.mean_freq_times_n);
    // Per-pair counts under the bound 8/n: the largest count must stay below
    // the Bonferroni-corrected 1e-3 tail.
    let p = 8.0 / n as f64;
    let k = (0..=reps as u64)
        .find(|&k| pairs.len() as f64 * binomial_upper_tail(reps as u64, p, k) <= 1e-3)
        .unwrap();
    assert!(
        *rep.counts.iter().max().unwrap() < k,
        "{:?}",
        rep.counts.iter().max()
    );
}

#[test]
fn binomial_tail_sanity() {
    assert!((binomial_upper_tail(10, 0.5, 0) - 1.0).abs() < 1e-12);
    assert!((binomial_upper_tail(10, 0.5, 10) - 0.5f64.powi(10)).abs() < 1e-12);
    assert!((binomial_upper_tail(2, 0.3, 1) - 0.51).abs() < 1e-12);
}
