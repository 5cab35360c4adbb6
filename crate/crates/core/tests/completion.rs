use semirandom_core::engine::{run_rounds, run_to_completion, RunOptions, SweepStrategy};
use semirandom_core::graph::ProcessState;
use semirandom_core::strategy::{build_two_matching, verify_hamilton_cycle, Completion};

/// Sparse start: the sweep gives every vertex `k` random out-edges, after
/// which the completion has to pay for most absorptions with rounds.
fn complete_from_sweep(n: usize, k: u64, seed: u64) -> (u64, Option<usize>, bool) {
    let mut st = ProcessState::new(n, seed).unwrap();
    run_rounds(
        &mut st,
        &mut SweepStrategy,
        k * n as u64,
        &RunOptions::default(),
    );
    let start = st.t();
    let mut c = Completion::start(&st, build_two_matching(&st));
    let opts = RunOptions {
        round_cap: Some(20 * n as u64),
        ..RunOptions::default()
    };
    let m = run_to_completion(&mut st, &mut c, &opts);
    assert!(m.success, "seed {seed}: {:?}", m.diagnostic);
    let ok = c
        .system()
        .cycle()
        .is_some_and(|cy| verify_hamilton_cycle(cy, &st));
    assert_eq!(m.hamilton_verified, Some(ok));
    (st.t() - start, m.min_end_set, ok)
}

#[test]
fn completion_pays_rounds_on_sparse_graphs() {
    let n = 5000;
    for seed in 0..4 {
        for k in 1..=2 {
            let (rounds, min_end, ok) = complete_from_sweep(n, k, seed);
            assert!(ok);
            assert!(rounds > 0, "k {k}, seed {seed}");
            assert!(min_end.is_some_and(|e| e >= 1));
        }
    }
}

#[test]
fn denser_starts_need_fewer_rounds() {
    let n = 5000;
    let sparse: u64 = (0..3).map(|s| complete_from_sweep(n, 1, s).0).sum();
    let dense: u64 = (0..3).map(|s| complete_from_sweep(n, 3, s).0).sum();
    assert!(dense < sparse, "{dense} vs {sparse}");
}

#[test]
fn pipeline_graphs_complete_without_stalls() {
    use semirandom_core::strategy::{upper_bound_replicate, FourPhaseConfig};
    let n = 10_000;
    for seed in 0..3 {
        let (mut st, mut s) =
            upper_bound_replicate(n, FourPhaseConfig::default(), seed, 0).unwrap();
        let m = run_to_completion(&mut st, &mut s, &RunOptions::default());
        assert_eq!(m.hamilton_verified, Some(true));
        // Every stall would record an End set; none may fall below 0.001 n.
        if let Some(e) = m.min_end_set {
            assert!(e as f64 >= 0.001 * n as f64, "seed {seed}: End set of {e}");
        }
    }
}
