//! Round driver: draws `u_t`, asks the strategy for `v_t`, records the edge
//! and collects metrics.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{EdgeColor, EdgeRecord, ProcessState, Vertex};
use crate::lower_bound::types::TypeTracker;

/// The player's move for one round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decision {
    pub v: Vertex,
    pub color: EdgeColor,
}

/// A player. `decide` sees the state after round `t - 1` together with the
/// freshly drawn `u_t` and nothing else of the random stream.
pub trait Strategy {
    fn decide(&mut self, state: &ProcessState, u: Vertex) -> Result<Decision>;

    /// Bookkeeping after the round has been recorded; phase transitions and
    /// retroactive recoloring happen here.
    fn after_round(&mut self, _state: &mut ProcessState, _rec: &EdgeRecord) -> Result<()> {
        Ok(())
    }

    /// Whether the strategy has reached its goal.
    fn is_finished(&self, _state: &ProcessState) -> bool {
        false
    }

    /// Copies strategy-specific results into the metrics.
    fn report(&self, _state: &ProcessState, _metrics: &mut RunMetrics) {}
}

impl<S: Strategy + ?Sized> Strategy for &mut S {
    fn decide(&mut self, state: &ProcessState, u: Vertex) -> Result<Decision> {
        (**self).decide(state, u)
    }
    fn after_round(&mut self, state: &mut ProcessState, rec: &EdgeRecord) -> Result<()> {
        (**self).after_round(state, rec)
    }
    fn is_finished(&self, state: &ProcessState) -> bool {
        (**self).is_finished(state)
    }
    fn report(&self, state: &ProcessState, metrics: &mut RunMetrics) {
        (**self).report(state, metrics)
    }
}

/// Summary of one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub n: usize,
    /// Last round of each completed phase, in order.
    pub tau: Vec<u64>,
    pub v0_count: Option<usize>,
    pub v1_count: Option<usize>,
    pub green_count: Option<usize>,
    pub edges_total: u64,
    pub edges_discarded: u64,
    /// Sampled `(t, X111(t) / n)`; the last entry is the final round.
    pub problematic_count_trajectory: Vec<(u64, f64)>,
    /// The stop condition was met within the round cap.
    pub success: bool,
    /// Rounds played after the last construction phase.
    pub completion_rounds: u64,
    /// Components of the initial 2-matching, when one was built.
    pub matching_components: Option<usize>,
    /// Smallest End set seen while waiting for a useful random vertex.
    pub min_end_set: Option<usize>,
    /// Whether the emitted Hamilton cycle passed verification.
    pub hamilton_verified: Option<bool>,
    pub min_degree: u32,
    pub diagnostic: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Maximum rounds played by this call; `None` means `10 n`.
    pub round_cap: Option<u64>,
    /// Sampling period of the problematic-vertex trajectory; `None` means
    /// `⌈n / 1000⌉`.
    pub sample_every: Option<u64>,
    pub track_problematic: bool,
}

/// Plays rounds until `stop` holds or the round cap is hit.
pub fn run<S, F>(
    state: &mut ProcessState,
    strategy: &mut S,
    mut stop: F,
    opts: &RunOptions,
) -> RunMetrics
where
    S: Strategy + ?Sized,
    F: FnMut(&ProcessState, &S) -> bool,
{
    let n = state.n();
    let cap = opts.round_cap.unwrap_or(10 * n as u64);
    let every = opts
        .sample_every
        .unwrap_or((n as u64).div_ceil(1000))
        .max(1);
    let mut tracker = opts.track_problematic.then(|| {
        let mut tr = TypeTracker::new(n);
        for e in state.edges() {
            tr.observe(e);
        }
        tr
    });
    let mut metrics = RunMetrics {
        n,
        ..RunMetrics::default()
    };
    let mut played = 0u64;
    loop {
        if stop(state, strategy) {
            metrics.success = true;
            break;
        }
        if played >= cap {
            metrics.diagnostic = Some(alloc::format!(
                "round cap of {cap} reached at t = {}",
                state.t()
            ));
            break;
        }
        let u = state.draw_head();
        let rec = match strategy
            .decide(state, u)
            .and_then(|d| state.add_round_edge(d.v, d.color))
        {
            Ok(rec) => rec,
            Err(e) => {
                metrics.diagnostic = Some(alloc::format!("{e}"));
                break;
            }
        };
        played += 1;
        if let Some(tr) = tracker.as_mut() {
            tr.observe(&rec);
            if rec.round % every == 0 {
                metrics
                    .problematic_count_trajectory
                    .push((rec.round, tr.problematic() as f64 / n as f64));
            }
        }
        if let Err(e) = strategy.after_round(state, &rec) {
            metrics.diagnostic = Some(alloc::format!("{e}"));
            break;
        }
    }
    if let Some(tr) = tracker.as_ref() {
        let t = state.t();
        if metrics
            .problematic_count_trajectory
            .last()
            .is_none_or(|p| p.0 != t)
        {
            metrics
                .problematic_count_trajectory
                .push((t, tr.problematic() as f64 / n as f64));
        }
    }
    metrics.edges_total = state.t();
    metrics.edges_discarded = state.discarded_count() as u64;
    metrics.min_degree = state.min_degree();
    strategy.report(state, &mut metrics);
    metrics
}

/// Plays until the strategy reports that it is finished.
pub fn run_to_completion<S: Strategy + ?Sized>(
    state: &mut ProcessState,
    strategy: &mut S,
    opts: &RunOptions,
) -> RunMetrics {
    run(state, strategy, |st, s| s.is_finished(st), opts)
}

/// Plays exactly `rounds` rounds (subject to the cap).
pub fn run_rounds<S: Strategy + ?Sized>(
    state: &mut ProcessState,
    strategy: &mut S,
    rounds: u64,
    opts: &RunOptions,
) -> RunMetrics {
    let end = state.t() + rounds;
    run(state, strategy, |st, _| st.t() >= end, opts)
}

/// The non-adaptive sweep `v_t = (t - 1) mod n + 1`, i.e. vertex
/// `(t - 1) mod n` in 0-based ids. After `m n` rounds it yields the m-out graph.
#[derive(Clone, Debug, Default)]
pub struct SweepStrategy;

impl Strategy for SweepStrategy {
    fn decide(&mut self, state: &ProcessState, _u: Vertex) -> Result<Decision> {
        let v = (state.t() % state.n() as u64) as Vertex;
        Ok(Decision {
            v,
            color: EdgeColor::Uncolored,
        })
    }
}

/// Empirical inclusion frequencies of vertex pairs in `Ĝ` at the end of a
/// construction phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeProbabilityReport {
    pub n: usize,
    pub reps: usize,
    pub counts: Vec<u64>,
    /// `max_pair count / reps · n`.
    pub max_freq_times_n: f64,
    /// Pooled `mean count / reps · n` over all sampled pairs.
    pub mean_freq_times_n: f64,
}

/// Runs the four-phase construction `reps` times (replicate streams of
/// `master`) up to the end of `phase` and counts how often each pair is an
/// edge of `Ĝ`.
pub fn measure_edge_probabilities(
    n: usize,
    config: crate::strategy::FourPhaseConfig,
    phase: crate::strategy::Phase,
    pairs: &[(Vertex, Vertex)],
    reps: usize,
    master: u64,
) -> Result<EdgeProbabilityReport> {
    use crate::error::Error;
    use crate::graph::Adjacency;
    use crate::strategy::{FourPhase, Phase};
    if reps < 100 {
        return Err(Error::domain("at least 100 repetitions are required"));
    }
    if phase == Phase::Complete {
        return Err(Error::domain("choose a construction phase"));
    }
    let mut counts = alloc::vec![0u64; pairs.len()];
    for rep in 0..reps as u64 {
        let mut state = ProcessState::for_replicate(n, master, rep)?;
        let mut fp = FourPhase::new(n, config, crate::rng::strategy_stream(master, rep))?;
        let m = run(
            &mut state,
            &mut fp,
            |_, f| f.phase() > phase,
            &RunOptions::default(),
        );
        if !m.success {
            return Err(Error::state(
                "construction did not reach the requested phase",
            ));
        }
        for (c, &(a, b)) in counts.iter_mut().zip(pairs) {
            if state.has_edge(a, b) {
                *c += 1;
            }
        }
    }
    let scale = n as f64 / reps as f64;
    let max = counts.iter().copied().max().unwrap_or(0) as f64 * scale;
    let mean = if pairs.is_empty() {
        0.0
    } else {
        counts.iter().sum::<u64>() as f64 / pairs.len() as f64 * scale
    };
    Ok(EdgeProbabilityReport {
        n,
        reps,
        counts,
        max_freq_times_n: max,
        mean_freq_times_n: mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_zero_plays_nothing() {
        let mut s = ProcessState::new(10, 1).unwrap();
        let m = run(
            &mut s,
            &mut SweepStrategy,
            |_, _| false,
            &RunOptions {
                round_cap: Some(0),
                ..Default::default()
            },
        );
        assert_eq!(m.edges_total, 0);
        assert!(!m.success);
        assert!(m.diagnostic.is_some());
    }

    #[test]
    fn three_out_sweep() {
        let n = 10_000;
        let mut s = ProcessState::new(n, 5).unwrap();
        let m = run_rounds(
            &mut s,
            &mut SweepStrategy,
            3 * n as u64,
            &RunOptions::default(),
        );
        assert!(m.success);
        assert_eq!(m.edges_total, 3 * n as u64);
        assert_eq!(s.edges().len(), 3 * n);
        assert!(s.min_degree() >= 1);
        assert!((0..n as Vertex).all(|v| s.outdeg(v) == 3));
        assert_eq!(s.indegrees().iter().map(|&d| d as u64).sum::<u64>(), s.t());
    }

    #[test]
    fn head_is_drawn_before_decide() {
        struct Peek(Vec<(u64, Vertex)>);
        impl Strategy for Peek {
            fn decide(&mut self, state: &ProcessState, u: Vertex) -> Result<Decision> {
                self.0.push((state.t(), u));
                Ok(Decision {
                    v: 0,
                    color: EdgeColor::Uncolored,
                })
            }
        }
        let mut s = ProcessState::new(6, 3).unwrap();
        let mut p = Peek(Vec::new());
        run_rounds(&mut s, &mut p, 20, &RunOptions::default());
        for (i, e) in s.edges().iter().enumerate() {
            assert_eq!(p.0[i], (i as u64, e.head));
        }
    }

    #[test]
    fn replay_is_bit_identical() {
        let play = || {
            let mut s = ProcessState::for_replicate(50, 9, 4).unwrap();
            run_rounds(&mut s, &mut SweepStrategy, 200, &RunOptions::default());
            s.edges().to_vec()
        };
        assert_eq!(play(), play());
    }
}
