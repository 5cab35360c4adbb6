//! Degree-greedy players used by the lower-bound argument.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{Decision, RunMetrics, Strategy};
use crate::error::{Error, Result};
use crate::graph::{EdgeColor, EdgeRecord, ProcessState, Vertex};

/// Vertices bucketed by their degree in `Ĝ`.
#[derive(Clone, Debug)]
struct DegreeBuckets {
    buckets: Vec<BTreeSet<Vertex>>,
    deg: Vec<u32>,
}

impl DegreeBuckets {
    fn new(state: &ProcessState) -> Self {
        let deg = state.degrees().to_vec();
        let top = deg.iter().copied().max().unwrap_or(0) as usize;
        let mut buckets = vec![BTreeSet::new(); top + 1];
        for (v, &d) in deg.iter().enumerate() {
            buckets[d as usize].insert(v as Vertex);
        }
        DegreeBuckets { buckets, deg }
    }

    fn bump(&mut self, v: Vertex) {
        let d = self.deg[v as usize] as usize;
        self.buckets[d].remove(&v);
        if self.buckets.len() == d + 1 {
            self.buckets.push(BTreeSet::new());
        }
        self.buckets[d + 1].insert(v);
        self.deg[v as usize] += 1;
    }

    fn observe(&mut self, rec: &EdgeRecord) {
        if !rec.discarded {
            self.bump(rec.head);
            self.bump(rec.tail);
        }
    }

    /// Lowest-id vertex in the first non-empty bucket at degree `from` or
    /// above.
    fn lowest_from(&self, from: usize) -> Option<Vertex> {
        self.buckets
            .iter()
            .skip(from)
            .find_map(|b| b.first().copied())
    }

    fn count(&self, d: usize) -> usize {
        self.buckets.get(d).map_or(0, BTreeSet::len)
    }
}

/// Plays a degree-0 vertex if one exists, else a degree-1 vertex, else a
/// minimum-degree vertex; ties go to the lowest id.
#[derive(Clone, Debug)]
pub struct Greedy {
    buckets: DegreeBuckets,
    completion: Option<u64>,
}

impl Greedy {
    pub fn new(state: &ProcessState) -> Self {
        Greedy {
            buckets: DegreeBuckets::new(state),
            completion: None,
        }
    }

    /// Round at which `Ĝ` first had minimum degree 2.
    pub fn completion(&self) -> Option<u64> {
        self.completion
    }

    pub fn degree_count(&self, d: usize) -> usize {
        self.buckets.count(d)
    }
}

impl Strategy for Greedy {
    fn decide(&mut self, _state: &ProcessState, _u: Vertex) -> Result<Decision> {
        let v = self
            .buckets
            .lowest_from(0)
            .ok_or_else(|| Error::state("empty vertex set"))?;
        Ok(Decision {
            v,
            color: EdgeColor::Uncolored,
        })
    }

    fn after_round(&mut self, state: &mut ProcessState, rec: &EdgeRecord) -> Result<()> {
        self.buckets.observe(rec);
        if self.completion.is_none() && self.buckets.count(0) + self.buckets.count(1) == 0 {
            self.completion = Some(state.t());
        }
        Ok(())
    }

    fn is_finished(&self, _state: &ProcessState) -> bool {
        self.completion.is_some()
    }

    fn report(&self, _state: &ProcessState, metrics: &mut RunMetrics) {
        metrics.tau = self.completion.into_iter().collect();
    }
}

/// Number of rounds in the first phase, `⌊n ln 2⌋`.
pub fn first_phase_len(n: usize) -> u64 {
    libm::floor(n as f64 * core::f64::consts::LN_2) as u64
}

/// A member of `F_δ`: greedy for the first `(1-δ) n ln 2` rounds, then
/// non-greedy until the first phase ends, then greedy again. Non-greedy
/// moves target the lowest-id degree-1 vertex, else the lowest-id
/// non-isolated vertex of smallest degree. Before any vertex has a
/// neighbour the lowest-id isolated vertex is played and counted as forced.
#[derive(Clone, Debug)]
pub struct FDelta {
    buckets: DegreeBuckets,
    delta: f64,
    greedy_until: u64,
    phase_end: u64,
    non_greedy: u64,
    forced: u64,
    completion: Option<u64>,
}

impl FDelta {
    pub fn new(state: &ProcessState, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::domain("delta must lie in [0, 1]"));
        }
        let phase_end = first_phase_len(state.n());
        let greedy_until =
            libm::floor((1.0 - delta) * state.n() as f64 * core::f64::consts::LN_2) as u64;
        Ok(FDelta {
            buckets: DegreeBuckets::new(state),
            delta,
            greedy_until: greedy_until.min(phase_end),
            phase_end,
            non_greedy: 0,
            forced: 0,
            completion: None,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Non-greedy moves played so far.
    pub fn non_greedy_moves(&self) -> u64 {
        self.non_greedy
    }

    /// Rounds of the non-greedy window in which no non-isolated vertex
    /// existed.
    pub fn forced_moves(&self) -> u64 {
        self.forced
    }

    pub fn completion(&self) -> Option<u64> {
        self.completion
    }
}

impl Strategy for FDelta {
    fn decide(&mut self, state: &ProcessState, _u: Vertex) -> Result<Decision> {
        let t = state.t() + 1;
        let v = if t > self.greedy_until && t <= self.phase_end {
            match self.buckets.lowest_from(1) {
                Some(v) => {
                    self.non_greedy += 1;
                    v
                }
                None => {
                    self.forced += 1;
                    self.buckets
                        .lowest_from(0)
                        .ok_or_else(|| Error::state("empty vertex set"))?
                }
            }
        } else {
            self.buckets
                .lowest_from(0)
                .ok_or_else(|| Error::state("empty vertex set"))?
        };
        Ok(Decision {
            v,
            color: EdgeColor::Uncolored,
        })
    }

    fn after_round(&mut self, state: &mut ProcessState, rec: &EdgeRecord) -> Result<()> {
        self.buckets.observe(rec);
        if self.completion.is_none() && self.buckets.count(0) + self.buckets.count(1) == 0 {
            self.completion = Some(state.t());
        }
        Ok(())
    }

    fn is_finished(&self, _state: &ProcessState) -> bool {
        self.completion.is_some()
    }

    fn report(&self, _state: &ProcessState, metrics: &mut RunMetrics) {
        metrics.tau = self.completion.into_iter().collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_rounds, run_to_completion, RunOptions};
    use crate::lower_bound::types::{classify_definitional, TypeTracker};

    #[test]
    fn greedy_picks_lowest_isolated_then_minimum() {
        let mut st = ProcessState::new(5, 1).unwrap();
        let mut g = Greedy::new(&st);
        assert_eq!(g.decide(&st, 3).unwrap().v, 0);
        for (h, t) in [(1, 0), (3, 2), (0, 4), (2, 1), (4, 3), (2, 0), (1, 4)] {
            let rec = st.push_edge(h, t, EdgeColor::Uncolored).unwrap();
            g.after_round(&mut st, &rec).unwrap();
        }
        assert!(st.min_degree() >= 2);
        assert!(g.is_finished(&st));
        // Degrees are now 0:3, 1:3, 2:3, 3:2, 4:3.
        assert_eq!(g.decide(&st, 0).unwrap().v, 3);
    }

    #[test]
    fn greedy_prefers_degree_one_over_higher() {
        let mut st = ProcessState::new(4, 1).unwrap();
        let mut g = Greedy::new(&st);
        for (h, t) in [(1, 0), (2, 0), (3, 2)] {
            let rec = st.push_edge(h, t, EdgeColor::Uncolored).unwrap();
            g.after_round(&mut st, &rec).unwrap();
        }
        // Degrees 0:2, 1:1, 2:2, 3:1.
        assert_eq!(g.decide(&st, 0).unwrap().v, 1);
    }

    #[test]
    fn f_zero_matches_greedy() {
        let n = 2000;
        let mut a = ProcessState::new(n, 7).unwrap();
        let mut b = ProcessState::new(n, 7).unwrap();
        let mut g = Greedy::new(&a);
        let mut f = FDelta::new(&b, 0.0).unwrap();
        let rounds = first_phase_len(n) + 200;
        run_rounds(&mut a, &mut g, rounds, &RunOptions::default());
        run_rounds(&mut b, &mut f, rounds, &RunOptions::default());
        assert_eq!(a.edges(), b.edges());
        assert_eq!(f.non_greedy_moves(), 0);
    }

    #[test]
    fn f_one_is_non_greedy_in_phase_one() {
        let n = 500;
        let mut st = ProcessState::new(n, 3).unwrap();
        let mut f = FDelta::new(&st, 1.0).unwrap();
        let mut isolated_picks = 0;
        for _ in 0..first_phase_len(n) {
            let u = st.draw_head();
            let d = f.decide(&st, u).unwrap();
            if st.deg(d.v) == 0 {
                isolated_picks += 1;
            }
            let rec = st.add_round_edge(d.v, d.color).unwrap();
            f.after_round(&mut st, &rec).unwrap();
        }
        assert_eq!(isolated_picks, f.forced_moves());
        assert_eq!(f.non_greedy_moves() + f.forced_moves(), first_phase_len(n));
        assert!(f.forced_moves() <= 2);
        assert!(FDelta::new(&st, 1.5).is_err());
    }

    #[test]
    fn greedy_completion_near_baseline() {
        let n = 200_000;
        let mut st = ProcessState::new(n, 5).unwrap();
        let mut g = Greedy::new(&st);
        let m = run_to_completion(&mut st, &mut g, &RunOptions::default());
        assert!(m.success);
        let x = g.completion().unwrap() as f64 / n as f64;
        let base = crate::lower_bound::closed_form::min_degree_baseline();
        assert!((x - base).abs() < 0.01, "{x} vs {base}");
    }

    #[test]
    fn tracker_agrees_with_definition_under_greedy() {
        let n = 40;
        for seed in 0..20 {
            let mut st = ProcessState::new(n, seed).unwrap();
            let mut g = Greedy::new(&st);
            let mut tr = TypeTracker::new(n);
            let mut edges = Vec::new();
            for _ in 0..3 * n {
                let u = st.draw_head();
                let d = g.decide(&st, u).unwrap();
                let rec = st.add_round_edge(d.v, d.color).unwrap();
                g.after_round(&mut st, &rec).unwrap();
                tr.observe(&rec);
                edges.push((rec.tail, rec.head));
                let def = classify_definitional(n, &edges);
                for v in 0..n {
                    assert_eq!(tr.class(v as Vertex), def[v]);
                }
            }
        }
    }
}
