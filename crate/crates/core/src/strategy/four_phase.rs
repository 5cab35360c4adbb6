//! The four construction phases of the upper-bound player.
//!
//! 1. `2n` sweep rounds `v_t = (t - 1) mod n + 1` (blue, later partly green).
//! 2. Two out-edges from every vertex of in-degree 0 and one from every
//!    vertex of in-degree 1 at `τ₁` (red).
//! 3. `⌊c n⌋` rounds with `v_t` uniform on `[n] ∖ {u_t}` (yellow).
//! 4. Out-edges from each deficit vertex (simple degree < 4 at `τ₃`) until
//!    its simple degree reaches 4 (golden).

use alloc::vec::Vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{Decision, RunMetrics, Strategy};
use crate::error::{Error, Result};
use crate::graph::{EdgeColor, EdgeRecord, ProcessState, Vertex};
use crate::rng::StreamRng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Phase {
    P1,
    P2,
    P3,
    P4,
    Complete,
}

/// Vertex classes at `τ₁` and the rounds whose edge is green.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreenClassification {
    pub v0: Vec<Vertex>,
    pub v1: Vec<Vertex>,
    /// Rounds (1-based) whose head lies in `V₀ ∪ V₁`.
    pub green_rounds: Vec<u64>,
}

/// Splits the first-phase edges into green and blue from the in-degrees of
/// `D_{2n}`. Requires `t = 2n`.
pub fn classify_green(state: &ProcessState) -> Result<GreenClassification> {
    let n = state.n();
    if state.t() != 2 * n as u64 {
        return Err(Error::state("green classification is defined at t = 2n"));
    }
    let mut v0 = Vec::new();
    let mut v1 = Vec::new();
    for v in 0..n as Vertex {
        match state.indeg(v) {
            0 => v0.push(v),
            1 => v1.push(v),
            _ => {}
        }
    }
    let green_rounds = state
        .edges()
        .iter()
        .filter(|e| state.indeg(e.head) <= 1)
        .map(|e| e.round)
        .collect();
    Ok(GreenClassification {
        v0,
        v1,
        green_rounds,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourPhaseConfig {
    /// Fraction `c`: phase 3 lasts `⌊c n⌋` rounds.
    pub yellow_budget: f64,
}

impl Default for FourPhaseConfig {
    fn default() -> Self {
        FourPhaseConfig {
            yellow_budget: 0.07,
        }
    }
}

/// Phase bookkeeping of the construction.
#[derive(Clone, Debug)]
pub struct FourPhase {
    n: usize,
    config: FourPhaseConfig,
    phase: Phase,
    p2_queue: Vec<Vertex>,
    p2_next: usize,
    yellow_total: u64,
    yellow_done: u64,
    deficit: Vec<Vertex>,
    deficit_next: usize,
    tau: Vec<u64>,
    v0_count: usize,
    v1_count: usize,
    green_count: usize,
    rng: StreamRng,
}

impl FourPhase {
    /// `rng` is the strategy-local stream used for the phase-3 choices.
    pub fn new(n: usize, config: FourPhaseConfig, rng: StreamRng) -> Result<Self> {
        if !(0.0..=1.0).contains(&config.yellow_budget) {
            return Err(Error::domain("yellow budget must lie in [0, 1]"));
        }
        Ok(FourPhase {
            n,
            config,
            phase: Phase::P1,
            p2_queue: Vec::new(),
            p2_next: 0,
            yellow_total: libm::floor(config.yellow_budget * n as f64) as u64,
            yellow_done: 0,
            deficit: Vec::new(),
            deficit_next: 0,
            tau: Vec::new(),
            v0_count: 0,
            v1_count: 0,
            green_count: 0,
            rng,
        })
    }

    pub fn config(&self) -> FourPhaseConfig {
        self.config
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Last rounds of the finished phases.
    pub fn tau(&self) -> &[u64] {
        &self.tau
    }

    /// Vertices of simple degree below 4 at `τ₃`, in service order.
    pub fn deficit_vertices(&self) -> &[Vertex] {
        &self.deficit
    }

    /// Remaining phase-2 demands, in service order.
    pub fn p2_pending(&self) -> &[Vertex] {
        &self.p2_queue[self.p2_next..]
    }

    pub fn v0_count(&self) -> usize {
        self.v0_count
    }

    pub fn v1_count(&self) -> usize {
        self.v1_count
    }

    pub fn green_count(&self) -> usize {
        self.green_count
    }

    fn close_phase(&mut self, t: u64) {
        self.tau.push(t);
        self.phase = match self.phase {
            Phase::P1 => Phase::P2,
            Phase::P2 => Phase::P3,
            Phase::P3 => Phase::P4,
            Phase::P4 | Phase::Complete => Phase::Complete,
        };
    }

    /// Advances through every phase whose work is already done.
    fn settle(&mut self, state: &mut ProcessState) -> Result<()> {
        let t = state.t();
        loop {
            match self.phase {
                Phase::P1 if t == 2 * self.n as u64 => {
                    let cls = classify_green(state)?;
                    for &r in &cls.green_rounds {
                        state.recolor(r, EdgeColor::Green)?;
                    }
                    self.v0_count = cls.v0.len();
                    self.v1_count = cls.v1.len();
                    self.green_count = cls.green_rounds.len();
                    self.p2_queue = cls
                        .v0
                        .iter()
                        .flat_map(|&v| [v, v])
                        .chain(cls.v1.iter().copied())
                        .collect();
                    self.close_phase(t);
                }
                Phase::P2 if self.p2_next == self.p2_queue.len() => {
                    self.close_phase(t);
                }
                Phase::P3 if self.yellow_done == self.yellow_total => {
                    self.deficit = (0..self.n as Vertex)
                        .filter(|&v| state.deg(v) < 4)
                        .collect();
                    self.close_phase(t);
                }
                Phase::P4 => {
                    while self.deficit_next < self.deficit.len()
                        && state.deg(self.deficit[self.deficit_next]) >= 4
                    {
                        self.deficit_next += 1;
                    }
                    if self.deficit_next < self.deficit.len() {
                        return Ok(());
                    }
                    self.close_phase(t);
                }
                _ => return Ok(()),
            }
        }
    }
}

impl Strategy for FourPhase {
    fn decide(&mut self, state: &ProcessState, u: Vertex) -> Result<Decision> {
        let n = self.n as Vertex;
        match self.phase {
            Phase::P1 => Ok(Decision {
                v: (state.t() % self.n as u64) as Vertex,
                color: EdgeColor::Blue,
            }),
            Phase::P2 => Ok(Decision {
                v: self.p2_queue[self.p2_next],
                color: EdgeColor::Red,
            }),
            Phase::P3 => {
                let r = self.rng.gen_range(0..n - 1);
                let v = if r >= u { r + 1 } else { r };
                Ok(Decision {
                    v,
                    color: EdgeColor::Yellow,
                })
            }
            Phase::P4 => Ok(Decision {
                v: self.deficit[self.deficit_next],
                color: EdgeColor::Golden,
            }),
            Phase::Complete => Err(Error::state("construction phases are over")),
        }
    }

    fn after_round(&mut self, state: &mut ProcessState, _rec: &EdgeRecord) -> Result<()> {
        match self.phase {
            Phase::P2 => self.p2_next += 1,
            Phase::P3 => self.yellow_done += 1,
            _ => {}
        }
        self.settle(state)
    }

    fn is_finished(&self, _state: &ProcessState) -> bool {
        self.phase == Phase::Complete
    }

    fn report(&self, _state: &ProcessState, m: &mut RunMetrics) {
        m.tau = self.tau.clone();
        if !self.tau.is_empty() {
            m.v0_count = Some(self.v0_count);
            m.v1_count = Some(self.v1_count);
            m.green_count = Some(self.green_count);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, run_to_completion, RunOptions};
    use crate::rng;

    fn fresh(n: usize, seed: u64) -> (ProcessState, FourPhase) {
        let st = ProcessState::for_replicate(n, seed, 0).unwrap();
        let fp =
            FourPhase::new(n, FourPhaseConfig::default(), rng::strategy_stream(seed, 0)).unwrap();
        (st, fp)
    }

    #[test]
    fn sweep_order_in_phase_one() {
        let (mut st, mut fp) = fresh(5, 1);
        let mut seen = Vec::new();
        for _ in 0..7 {
            let u = st.draw_head();
            let d = fp.decide(&st, u).unwrap();
            seen.push(d.v);
            let rec = st.add_round_edge(d.v, d.color).unwrap();
            fp.after_round(&mut st, &rec).unwrap();
        }
        assert_eq!(seen, [0, 1, 2, 3, 4, 0, 1]);
    }

    #[test]
    fn phase_two_queue_order() {
        // Build D_{2n} by hand: in-degree 0 for vertex 3, in-degree 1 for 6.
        let n = 8;
        let mut st = ProcessState::new(n, 0).unwrap();
        let mut fp = FourPhase::new(n, FourPhaseConfig::default(), rng::stream(0, 1)).unwrap();
        let heads = [0, 1, 2, 4, 5, 6, 7, 0, 1, 2, 4, 5, 7, 0, 1, 2];
        for (t, &h) in heads.iter().enumerate() {
            let rec = st.push_edge(h, (t % n) as Vertex, EdgeColor::Blue).unwrap();
            fp.after_round(&mut st, &rec).unwrap();
        }
        assert_eq!(fp.phase(), Phase::P2);
        assert_eq!(fp.p2_pending(), &[3, 3, 6]);
        assert_eq!(fp.green_count(), 1);
        assert_eq!(st.edges()[5].color, EdgeColor::Green);
    }

    #[test]
    fn golden_rounds_repeat_on_one_vertex() {
        let n = 300;
        let (mut st, mut fp) = fresh(n, 17);
        run(
            &mut st,
            &mut fp,
            |_, f| f.phase() == Phase::P4,
            &RunOptions::default(),
        );
        let deficit = fp.deficit_vertices().to_vec();
        run_to_completion(&mut st, &mut fp, &RunOptions::default());
        let golden: Vec<_> = st
            .edges()
            .iter()
            .filter(|e| e.color == EdgeColor::Golden)
            .collect();
        // golden tails are served in id order and each stops once degree 4 is reached
        let mut last = 0;
        for e in &golden {
            assert!(deficit.contains(&e.tail));
            assert!(e.tail >= last);
            last = e.tail;
        }
        assert!(st.min_degree() >= 4);
    }

    #[test]
    fn phase_boundaries() {
        let n = 2000;
        let (mut st, mut fp) = fresh(n, 3);
        let m = run_to_completion(&mut st, &mut fp, &RunOptions::default());
        assert!(m.success);
        assert_eq!(m.tau.len(), 4);
        assert_eq!(m.tau[0], 2 * n as u64);
        let v0 = m.v0_count.unwrap();
        let v1 = m.v1_count.unwrap();
        assert_eq!(m.tau[1] - m.tau[0], (2 * v0 + v1) as u64);
        assert_eq!(m.tau[2] - m.tau[1], 140);
        assert!(m.tau.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(m.green_count, Some(v1));
        assert!(st.min_degree() >= 4);
        let colors = |c| st.edges().iter().filter(|e| e.color == c).count();
        assert_eq!(colors(EdgeColor::Green) + colors(EdgeColor::Blue), 2 * n);
        assert_eq!(colors(EdgeColor::Red), 2 * v0 + v1);
        assert_eq!(colors(EdgeColor::Yellow), 140);
        // phase-3 tails never equal their heads
        assert!(st
            .edges()
            .iter()
            .filter(|e| e.color == EdgeColor::Yellow)
            .all(|e| e.tail != e.head));
    }

    #[test]
    fn tiny_instance_recount() {
        let n = 3;
        let (mut st, mut fp) = fresh(n, 11);
        run(
            &mut st,
            &mut fp,
            |s, _| s.t() == 2 * n as u64,
            &RunOptions::default(),
        );
        let cls = classify_green(&st).unwrap();
        let mut indeg = [0usize; 3];
        for e in st.edges() {
            indeg[e.head as usize] += 1;
        }
        let v0: Vec<Vertex> = (0..3).filter(|&v| indeg[v as usize] == 0).collect();
        let v1: Vec<Vertex> = (0..3).filter(|&v| indeg[v as usize] == 1).collect();
        assert_eq!(cls.v0, v0);
        assert_eq!(cls.v1, v1);
        let green: usize = st
            .edges()
            .iter()
            .filter(|e| indeg[e.head as usize] <= 1)
            .count();
        assert_eq!(cls.green_rounds.len(), green);
    }

    #[test]
    fn crafted_trace_with_empty_in_degree_class() {
        // 2n heads over n vertices: every vertex hit twice, so V₀ = V₁ = ∅
        // and phase 2 is empty; here vertex 0 is hit four times instead.
        let n = 4;
        let mut st = ProcessState::new(n, 0).unwrap();
        for (t, &h) in [0, 0, 0, 0, 1, 1, 2, 2].iter().enumerate() {
            st.push_edge(h, (t % n) as Vertex, EdgeColor::Blue).unwrap();
        }
        let cls = classify_green(&st).unwrap();
        assert_eq!(cls.v0, [3]);
        assert!(cls.v1.is_empty());
        assert!(cls.green_rounds.is_empty());
    }
}
