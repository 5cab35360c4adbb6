//! The upper-bound player: four construction phases followed by the
//! Hamilton-cycle completion.

pub mod completion;
pub mod four_phase;
pub mod matching;
pub mod rotation;

use alloc::vec::Vec;

use crate::engine::{Decision, RunMetrics, Strategy};
use crate::error::Result;
use crate::graph::{EdgeRecord, ProcessState, Vertex};
use crate::rng::StreamRng;

pub use completion::{verify_hamilton_cycle, Completion, PathSystem, RoundAction};
pub use four_phase::{classify_green, FourPhase, FourPhaseConfig, GreenClassification, Phase};
pub use matching::{build_two_matching, Component, TwoMatching};
pub use rotation::{end_set, posa_rotate, EndSearch, Visit};

/// Construction phases, then completion to a verified Hamilton cycle.
#[derive(Clone, Debug)]
pub struct UpperBoundStrategy {
    build: FourPhase,
    completion: Option<Completion>,
    matching_components: Option<usize>,
    finished_at: Option<u64>,
}

impl UpperBoundStrategy {
    pub fn new(n: usize, config: FourPhaseConfig, rng: StreamRng) -> Result<Self> {
        Ok(UpperBoundStrategy {
            build: FourPhase::new(n, config, rng)?,
            completion: None,
            matching_components: None,
            finished_at: None,
        })
    }

    pub fn construction(&self) -> &FourPhase {
        &self.build
    }

    pub fn completion(&self) -> Option<&Completion> {
        self.completion.as_ref()
    }

    /// The Hamilton cycle, once found.
    pub fn cycle(&self) -> Option<&[Vertex]> {
        self.completion.as_ref().and_then(|c| c.system().cycle())
    }

    fn start_completion(&mut self, state: &ProcessState) {
        let f = build_two_matching(state);
        self.matching_components = Some(f.component_count());
        let c = Completion::start(state, f);
        if c.system().is_closed() {
            self.finished_at = Some(state.t());
        }
        self.completion = Some(c);
    }
}

impl Strategy for UpperBoundStrategy {
    fn decide(&mut self, state: &ProcessState, u: Vertex) -> Result<Decision> {
        match self.completion.as_mut() {
            Some(c) => c.decide(state, u),
            None => self.build.decide(state, u),
        }
    }

    fn after_round(&mut self, state: &mut ProcessState, rec: &EdgeRecord) -> Result<()> {
        if let Some(c) = self.completion.as_mut() {
            c.after_round(state, rec)?;
            if c.system().is_closed() {
                self.finished_at = Some(state.t());
            }
            return Ok(());
        }
        self.build.after_round(state, rec)?;
        if self.build.phase() == Phase::Complete {
            self.start_completion(state);
        }
        Ok(())
    }

    fn is_finished(&self, _state: &ProcessState) -> bool {
        self.finished_at.is_some()
    }

    fn report(&self, state: &ProcessState, m: &mut RunMetrics) {
        self.build.report(state, m);
        m.matching_components = self.matching_components;
        if let Some(c) = &self.completion {
            c.report(state, m);
            let tau4 = *self.build.tau().last().unwrap_or(&0);
            let end = self.finished_at.unwrap_or(state.t());
            m.completion_rounds = end - tau4;
            if let Some(t) = self.finished_at {
                m.tau.push(t);
            }
        }
    }
}

/// Builds the strategy for replicate `index` of `master`: process stream and
/// strategy stream are derived independently.
pub fn upper_bound_replicate(
    n: usize,
    config: FourPhaseConfig,
    master: u64,
    index: u64,
) -> Result<(ProcessState, UpperBoundStrategy)> {
    let state = ProcessState::for_replicate(n, master, index)?;
    let strategy = UpperBoundStrategy::new(n, config, crate::rng::strategy_stream(master, index))?;
    Ok((state, strategy))
}

/// Vertices of `v` listed with their 1-based labels.
pub fn one_based(v: &[Vertex]) -> Vec<u64> {
    v.iter().map(|&x| x as u64 + 1).collect()
}
