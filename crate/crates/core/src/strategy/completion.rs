//! Turning a 2-matching into a Hamilton cycle.
//!
//! A growing path `P` with fixed anchor `u₁` absorbs the other components
//! of the 2-matching `F`. Whenever some vertex of End (the endpoints
//! reachable by Posá rotations) has a neighbour off `P`, the path is rotated
//! and extended for free. Otherwise a semi-random round is requested with
//! `v_t` a path end or cycle vertex outside `P` (or `u₁` once `P` spans
//! every vertex); if `u_t` lands in End the new edge is used, else the round
//! is ignored.

use alloc::vec;
use alloc::vec::Vec;

use crate::engine::{Decision, RunMetrics, Strategy};
use crate::error::{Error, Result};
use crate::graph::{Adjacency, EdgeColor, EdgeRecord, ProcessState, Vertex, NONE};
use crate::strategy::matching::TwoMatching;
use crate::strategy::rotation::{EndSearch, Visit};

/// What a completion round did.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundAction {
    /// `u_t` was in End and the component of `v_t` joined the path.
    Absorb,
    /// The path spanned every vertex and the new edge closed it.
    Close,
    /// `u_t` was not in End.
    Ignore,
}

/// True iff `cycle` lists every vertex of `g` exactly once and consecutive
/// vertices (cyclically) are adjacent in `g`.
pub fn verify_hamilton_cycle<G: Adjacency + ?Sized>(cycle: &[Vertex], g: &G) -> bool {
    let n = g.vertex_count();
    if cycle.len() != n || n < 3 {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in cycle {
        if v as usize >= n || core::mem::replace(&mut seen[v as usize], true) {
            return false;
        }
    }
    (0..n).all(|i| g.has_edge(cycle[i], cycle[(i + 1) % n]))
}

/// The path, the rest of the 2-matching, and the cached End set.
#[derive(Clone, Debug)]
pub struct PathSystem {
    n: usize,
    path: Vec<Vertex>,
    pos: Vec<Vertex>,
    // matching partners of vertices outside the path
    rest: TwoMatching,
    outside_components: usize,
    search: EndSearch,
    end_cached: bool,
    chosen_v: Vertex,
    cursor: usize,
    cycle: Option<Vec<Vertex>>,
    scratch: Vec<Vertex>,
    free_absorptions: usize,
    round_absorptions: usize,
    min_end: Option<usize>,
}

impl PathSystem {
    /// Starts from the largest component of `f` (a cycle is opened).
    pub fn new(f: TwoMatching) -> Self {
        let n = f.vertex_count();
        let comps = f.components();
        let start = comps
            .iter()
            .enumerate()
            .max_by_key(|(i, c)| (c.vertices.len(), core::cmp::Reverse(*i)))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut ps = PathSystem {
            n,
            path: Vec::with_capacity(n),
            pos: vec![NONE; n],
            rest: f,
            outside_components: comps.len().saturating_sub(1),
            search: EndSearch::new(n),
            end_cached: false,
            chosen_v: NONE,
            cursor: 0,
            cycle: None,
            scratch: Vec::new(),
            free_absorptions: 0,
            round_absorptions: 0,
            min_end: None,
        };
        if let Some(c) = comps.get(start) {
            for &v in &c.vertices {
                ps.detach_from_rest(v);
            }
            for &v in &c.vertices {
                ps.push_path(v);
            }
        }
        ps
    }

    pub fn path(&self) -> &[Vertex] {
        &self.path
    }

    pub fn anchor(&self) -> Vertex {
        self.path[0]
    }

    /// Components of the 2-matching not yet absorbed.
    pub fn outside_components(&self) -> usize {
        self.outside_components
    }

    pub fn spans_all(&self) -> bool {
        self.path.len() == self.n
    }

    /// The Hamilton cycle, once closed.
    pub fn cycle(&self) -> Option<&[Vertex]> {
        self.cycle.as_deref()
    }

    pub fn is_closed(&self) -> bool {
        self.cycle.is_some()
    }

    /// The End set of the current path, when it has been fully computed.
    pub fn end_set(&self) -> Option<&EndSearch> {
        self.end_cached.then_some(&self.search)
    }

    pub fn free_absorptions(&self) -> usize {
        self.free_absorptions
    }

    pub fn round_absorptions(&self) -> usize {
        self.round_absorptions
    }

    /// Smallest fully computed End set seen so far.
    pub fn min_end_set(&self) -> Option<usize> {
        self.min_end
    }

    fn push_path(&mut self, v: Vertex) {
        self.pos[v as usize] = self.path.len() as Vertex;
        self.path.push(v);
    }

    fn detach_from_rest(&mut self, v: Vertex) {
        for w in self.rest.partners(v) {
            if w != NONE {
                self.rest.remove_edge(v, w);
            }
        }
    }

    fn reindex(&mut self) {
        for (i, &v) in self.path.iter().enumerate() {
            self.pos[v as usize] = i as Vertex;
        }
    }

    /// Replaces the path by the rotation witness ending at `x`.
    fn rotate_to(&mut self, x: Vertex) {
        if *self.path.last().unwrap() == x {
            return;
        }
        let mut w = core::mem::take(&mut self.scratch);
        let ok = self.search.witness_into(x, &mut w);
        debug_assert!(ok);
        core::mem::swap(&mut self.path, &mut w);
        self.scratch = w;
        self.reindex();
    }

    /// Appends the component of `y` (off the path) through the edge from the
    /// current endpoint to `y`. A cycle is opened at `y`; a path is split at
    /// `y`, keeping the longer side (ties toward the lower-id end).
    fn absorb(&mut self, y: Vertex) {
        let comp = self.rest.component_of(y);
        let vs = &comp.vertices;
        let idx = vs.iter().position(|&v| v == y).unwrap();
        let take: Vec<Vertex> = if comp.cycle {
            let k = vs.len();
            (0..k).map(|i| vs[(idx + i) % k]).collect()
        } else {
            let left: Vec<Vertex> = vs[..=idx].iter().rev().copied().collect();
            let right: Vec<Vertex> = vs[idx..].to_vec();
            let pick_left = match left.len().cmp(&right.len()) {
                core::cmp::Ordering::Greater => true,
                core::cmp::Ordering::Less => false,
                core::cmp::Ordering::Equal => left.last() <= right.last(),
            };
            if pick_left {
                left
            } else {
                right
            }
        };
        let whole = take.len() == vs.len();
        for &v in &take {
            self.detach_from_rest(v);
        }
        for &v in &take {
            self.push_path(v);
        }
        if whole {
            self.outside_components -= 1;
        }
        self.end_cached = false;
        self.chosen_v = NONE;
    }

    fn close(&mut self) {
        self.cycle = Some(self.path.clone());
        self.end_cached = false;
    }

    /// Applies free extensions until none is left; afterwards the End set of
    /// the path is cached. Returns the number of free absorptions made.
    pub fn extend_freely<G: Adjacency + ?Sized>(&mut self, g: &G) -> usize {
        let mut made = 0;
        while !self.is_closed() {
            let spans = self.spans_all();
            let anchor = self.path[0];
            let pos = &self.pos;
            let mut target = NONE;
            let hit = self.search.explore(&self.path, pos, g, |x| {
                for &y in g.neighbors(x) {
                    if spans {
                        if y == anchor && x != anchor {
                            target = y;
                            return Visit::Stop;
                        }
                    } else if pos[y as usize] == NONE {
                        target = y;
                        return Visit::Stop;
                    }
                }
                Visit::Continue
            });
            match hit {
                Some(x) if spans => {
                    self.rotate_to(x);
                    self.close();
                    return made;
                }
                Some(x) => {
                    self.rotate_to(x);
                    self.absorb(target);
                    made += 1;
                    self.free_absorptions += 1;
                }
                None => {
                    self.end_cached = true;
                    let len = self.search.len();
                    self.min_end = Some(self.min_end.map_or(len, |m| m.min(len)));
                    return made;
                }
            }
        }
        made
    }

    /// The vertex to request in the next semi-random round.
    pub fn choose_v(&mut self) -> Vertex {
        if self.spans_all() {
            return self.path[0];
        }
        if self.chosen_v != NONE {
            return self.chosen_v;
        }
        while self.pos[self.cursor] != NONE {
            self.cursor += 1;
        }
        let w = self.cursor as Vertex;
        let comp = self.rest.component_of(w);
        // first listed vertex is a path end, or any vertex of a cycle
        self.chosen_v = comp.vertices[0];
        self.chosen_v
    }

    /// Uses the round `(u, v)` if `u` is in the cached End set.
    pub fn apply_round<G: Adjacency + ?Sized>(
        &mut self,
        g: &G,
        u: Vertex,
        v: Vertex,
    ) -> Result<RoundAction> {
        if !self.end_cached {
            return Err(Error::state("End set not computed for the current path"));
        }
        if !self.search.contains(u) {
            return Ok(RoundAction::Ignore);
        }
        if !g.has_edge(u, v) {
            return Err(Error::state("round edge missing from the graph"));
        }
        self.rotate_to(u);
        if self.spans_all() {
            if v != self.path[0] {
                return Err(Error::state("closing round must target the anchor"));
            }
            self.close();
            return Ok(RoundAction::Close);
        }
        if self.pos[v as usize] != NONE {
            return Err(Error::state("requested vertex already on the path"));
        }
        self.absorb(v);
        self.round_absorptions += 1;
        self.extend_freely(g);
        Ok(if self.is_closed() {
            RoundAction::Close
        } else {
            RoundAction::Absorb
        })
    }
}

/// Completion phase as a [`Strategy`]: call [`Completion::start`] with the
/// graph at `τ₄` before playing rounds.
#[derive(Clone, Debug)]
pub struct Completion {
    system: PathSystem,
    pending_v: Vertex,
    last_action: Option<RoundAction>,
}

impl Completion {
    pub fn start(state: &ProcessState, f: TwoMatching) -> Self {
        let mut system = PathSystem::new(f);
        system.extend_freely(state);
        Completion {
            system,
            pending_v: NONE,
            last_action: None,
        }
    }

    pub fn system(&self) -> &PathSystem {
        &self.system
    }

    pub fn last_action(&self) -> Option<RoundAction> {
        self.last_action
    }
}

impl Strategy for Completion {
    fn decide(&mut self, _state: &ProcessState, _u: Vertex) -> Result<Decision> {
        if self.system.is_closed() {
            return Err(Error::state("the Hamilton cycle is already closed"));
        }
        let v = self.system.choose_v();
        self.pending_v = v;
        Ok(Decision {
            v,
            color: EdgeColor::Completion,
        })
    }

    fn after_round(&mut self, state: &mut ProcessState, rec: &EdgeRecord) -> Result<()> {
        let action = self.system.apply_round(&*state, rec.head, rec.tail)?;
        self.last_action = Some(action);
        Ok(())
    }

    fn is_finished(&self, _state: &ProcessState) -> bool {
        self.system.is_closed()
    }

    fn report(&self, state: &ProcessState, m: &mut RunMetrics) {
        m.min_end_set = self.system.min_end_set();
        m.hamilton_verified = Some(
            self.system
                .cycle()
                .is_some_and(|c| verify_hamilton_cycle(c, state)),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SimpleGraph;

    #[test]
    fn verify_examples() {
        let g = SimpleGraph::cycle(5);
        assert!(verify_hamilton_cycle(&[0, 1, 2, 3, 4], &g));
        assert!(verify_hamilton_cycle(&[2, 1, 0, 4, 3], &g));
        assert!(!verify_hamilton_cycle(&[0, 1, 2, 3, 3], &g));
        assert!(!verify_hamilton_cycle(&[0, 2, 1, 3, 4], &g));
        assert!(!verify_hamilton_cycle(&[0, 1, 2, 3], &g));
    }

    fn matching_of(n: usize, edges: &[(Vertex, Vertex)]) -> TwoMatching {
        let mut f = TwoMatching::empty(n);
        for &(a, b) in edges {
            assert!(f.add_edge(a, b));
        }
        f
    }

    #[test]
    fn isolated_vertex_absorbed_by_a_round() {
        // path 0-1-2-3 plus isolated 4; only the path edges and a chord.
        let mut st = ProcessState::new(5, 0).unwrap();
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 1)] {
            st.push_edge(a, b, EdgeColor::Blue).unwrap();
        }
        let f = matching_of(5, &[(0, 1), (1, 2), (2, 3)]);
        let mut c = Completion::start(&st, f);
        assert_eq!(c.system().outside_components(), 1);
        let ends = c.system().end_set().unwrap();
        assert!(ends.contains(3));
        // round with u_t = 3 (in End) and v_t = 4
        let v = c.system.choose_v();
        assert_eq!(v, 4);
        let rec = st.push_edge(3, v, EdgeColor::Completion).unwrap();
        c.after_round(&mut st, &rec).unwrap();
        assert_eq!(c.last_action(), Some(RoundAction::Absorb));
        assert!(c.system().spans_all());
        assert_eq!(c.system().outside_components(), 0);
    }

    #[test]
    fn closing_round_emits_a_verified_cycle() {
        let mut st = ProcessState::new(4, 0).unwrap();
        for (a, b) in [(0, 1), (1, 2), (2, 3)] {
            st.push_edge(a, b, EdgeColor::Blue).unwrap();
        }
        let f = matching_of(4, &[(0, 1), (1, 2), (2, 3)]);
        let mut c = Completion::start(&st, f);
        assert!(c.system().spans_all());
        assert_eq!(c.system.choose_v(), c.system().anchor());
        let anchor = c.system().anchor();
        let end = *c.system().path().last().unwrap();
        let rec = st.push_edge(end, anchor, EdgeColor::Completion).unwrap();
        c.after_round(&mut st, &rec).unwrap();
        assert_eq!(c.last_action(), Some(RoundAction::Close));
        assert!(verify_hamilton_cycle(c.system().cycle().unwrap(), &st));
    }

    #[test]
    fn miss_is_ignored() {
        let mut st = ProcessState::new(5, 0).unwrap();
        for (a, b) in [(0, 1), (1, 2), (2, 3)] {
            st.push_edge(a, b, EdgeColor::Blue).unwrap();
        }
        let f = matching_of(5, &[(0, 1), (1, 2), (2, 3)]);
        let mut c = Completion::start(&st, f);
        let v = c.system.choose_v();
        let rec = st.push_edge(1, v, EdgeColor::Completion).unwrap();
        c.after_round(&mut st, &rec).unwrap();
        assert_eq!(c.last_action(), Some(RoundAction::Ignore));
        assert_eq!(c.system().path().len(), 4);
    }

    #[test]
    fn free_absorption_keeps_longer_side() {
        let mut st = ProcessState::new(8, 0).unwrap();
        let edges = [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7), (3, 5)];
        for (a, b) in edges {
            st.push_edge(a, b, EdgeColor::Blue).unwrap();
        }
        let f = matching_of(8, &edges[..6]);
        let c = Completion::start(&st, f);
        // P = 0-1-2-3 (first of two equal components); 3 meets interior 5 of
        // 4-5-6-7: sides 5-4 (2) and 5-6-7 (3), the longer one is taken.
        assert_eq!(c.system().path(), &[0, 1, 2, 3, 5, 6, 7]);
        assert_eq!(c.system().outside_components(), 1);
    }

    #[test]
    fn cycle_component_is_opened() {
        let mut st = ProcessState::new(6, 0).unwrap();
        let edges = [(0, 1), (1, 2), (3, 4), (4, 5), (5, 3), (2, 4)];
        for (a, b) in edges {
            st.push_edge(a, b, EdgeColor::Blue).unwrap();
        }
        let f = matching_of(6, &edges[..5]);
        let c = Completion::start(&st, f);
        let p = c.system().path();
        assert_eq!(p.len(), 6);
        assert!(p.windows(2).all(|w| st.has_edge(w[0], w[1])));
    }
}
