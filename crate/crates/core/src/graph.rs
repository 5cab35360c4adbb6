//! Process state: the multigraph `G_t`, its orientation `D_t` and the simple
//! view `Ĝ_t`, kept consistent round by round.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};

pub type Vertex = u32;

/// Sentinel for "no vertex".
pub const NONE: Vertex = Vertex::MAX;

/// Edge colors. The first five are the colors of the upper-bound strategy;
/// `Completion` marks rounds spent by the Hamilton-cycle completion and
/// `Uncolored` is used by strategies that do not color their edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeColor {
    Blue,
    Green,
    Red,
    Yellow,
    Golden,
    Completion,
    Uncolored,
}

impl EdgeColor {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeColor::Blue => "blue",
            EdgeColor::Green => "green",
            EdgeColor::Red => "red",
            EdgeColor::Yellow => "yellow",
            EdgeColor::Golden => "golden",
            EdgeColor::Completion => "completion",
            EdgeColor::Uncolored => "uncolored",
        }
    }
}

/// One round of the process: the directed edge `tail -> head`, where `head`
/// is the random vertex `u_t` and `tail` the player's choice `v_t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    /// 1-based round index `t`.
    pub round: u64,
    pub tail: Vertex,
    pub head: Vertex,
    pub color: EdgeColor,
    /// A loop, or a copy of an edge already present in `Ĝ`.
    pub discarded: bool,
}

/// Read access to a simple undirected graph.
pub trait Adjacency {
    fn vertex_count(&self) -> usize;
    fn neighbors(&self, v: Vertex) -> &[Vertex];

    fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).len()
    }

    fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        let (x, y) = if self.degree(a) <= self.degree(b) {
            (a, b)
        } else {
            (b, a)
        };
        self.neighbors(x).contains(&y)
    }
}

/// A plain simple graph given by adjacency lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<Vertex>>,
    edges: usize,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        SimpleGraph {
            adj: vec![Vec::new(); n],
            edges: 0,
        }
    }

    /// Builds a simple graph, dropping loops and repeated pairs.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut g = SimpleGraph::empty(n);
        for &(a, b) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(Error::domain("edge endpoint out of range"));
            }
            g.add_edge(a, b);
        }
        Ok(g)
    }

    /// Adds `{a, b}`; returns false for loops and existing edges.
    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> bool {
        if a == b || self.has_edge(a, b) {
            return false;
        }
        self.adj[a as usize].push(b);
        self.adj[b as usize].push(a);
        self.edges += 1;
        true
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// Edges as pairs `(a, b)` with `a < b`, ordered by `a` then insertion.
    pub fn edge_list(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.edges);
        for (a, nb) in self.adj.iter().enumerate() {
            for &b in nb {
                if (a as Vertex) < b {
                    out.push((a as Vertex, b));
                }
            }
        }
        out
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .map(|i| (i as Vertex, ((i + 1) % n) as Vertex))
            .collect();
        Self::from_edges(n, &edges).expect("in range")
    }

    pub fn complete(n: usize) -> Self {
        let mut g = SimpleGraph::empty(n);
        for a in 0..n {
            for b in a + 1..n {
                g.add_edge(a as Vertex, b as Vertex);
            }
        }
        g
    }
}

impl Adjacency for SimpleGraph {
    fn vertex_count(&self) -> usize {
        self.adj.len()
    }
    fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }
}

/// Counts describing the end of the four-phase construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyEReport {
    /// Discarded rounds (loops and repeated pairs) in the whole run.
    pub double_or_loop_count: usize,
    /// Whether the discarded pairs are pairwise vertex-disjoint.
    pub double_or_loop_disjoint: bool,
    pub golden_count: usize,
    /// Golden edges induce vertex-disjoint paths with one or two edges.
    pub golden_paths_ok: bool,
    /// Smallest `Ĝ` distance between two deficit vertices; `None` when there
    /// are fewer than two deficit vertices or they are mutually unreachable.
    pub deficit_pair_min_distance: Option<u32>,
}

/// Mutable state of one run of the process.
#[derive(Clone, Debug)]
pub struct ProcessState {
    n: usize,
    t: u64,
    edges: Vec<EdgeRecord>,
    deg: Vec<u32>,
    indeg: Vec<u32>,
    outdeg: Vec<u32>,
    adj: Vec<Vec<Vertex>>,
    simple_edges: usize,
    rng: StreamRng,
    pending: Option<Vertex>,
}

impl ProcessState {
    /// Empty graph on `n ≥ 3` vertices driven by stream 0 of `seed`.
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        Self::with_rng(n, rng::stream(seed, 0))
    }

    /// Empty graph driven by replicate stream `(master, index)`.
    pub fn for_replicate(n: usize, master: u64, index: u64) -> Result<Self> {
        Self::with_rng(n, rng::stream(master, index))
    }

    pub fn with_rng(n: usize, rng: StreamRng) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain("a Hamilton cycle needs at least 3 vertices"));
        }
        if n >= NONE as usize {
            return Err(Error::domain("vertex count exceeds u32 range"));
        }
        Ok(ProcessState {
            n,
            t: 0,
            edges: Vec::new(),
            deg: vec![0; n],
            indeg: vec![0; n],
            outdeg: vec![0; n],
            adj: vec![Vec::new(); n],
            simple_edges: 0,
            rng,
            pending: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rounds played so far.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn deg(&self, v: Vertex) -> u32 {
        self.deg[v as usize]
    }

    pub fn indeg(&self, v: Vertex) -> u32 {
        self.indeg[v as usize]
    }

    pub fn outdeg(&self, v: Vertex) -> u32 {
        self.outdeg[v as usize]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.deg
    }

    pub fn indegrees(&self) -> &[u32] {
        &self.indeg
    }

    pub fn simple_edge_count(&self) -> usize {
        self.simple_edges
    }

    pub fn discarded_count(&self) -> usize {
        self.edges.len() - self.simple_edges
    }

    pub fn min_degree(&self) -> u32 {
        self.deg.iter().copied().min().unwrap_or(0)
    }

    /// Draws `u_t` for the next round. Drawing twice without playing the
    /// round returns the same vertex.
    pub fn draw_head(&mut self) -> Vertex {
        if let Some(u) = self.pending {
            return u;
        }
        let u = self.rng.gen_range(0..self.n as Vertex);
        self.pending = Some(u);
        u
    }

    /// Plays the current round with `v_t = v`, using the head drawn by
    /// [`draw_head`](Self::draw_head).
    pub fn add_round_edge(&mut self, v: Vertex, color: EdgeColor) -> Result<EdgeRecord> {
        let u = self
            .pending
            .ok_or_else(|| Error::state("no head drawn for this round"))?;
        if v as usize >= self.n {
            return Err(Error::domain("player vertex out of range"));
        }
        self.pending = None;
        Ok(self.record(u, v, color))
    }

    /// Plays a round whose head is supplied by the caller instead of the
    /// random stream; used for replays and hand-built traces.
    pub fn push_edge(
        &mut self,
        head: Vertex,
        tail: Vertex,
        color: EdgeColor,
    ) -> Result<EdgeRecord> {
        if head as usize >= self.n || tail as usize >= self.n {
            return Err(Error::domain("vertex out of range"));
        }
        if self.pending.is_some() {
            return Err(Error::state("a drawn head is pending"));
        }
        Ok(self.record(head, tail, color))
    }

    fn record(&mut self, u: Vertex, v: Vertex, color: EdgeColor) -> EdgeRecord {
        self.t += 1;
        let discarded = u == v || self.has_edge(u, v);
        if !discarded {
            self.adj[u as usize].push(v);
            self.adj[v as usize].push(u);
            self.deg[u as usize] += 1;
            self.deg[v as usize] += 1;
            self.simple_edges += 1;
        }
        self.indeg[u as usize] += 1;
        self.outdeg[v as usize] += 1;
        let rec = EdgeRecord {
            round: self.t,
            tail: v,
            head: u,
            color,
            discarded,
        };
        self.edges.push(rec);
        rec
    }

    /// Changes the color of the edge added in round `round` (1-based).
    pub fn recolor(&mut self, round: u64, color: EdgeColor) -> Result<()> {
        let idx = round
            .checked_sub(1)
            .ok_or_else(|| Error::domain("rounds are 1-based"))?;
        let rec = self
            .edges
            .get_mut(idx as usize)
            .ok_or_else(|| Error::domain("round not yet played"))?;
        rec.color = color;
        Ok(())
    }

    /// Snapshot of `Ĝ_t` as a standalone graph.
    pub fn simple_graph(&self) -> SimpleGraph {
        SimpleGraph {
            adj: self.adj.clone(),
            edges: self.simple_edges,
        }
    }

    /// Property (E) quantities. `deficit` lists the vertices that had simple
    /// degree below 4 when phase 3 ended.
    pub fn property_e_report(&self, deficit: &[Vertex]) -> PropertyEReport {
        let discarded: Vec<(Vertex, Vertex)> = self
            .edges
            .iter()
            .filter(|e| e.discarded)
            .map(|e| ordered(e.tail, e.head))
            .collect();
        let golden: Vec<(Vertex, Vertex)> = self
            .edges
            .iter()
            .filter(|e| e.color == EdgeColor::Golden && e.tail != e.head)
            .map(|e| ordered(e.tail, e.head))
            .collect();
        PropertyEReport {
            double_or_loop_count: discarded.len(),
            double_or_loop_disjoint: pairs_vertex_disjoint(&discarded),
            golden_count: self
                .edges
                .iter()
                .filter(|e| e.color == EdgeColor::Golden)
                .count(),
            golden_paths_ok: short_disjoint_paths(&golden),
            deficit_pair_min_distance: min_pair_distance(self, deficit),
        }
    }
}

impl Adjacency for ProcessState {
    fn vertex_count(&self) -> usize {
        self.n
    }
    fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }
}

fn ordered(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Distinct pairs must not share a vertex.
fn pairs_vertex_disjoint(pairs: &[(Vertex, Vertex)]) -> bool {
    let mut owner: BTreeMap<Vertex, (Vertex, Vertex)> = BTreeMap::new();
    for &p in pairs {
        for v in [p.0, p.1] {
            match owner.get(&v) {
                Some(&q) if q != p => return false,
                _ => {
                    owner.insert(v, p);
                }
            }
        }
    }
    true
}

/// Edges (possibly repeated) form vertex-disjoint simple paths with 1 or 2 edges.
fn short_disjoint_paths(edges: &[(Vertex, Vertex)]) -> bool {
    let mut id: BTreeMap<Vertex, usize> = BTreeMap::new();
    for &(a, b) in edges {
        let next = id.len();
        id.entry(a).or_insert(next);
        let next = id.len();
        id.entry(b).or_insert(next);
    }
    let mut parent: Vec<usize> = (0..id.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in edges {
        let (x, y) = (find(&mut parent, id[&a]), find(&mut parent, id[&b]));
        parent[x] = y;
    }
    let mut verts = vec![0usize; id.len()];
    let mut count = vec![0usize; id.len()];
    for i in 0..id.len() {
        let r = find(&mut parent, i);
        verts[r] += 1;
    }
    for &(a, _) in edges {
        let r = find(&mut parent, id[&a]);
        count[r] += 1;
    }
    (0..id.len()).all(|r| verts[r] == 0 || (count[r] <= 2 && verts[r] == count[r] + 1))
}

/// Multi-source BFS: the closest pair of sources meets across some edge.
fn min_pair_distance<G: Adjacency>(g: &G, sources: &[Vertex]) -> Option<u32> {
    let n = g.vertex_count();
    let mut dist = vec![u32::MAX; n];
    let mut label = vec![NONE; n];
    let mut queue = VecDeque::new();
    let mut best: Option<u32> = None;
    for &s in sources {
        if label[s as usize] != NONE {
            return Some(0);
        }
        dist[s as usize] = 0;
        label[s as usize] = s;
        queue.push_back(s);
    }
    while let Some(x) = queue.pop_front() {
        let dx = dist[x as usize];
        if let Some(b) = best {
            if 2 * dx + 1 >= b {
                break;
            }
        }
        for &y in g.neighbors(x) {
            if label[y as usize] == NONE {
                label[y as usize] = label[x as usize];
                dist[y as usize] = dx + 1;
                queue.push_back(y);
            } else if label[y as usize] != label[x as usize] {
                let d = dx + dist[y as usize] + 1;
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
    }
    best
}
