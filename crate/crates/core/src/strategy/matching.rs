//! Greedy 2-matching (spanning subgraph of maximum degree 2) with few
//! components.
//!
//! A Karp–Sipser style greedy grows a linear forest, always serving the
//! vertex with the fewest neighbours that can still take an edge. Path ends are then extended by Posá rotations
//! inside their own path until some end touches another component's end.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{Adjacency, Vertex, NONE};
use crate::strategy::rotation::{EndSearch, Visit};

/// A component of a 2-matching: a path (possibly a single vertex) listed
/// from one end to the other, or a cycle listed in cyclic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<Vertex>,
    pub cycle: bool,
}

/// A 2-matching stored as at most two partners per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoMatching {
    nbr: Vec<[Vertex; 2]>,
    edges: usize,
}

impl TwoMatching {
    pub fn empty(n: usize) -> Self {
        TwoMatching {
            nbr: vec![[NONE; 2]; n],
            edges: 0,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.nbr.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn partners(&self, v: Vertex) -> [Vertex; 2] {
        self.nbr[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.nbr[v as usize].iter().filter(|&&x| x != NONE).count()
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.nbr[a as usize].contains(&b)
    }

    /// Adds `{a, b}`; both endpoints must have spare capacity.
    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> bool {
        if a == b || self.degree(a) >= 2 || self.degree(b) >= 2 || self.has_edge(a, b) {
            return false;
        }
        attach(&mut self.nbr[a as usize], b);
        attach(&mut self.nbr[b as usize], a);
        self.edges += 1;
        true
    }

    pub fn remove_edge(&mut self, a: Vertex, b: Vertex) -> bool {
        if !self.has_edge(a, b) {
            return false;
        }
        detach(&mut self.nbr[a as usize], b);
        detach(&mut self.nbr[b as usize], a);
        self.edges -= 1;
        true
    }

    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.edges);
        for (a, p) in self.nbr.iter().enumerate() {
            for &b in p {
                if b != NONE && (a as Vertex) < b {
                    out.push((a as Vertex, b));
                }
            }
        }
        out
    }

    /// Follows partners from `start` through `first`; stops at an end or
    /// when the walk returns to `start` (reported as `true`).
    fn walk(&self, start: Vertex, first: Vertex, out: &mut Vec<Vertex>) -> bool {
        out.push(start);
        let (mut prev, mut cur) = (start, first);
        while cur != NONE {
            if cur == start {
                return true;
            }
            out.push(cur);
            let [a, b] = self.nbr[cur as usize];
            let next = if a == prev { b } else { a };
            prev = cur;
            cur = next;
        }
        false
    }

    /// The component containing `v`; paths are listed end to end.
    pub fn component_of(&self, v: Vertex) -> Component {
        let [a, b] = self.nbr[v as usize];
        let mut fwd = Vec::new();
        if a == NONE {
            return Component {
                vertices: vec![v],
                cycle: false,
            };
        }
        if self.walk(v, a, &mut fwd) {
            return Component {
                vertices: fwd,
                cycle: true,
            };
        }
        if b == NONE {
            return Component {
                vertices: fwd,
                cycle: false,
            };
        }
        let mut back = Vec::new();
        self.walk(v, b, &mut back);
        let mut vertices: Vec<Vertex> = back[1..].iter().rev().copied().collect();
        vertices.extend_from_slice(&fwd);
        Component {
            vertices,
            cycle: false,
        }
    }

    /// All components, each listed once, ordered by smallest-index discovery.
    pub fn components(&self) -> Vec<Component> {
        let n = self.nbr.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for v in 0..n as Vertex {
            if seen[v as usize] {
                continue;
            }
            let c = self.component_of(v);
            for &x in &c.vertices {
                seen[x as usize] = true;
            }
            out.push(c);
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    /// Checks the degree bound and that every matching edge lies in `g`.
    pub fn is_valid_in<G: Adjacency + ?Sized>(&self, g: &G) -> bool {
        self.nbr.len() == g.vertex_count()
            && self.edges().iter().all(|&(a, b)| g.has_edge(a, b))
            && (0..self.nbr.len() as Vertex).all(|v| {
                self.nbr[v as usize]
                    .iter()
                    .all(|&x| x == NONE || self.has_edge(x, v))
            })
    }
}

fn attach(slot: &mut [Vertex; 2], v: Vertex) {
    if slot[0] == NONE {
        slot[0] = v;
    } else {
        slot[1] = v;
    }
}

fn detach(slot: &mut [Vertex; 2], v: Vertex) {
    if slot[0] == v {
        slot[0] = slot[1];
        slot[1] = NONE;
    } else if slot[1] == v {
        slot[1] = NONE;
    }
}

struct Dsu(Vec<u32>);

impl Dsu {
    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let p = self.0[x as usize];
            self.0[x as usize] = self.0[p as usize];
            x = p;
        }
        x
    }
    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra as usize] = rb;
        true
    }
}

/// Heuristic 2-matching of `g`: a minimum-residual-degree greedy linear
/// forest followed by rotation-based joining of path ends.
pub fn build_two_matching<G: Adjacency + ?Sized>(g: &G) -> TwoMatching {
    let mut f = greedy_linear_forest(g);
    join_by_rotation(g, &mut f);
    close_spanning_path(g, &mut f);
    f
}

/// Repeatedly takes a vertex with spare capacity and the fewest neighbours
/// that still have spare capacity, and joins it to such a neighbour of
/// smallest residual degree, never closing a cycle.
fn greedy_linear_forest<G: Adjacency + ?Sized>(g: &G) -> TwoMatching {
    let n = g.vertex_count();
    let mut f = TwoMatching::empty(n);
    let mut dsu = Dsu((0..n as u32).collect());
    let mut residual: Vec<usize> = (0..n as Vertex).map(|v| g.degree(v)).collect();
    let max_deg = residual.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<Vertex>> = vec![Vec::new(); max_deg + 1];
    for v in (0..n as Vertex).rev() {
        buckets[residual[v as usize]].push(v);
    }
    let mut stuck = vec![false; n];
    let mut low = 1;
    loop {
        while low <= max_deg && buckets[low].is_empty() {
            low += 1;
        }
        if low > max_deg {
            break;
        }
        let a = buckets[low].pop().unwrap();
        let ai = a as usize;
        if residual[ai] != low || f.degree(a) >= 2 || stuck[ai] {
            continue;
        }
        let mut best: Option<Vertex> = None;
        for &b in g.neighbors(a) {
            if f.degree(b) < 2
                && !stuck[b as usize]
                && dsu.find(a) != dsu.find(b)
                && best.is_none_or(|c| (residual[b as usize], b) < (residual[c as usize], c))
            {
                best = Some(b);
            }
        }
        let Some(b) = best else {
            stuck[ai] = true;
            continue;
        };
        f.add_edge(a, b);
        dsu.union(a, b);
        for x in [a, b] {
            if f.degree(x) == 2 {
                for &c in g.neighbors(x) {
                    let ci = c as usize;
                    if residual[ci] > 0 {
                        residual[ci] -= 1;
                        if f.degree(c) < 2 && !stuck[ci] && residual[ci] > 0 {
                            buckets[residual[ci]].push(c);
                            low = low.min(residual[ci]);
                        }
                    }
                }
            }
        }
        if f.degree(a) < 2 && residual[ai] > 0 {
            buckets[residual[ai]].push(a);
            low = low.min(residual[ai]);
        }
        if f.degree(b) < 2 && residual[b as usize] > 0 {
            buckets[residual[b as usize]].push(b);
            low = low.min(residual[b as usize]);
        }
    }
    f
}

/// Rotates each path inside itself looking for an end adjacent to the end
/// (or isolated vertex) of a different component, and joins the two.
fn join_by_rotation<G: Adjacency + ?Sized>(g: &G, f: &mut TwoMatching) {
    let n = f.vertex_count();
    let mut comp_id = vec![u32::MAX; n];
    let mut touched = vec![false; n];
    let mut pos = vec![NONE; n];
    let mut search = EndSearch::new(n);
    let mut witness = Vec::new();
    loop {
        let comps = f.components();
        if comps.len() <= 1 {
            return;
        }
        for (i, c) in comps.iter().enumerate() {
            for &v in &c.vertices {
                comp_id[v as usize] = i as u32;
                touched[v as usize] = false;
            }
        }
        let mut joined = 0usize;
        for c in comps.iter().filter(|c| !c.cycle) {
            if c.vertices.iter().any(|&v| touched[v as usize]) {
                continue;
            }
            let me = comp_id[c.vertices[0] as usize];
            let forward = c.vertices.clone();
            let backward: Vec<Vertex> = c.vertices.iter().rev().copied().collect();
            for path in [&forward, &backward] {
                for (i, &v) in path.iter().enumerate() {
                    pos[v as usize] = i as Vertex;
                }
                let mut target = NONE;
                let hit = search.explore(path, &pos, g, |x| {
                    for &y in g.neighbors(x) {
                        if comp_id[y as usize] != me && !touched[y as usize] && f.degree(y) < 2 {
                            target = y;
                            return Visit::Stop;
                        }
                    }
                    Visit::Continue
                });
                for &v in path.iter() {
                    pos[v as usize] = NONE;
                }
                if let Some(x) = hit {
                    search.witness_into(x, &mut witness);
                    relink(f, path, &witness);
                    f.add_edge(x, target);
                    for v in f.component_of(x).vertices {
                        touched[v as usize] = true;
                    }
                    joined += 1;
                    break;
                }
            }
        }
        if joined == 0 {
            return;
        }
    }
}

/// Replaces the matching edges of path `old` by those of `new` (same vertex set).
fn relink(f: &mut TwoMatching, old: &[Vertex], new: &[Vertex]) {
    for w in old.windows(2) {
        f.remove_edge(w[0], w[1]);
    }
    for w in new.windows(2) {
        f.add_edge(w[0], w[1]);
    }
}

/// A single spanning path whose ends are adjacent becomes a Hamilton cycle.
fn close_spanning_path<G: Adjacency + ?Sized>(g: &G, f: &mut TwoMatching) {
    let comps = f.components();
    if comps.len() == 1 && !comps[0].cycle && comps[0].vertices.len() >= 3 {
        let v = &comps[0].vertices;
        let (a, b) = (v[0], *v.last().unwrap());
        if g.has_edge(a, b) {
            f.add_edge(a, b);
        }
    }
}
