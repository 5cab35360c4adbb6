//! Posá rotations and the End set of a path with a fixed anchor.
//!
//! For a path `u₁ … u_h` and an edge `{u_h, u_j}` with `1 < j < h − 1` the
//! rotation produces `u₁ … u_j u_h u_{h−1} … u_{j+1}`. The End set collects
//! every endpoint reachable by sequences of rotations; it never contains
//! the anchor `u₁`.
//!
//! The breadth-first search keeps each discovered path as a short list of
//! segments of the starting path, so a rotation costs time proportional to
//! the number of segments instead of the path length.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, Vertex, NONE};

/// Applies the rotation with pivot edge `{u_h, w}`. The pivot must contain
/// the current endpoint and `w` must sit at a position `1 < j < h − 1`.
pub fn posa_rotate(path: &[Vertex], pivot: (Vertex, Vertex)) -> Result<Vec<Vertex>> {
    let h = path.len();
    let end = *path.last().ok_or_else(|| Error::domain("empty path"))?;
    let w = if pivot.0 == end {
        pivot.1
    } else if pivot.1 == end {
        pivot.0
    } else {
        return Err(Error::domain("pivot is not incident to the endpoint"));
    };
    let i = path
        .iter()
        .position(|&x| x == w)
        .ok_or_else(|| Error::domain("pivot vertex not on the path"))?;
    // 0-based index i is position j = i + 1
    if i < 1 || i + 3 > h {
        return Err(Error::domain("pivot position must satisfy 1 < j < h - 1"));
    }
    let mut out = path.to_vec();
    out[i + 1..].reverse();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Seg {
    lo: u32,
    hi: u32,
    rev: bool,
}

impl Seg {
    fn len(self) -> u32 {
        self.hi - self.lo + 1
    }
    fn first(self) -> u32 {
        if self.rev {
            self.hi
        } else {
            self.lo
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    end: Vertex,
    seg_start: u32,
    seg_len: u32,
    parent: u32,
    pivot: Vertex,
}

/// What a visitor wants after seeing a new endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Visit {
    Continue,
    Stop,
}

/// Reusable End-set search over a fixed base path.
#[derive(Clone, Debug, Default)]
pub struct EndSearch {
    base: Vec<Vertex>,
    segs: Vec<Seg>,
    nodes: Vec<Node>,
    node_of: Vec<u32>,
    stamp: Vec<u32>,
    current: u32,
    complete: bool,
    tmp: Vec<Seg>,
}

impl EndSearch {
    pub fn new(n: usize) -> Self {
        EndSearch {
            node_of: alloc::vec![0; n],
            stamp: alloc::vec![0; n],
            ..Default::default()
        }
    }

    fn ensure(&mut self, n: usize) {
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
            self.node_of.resize(n, 0);
        }
    }

    /// Explores rotations of `path` in breadth-first order. `pos[v]` must be
    /// the index of `v` in `path`, or `NONE` for vertices off the path.
    /// `visit` is called for every new endpoint, the current one first;
    /// returning [`Visit::Stop`] ends the search early. Returns the endpoint
    /// that stopped the search, if any.
    pub fn explore<G, F>(
        &mut self,
        path: &[Vertex],
        pos: &[Vertex],
        g: &G,
        mut visit: F,
    ) -> Option<Vertex>
    where
        G: Adjacency + ?Sized,
        F: FnMut(Vertex) -> Visit,
    {
        self.ensure(g.vertex_count());
        self.base.clear();
        self.base.extend_from_slice(path);
        self.segs.clear();
        self.nodes.clear();
        self.complete = false;
        self.current = self.current.wrapping_add(1);
        if self.current == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.current = 1;
        }
        let h = path.len() as u32;
        let Some(&root) = path.last() else {
            self.complete = true;
            return None;
        };
        self.segs.push(Seg {
            lo: 0,
            hi: h - 1,
            rev: false,
        });
        self.push_node(Node {
            end: root,
            seg_start: 0,
            seg_len: 1,
            parent: u32::MAX,
            pivot: NONE,
        });
        if visit(root) == Visit::Stop {
            return Some(root);
        }
        let mut k = 0;
        while k < self.nodes.len() {
            let node = self.nodes[k];
            for &w in g.neighbors(node.end) {
                let p = pos[w as usize];
                if p == NONE {
                    continue;
                }
                let Some((seg_idx, j)) = self.locate(node, p) else {
                    continue;
                };
                // 0-based j: require 1 <= j <= h - 3
                if j < 1 || j + 3 > h {
                    continue;
                }
                let succ = self.successor(node, seg_idx, p);
                if self.stamp[succ as usize] == self.current {
                    continue;
                }
                self.rotate(node, seg_idx, p, k as u32, w, succ);
                if visit(succ) == Visit::Stop {
                    return Some(succ);
                }
            }
            k += 1;
        }
        self.complete = true;
        None
    }

    fn push_node(&mut self, node: Node) {
        self.stamp[node.end as usize] = self.current;
        self.node_of[node.end as usize] = self.nodes.len() as u32;
        self.nodes.push(node);
    }

    fn node_segs(&self, node: Node) -> &[Seg] {
        &self.segs[node.seg_start as usize..(node.seg_start + node.seg_len) as usize]
    }

    /// Segment index holding base index `p`, and the path position of `p`.
    fn locate(&self, node: Node, p: u32) -> Option<(usize, u32)> {
        let mut offset = 0;
        for (i, s) in self.node_segs(node).iter().enumerate() {
            if s.lo <= p && p <= s.hi {
                let within = if s.rev { s.hi - p } else { p - s.lo };
                return Some((i, offset + within));
            }
            offset += s.len();
        }
        None
    }

    fn successor(&self, node: Node, seg_idx: usize, p: u32) -> Vertex {
        let segs = self.node_segs(node);
        let s = segs[seg_idx];
        let at_end = if s.rev { p == s.lo } else { p == s.hi };
        let b = if !at_end {
            if s.rev {
                p - 1
            } else {
                p + 1
            }
        } else {
            segs[seg_idx + 1].first()
        };
        self.base[b as usize]
    }

    fn rotate(
        &mut self,
        node: Node,
        seg_idx: usize,
        p: u32,
        parent: u32,
        pivot: Vertex,
        succ: Vertex,
    ) {
        let mut tmp = core::mem::take(&mut self.tmp);
        tmp.clear();
        let segs = self.node_segs(node);
        let s = segs[seg_idx];
        // prefix: everything up to and including p
        let start = self.segs.len() as u32;
        let mut out: Vec<Seg> = Vec::with_capacity(segs.len() + 2);
        out.extend_from_slice(&segs[..seg_idx]);
        if s.rev {
            out.push(Seg {
                lo: p,
                hi: s.hi,
                rev: true,
            });
        } else {
            out.push(Seg {
                lo: s.lo,
                hi: p,
                rev: false,
            });
        }
        // remainder after p, then reversed
        if s.rev {
            if p > s.lo {
                tmp.push(Seg {
                    lo: s.lo,
                    hi: p - 1,
                    rev: true,
                });
            }
        } else if p < s.hi {
            tmp.push(Seg {
                lo: p + 1,
                hi: s.hi,
                rev: false,
            });
        }
        tmp.extend_from_slice(&segs[seg_idx + 1..]);
        out.extend(tmp.iter().rev().map(|t| Seg { rev: !t.rev, ..*t }));
        let len = out.len() as u32;
        self.segs.extend_from_slice(&out);
        self.tmp = tmp;
        self.push_node(Node {
            end: succ,
            seg_start: start,
            seg_len: len,
            parent,
            pivot,
        });
    }

    /// Whether the last search ran to exhaustion, so `contains` is exact.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn contains(&self, v: Vertex) -> bool {
        (v as usize) < self.stamp.len()
            && self.stamp[v as usize] == self.current
            && !self.nodes.is_empty()
    }

    /// Number of endpoints found by the last search.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Endpoints in discovery order.
    pub fn ends(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.nodes.iter().map(|n| n.end)
    }

    /// `(previous endpoint, pivot vertex)` of the rotation that discovered
    /// `v`; `None` for the starting endpoint or vertices not in End.
    pub fn rotation_parent(&self, v: Vertex) -> Option<(Vertex, Vertex)> {
        if !self.contains(v) {
            return None;
        }
        let node = self.nodes[self.node_of[v as usize] as usize];
        (node.parent != u32::MAX).then(|| (self.nodes[node.parent as usize].end, node.pivot))
    }

    /// Writes the path ending at `v` (same vertex set and anchor) into `out`.
    pub fn witness_into(&self, v: Vertex, out: &mut Vec<Vertex>) -> bool {
        if !self.contains(v) {
            return false;
        }
        out.clear();
        let node = self.nodes[self.node_of[v as usize] as usize];
        for s in self.node_segs(node) {
            if s.rev {
                out.extend(self.base[s.lo as usize..=s.hi as usize].iter().rev());
            } else {
                out.extend_from_slice(&self.base[s.lo as usize..=s.hi as usize]);
            }
        }
        true
    }

    pub fn witness(&self, v: Vertex) -> Option<Vec<Vertex>> {
        let mut out = Vec::new();
        self.witness_into(v, &mut out).then_some(out)
    }
}

/// End set of `path` in `g`, in discovery order, with the search state for
/// witness reconstruction.
pub fn end_set<G: Adjacency + ?Sized>(path: &[Vertex], g: &G) -> (Vec<Vertex>, EndSearch) {
    let mut pos = alloc::vec![NONE; g.vertex_count()];
    for (i, &v) in path.iter().enumerate() {
        pos[v as usize] = i as Vertex;
    }
    let mut search = EndSearch::new(g.vertex_count());
    search.explore(path, &pos, g, |_| Visit::Continue);
    (search.ends().collect(), search)
}
