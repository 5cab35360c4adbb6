//! Classification of vertices by the shape of their first three in-edges.
//!
//! A vertex of in-degree `k ≥ 1` looks at its first `min(k, 3)`
//! in-neighbours in arrival order. If each of them has out-degree 1 and
//! in-degree 0 or 1 the vertex gets the type listing those in-degrees in
//! non-increasing order; otherwise it is neglected. Type `(1,1,1)` is a
//! problematic vertex. Neglected is absorbing: out-degrees and in-degrees
//! only grow and the first three in-neighbours never change once fixed.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::graph::{EdgeRecord, Vertex, NONE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeClass {
    Untyped,
    X0,
    X00,
    X000,
    X1,
    X10,
    X100,
    X11,
    X110,
    X111,
    Neglected,
}

impl TypeClass {
    pub const ALL: [TypeClass; 11] = [
        TypeClass::Untyped,
        TypeClass::X0,
        TypeClass::X00,
        TypeClass::X000,
        TypeClass::X1,
        TypeClass::X10,
        TypeClass::X100,
        TypeClass::X11,
        TypeClass::X110,
        TypeClass::X111,
        TypeClass::Neglected,
    ];

    fn index(self) -> usize {
        self as usize
    }

    /// Type of a vertex with `len` typed in-neighbours, `ones` of which
    /// have in-degree 1.
    fn from_shape(len: usize, ones: usize) -> TypeClass {
        match (len, ones) {
            (1, 0) => TypeClass::X0,
            (1, 1) => TypeClass::X1,
            (2, 0) => TypeClass::X00,
            (2, 1) => TypeClass::X10,
            (2, 2) => TypeClass::X11,
            (3, 0) => TypeClass::X000,
            (3, 1) => TypeClass::X100,
            (3, 2) => TypeClass::X110,
            (3, 3) => TypeClass::X111,
            _ => TypeClass::Untyped,
        }
    }
}

fn classify_from(indeg: &[u32], outdeg: &[u32], first: &[Vertex; 3], k: u32) -> TypeClass {
    if k == 0 {
        return TypeClass::Untyped;
    }
    let len = k.min(3) as usize;
    let mut ones = 0;
    for &y in &first[..len] {
        let y = y as usize;
        if outdeg[y] != 1 || indeg[y] > 1 {
            return TypeClass::Neglected;
        }
        ones += indeg[y] as usize;
    }
    TypeClass::from_shape(len, ones)
}

/// Incremental classifier with O(1) amortized work per round.
#[derive(Clone, Debug)]
pub struct TypeTracker {
    indeg: Vec<u32>,
    outdeg: Vec<u32>,
    first: Vec<[Vertex; 3]>,
    class: Vec<TypeClass>,
    counts: [usize; 11],
    // watchers[y]: vertices x, not yet neglected, with y among their first
    // three in-neighbours. A good y has out-degree 1, so this stays tiny.
    watchers: Vec<Vec<Vertex>>,
    scratch: Vec<Vertex>,
}

impl TypeTracker {
    pub fn new(n: usize) -> Self {
        let mut counts = [0; 11];
        counts[TypeClass::Untyped.index()] = n;
        TypeTracker {
            indeg: vec![0; n],
            outdeg: vec![0; n],
            first: vec![[NONE; 3]; n],
            class: vec![TypeClass::Untyped; n],
            counts,
            watchers: vec![Vec::new(); n],
            scratch: Vec::new(),
        }
    }

    pub fn class(&self, v: Vertex) -> TypeClass {
        self.class[v as usize]
    }

    pub fn count(&self, c: TypeClass) -> usize {
        self.counts[c.index()]
    }

    /// Number of problematic (type `(1,1,1)`) vertices.
    pub fn problematic(&self) -> usize {
        self.count(TypeClass::X111)
    }

    pub fn observe(&mut self, rec: &EdgeRecord) {
        self.add(rec.tail, rec.head);
    }

    /// Registers the directed edge `tail -> head`.
    pub fn add(&mut self, tail: Vertex, head: Vertex) {
        let (v, u) = (tail as usize, head as usize);
        self.outdeg[v] += 1;
        self.indeg[u] += 1;
        let k = self.indeg[u];
        if k <= 3 {
            self.first[u][k as usize - 1] = tail;
            if self.class[u] != TypeClass::Neglected {
                self.watchers[v].push(head);
            }
        }
        let mut affected = core::mem::take(&mut self.scratch);
        affected.clear();
        affected.push(head);
        affected.extend_from_slice(&self.watchers[v]);
        affected.extend_from_slice(&self.watchers[u]);
        for &x in &affected {
            self.reclassify(x);
        }
        self.prune(v);
        self.prune(u);
        self.scratch = affected;
    }

    fn reclassify(&mut self, x: Vertex) {
        let xi = x as usize;
        let old = self.class[xi];
        if old == TypeClass::Neglected {
            return;
        }
        let new = classify_from(&self.indeg, &self.outdeg, &self.first[xi], self.indeg[xi]);
        if new != old {
            self.counts[old.index()] -= 1;
            self.counts[new.index()] += 1;
            self.class[xi] = new;
        }
    }

    fn prune(&mut self, y: usize) {
        let class = &self.class;
        self.watchers[y].retain(|&x| class[x as usize] != TypeClass::Neglected);
    }
}

/// From-scratch classification of every vertex of the digraph given by the
/// edge list, in arrival order. Used as a replay oracle for [`TypeTracker`].
pub fn classify_definitional(n: usize, edges: &[(Vertex, Vertex)]) -> Vec<TypeClass> {
    let mut indeg = vec![0u32; n];
    let mut outdeg = vec![0u32; n];
    let mut first = vec![[NONE; 3]; n];
    for &(tail, head) in edges {
        outdeg[tail as usize] += 1;
        let k = &mut indeg[head as usize];
        if *k < 3 {
            first[head as usize][*k as usize] = tail;
        }
        *k += 1;
    }
    (0..n)
        .map(|x| classify_from(&indeg, &outdeg, &first[x], indeg[x]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn crafted_problematic_vertex() {
        // 0 receives edges from 1, 2, 3; each of those has one in-edge from
        // a fresh vertex (4, 5, 6) and no other out-edge.
        let edges = [(1, 0), (2, 0), (3, 0), (4, 1), (5, 2), (6, 3)];
        let mut tr = TypeTracker::new(7);
        for &(t, h) in &edges {
            tr.add(t, h);
        }
        assert_eq!(tr.problematic(), 1);
        assert_eq!(tr.class(0), TypeClass::X111);
        assert_eq!(classify_definitional(7, &edges)[0], TypeClass::X111);
        // hitting an in-neighbour again neglects the vertex
        tr.add(4, 2);
        assert_eq!(tr.problematic(), 0);
        assert_eq!(tr.class(0), TypeClass::Neglected);
    }

    #[test]
    fn shapes_of_small_types() {
        let mut tr = TypeTracker::new(6);
        tr.add(1, 0);
        assert_eq!(tr.class(0), TypeClass::X0);
        tr.add(2, 1);
        assert_eq!(tr.class(0), TypeClass::X1);
        assert_eq!(tr.class(1), TypeClass::X0);
        tr.add(3, 0);
        assert_eq!(tr.class(0), TypeClass::X10);
        tr.add(1, 4);
        assert_eq!(tr.class(0), TypeClass::Neglected);
        assert_eq!(tr.class(4), TypeClass::Neglected);
    }

    #[test]
    fn incremental_matches_definitional_on_random_traces() {
        for seed in 0..40u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(3..=50usize);
            let mut tr = TypeTracker::new(n);
            let mut edges = Vec::new();
            for _ in 0..3 * n {
                let head = rng.gen_range(0..n as Vertex);
                let tail = if rng.gen_bool(0.7) {
                    // favour low out-degree tails so that types survive
                    let mut best = rng.gen_range(0..n as Vertex);
                    for _ in 0..3 {
                        let c = rng.gen_range(0..n as Vertex);
                        if tr.outdeg[c as usize] < tr.outdeg[best as usize] {
                            best = c;
                        }
                    }
                    best
                } else {
                    rng.gen_range(0..n as Vertex)
                };
                tr.add(tail, head);
                edges.push((tail, head));
                let want = classify_definitional(n, &edges);
                assert_eq!(tr.class, want, "seed {seed} after {} edges", edges.len());
                for c in TypeClass::ALL {
                    assert_eq!(tr.count(c), want.iter().filter(|&&w| w == c).count());
                }
            }
        }
    }
}
