//! Exhaustive small-instance oracles: maximum 2-matching size `κ(G)`, the
//! Tutte-Berge minimization for 2-matchings, the partition conditions
//! (a)-(d) and short-cycle counts.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Adjacency, Vertex};

pub const KAPPA_EDGE_LIMIT: usize = 22;
pub const TUTTE_BERGE_VERTEX_LIMIT: usize = 12;
pub const CYCLE_LENGTH_LIMIT: usize = 20;
pub const CYCLIC_SUBSET_VERTEX_LIMIT: usize = 14;

fn edges_of<G: Adjacency + ?Sized>(g: &G) -> Vec<(Vertex, Vertex)> {
    let mut out = Vec::new();
    for a in 0..g.vertex_count() as Vertex {
        for &b in g.neighbors(a) {
            if a < b {
                out.push((a, b));
            }
        }
    }
    out
}

/// Size of a maximum 2-matching by exhaustive search over edge subsets.
pub fn kappa_bruteforce<G: Adjacency + ?Sized>(g: &G) -> Result<usize> {
    let edges = edges_of(g);
    if edges.len() > KAPPA_EDGE_LIMIT {
        return Err(Error::TooLarge {
            what: "edges",
            limit: KAPPA_EDGE_LIMIT,
            got: edges.len(),
        });
    }
    fn go(i: usize, edges: &[(Vertex, Vertex)], deg: &mut [u8], taken: usize, best: &mut usize) {
        if taken + (edges.len() - i) <= *best {
            return;
        }
        if i == edges.len() {
            *best = taken;
            return;
        }
        let (a, b) = (edges[i].0 as usize, edges[i].1 as usize);
        if deg[a] < 2 && deg[b] < 2 {
            deg[a] += 1;
            deg[b] += 1;
            go(i + 1, edges, deg, taken + 1, best);
            deg[a] -= 1;
            deg[b] -= 1;
        }
        go(i + 1, edges, deg, taken, best);
    }
    let mut deg = vec![0u8; g.vertex_count()];
    let mut best = 0;
    go(0, &edges, &mut deg, 0, &mut best);
    Ok(best)
}

/// A pair `(U, S)` with its Tutte-Berge value
/// `n + |U| - |S| + Σ_X ⌊e(X, S) / 2⌋` over the components `X` of `G - U - S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TBCertificate {
    pub u: Vec<Vertex>,
    pub s: Vec<Vertex>,
    pub value: usize,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

const IN_U: u8 = 1;
const IN_S: u8 = 2;

/// Evaluates the Tutte-Berge expression for a given pair; `None` when the
/// sets overlap or `S` is not independent.
pub fn tutte_berge_value<G: Adjacency + ?Sized>(
    g: &G,
    u: &[Vertex],
    s: &[Vertex],
) -> Option<usize> {
    let n = g.vertex_count();
    let mut label = vec![0u8; n];
    for &x in u {
        label[x as usize] = IN_U;
    }
    for &x in s {
        if label[x as usize] != 0 {
            return None;
        }
        label[x as usize] = IN_S;
    }
    if u.iter().any(|&x| label[x as usize] != IN_U) {
        return None;
    }
    let edges = edges_of(g);
    evaluate(n, &edges, &label, &mut Dsu::new(n), &mut vec![0usize; n])
}

fn evaluate(
    n: usize,
    edges: &[(Vertex, Vertex)],
    label: &[u8],
    dsu: &mut Dsu,
    to_s: &mut [usize],
) -> Option<usize> {
    for (i, p) in dsu.0.iter_mut().enumerate() {
        *p = i;
    }
    to_s.iter_mut().for_each(|c| *c = 0);
    for &(a, b) in edges {
        let (la, lb) = (label[a as usize], label[b as usize]);
        if la == IN_S && lb == IN_S {
            return None;
        }
        if la == 0 && lb == 0 {
            dsu.union(a as usize, b as usize);
        }
    }
    for &(a, b) in edges {
        let (la, lb) = (label[a as usize], label[b as usize]);
        if la == 0 && lb == IN_S {
            let r = dsu.find(a as usize);
            to_s[r] += 1;
        } else if lb == 0 && la == IN_S {
            let r = dsu.find(b as usize);
            to_s[r] += 1;
        }
    }
    let us = label.iter().filter(|&&l| l == IN_U).count();
    let ss = label.iter().filter(|&&l| l == IN_S).count();
    let half: usize = to_s.iter().map(|c| c / 2).sum();
    Some(n + us - ss + half)
}

/// Minimizes the Tutte-Berge expression over all disjoint `(U, S)` with `S`
/// independent. The minimum equals `κ(G)`.
pub fn tutte_berge_min<G: Adjacency + ?Sized>(g: &G) -> Result<TBCertificate> {
    let n = g.vertex_count();
    if n > TUTTE_BERGE_VERTEX_LIMIT {
        return Err(Error::TooLarge {
            what: "vertices",
            limit: TUTTE_BERGE_VERTEX_LIMIT,
            got: n,
        });
    }
    let edges = edges_of(g);
    let mut label = vec![0u8; n];
    let mut dsu = Dsu::new(n);
    let mut to_s = vec![0usize; n];
    let mut best: Option<(usize, Vec<u8>)> = None;
    loop {
        if let Some(v) = evaluate(n, &edges, &label, &mut dsu, &mut to_s) {
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, label.clone()));
            }
        }
        // Base-3 odometer over the labels.
        let mut i = 0;
        while i < n && label[i] == IN_S {
            label[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        label[i] += 1;
    }
    let (value, lab) = best.expect("U = S = ∅ is always admissible");
    let pick = |l: u8| {
        lab.iter()
            .enumerate()
            .filter(|(_, &x)| x == l)
            .map(|(i, _)| i as Vertex)
            .collect()
    };
    Ok(TBCertificate {
        u: pick(IN_U),
        s: pick(IN_S),
        value,
    })
}

/// Part label of a vertex partition `[n] = S ∪ T ∪ R ∪ U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Part {
    S,
    T,
    R,
    U,
}

/// Outcome of conditions (a)-(d) for one partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorollaryReport {
    /// `S` independent and `G[T]` a forest.
    pub a: bool,
    /// `|S| ≥ max{|U|, γ - 11n / ln n}`.
    pub b: bool,
    /// `e(S ∪ T) + e(S ∪ T, R) ≤ |T| + 2|S| - 2|U| - 2γ + 33n / ln n`.
    pub c: bool,
    /// `e(R, T) = 0`.
    pub d: bool,
}

impl CorollaryReport {
    pub fn all(&self) -> bool {
        self.a && self.b && self.c && self.d
    }
}

/// Builds per-vertex labels from four vertex sets, rejecting overlaps and
/// uncovered vertices.
pub fn partition_labels(
    n: usize,
    s: &[Vertex],
    t: &[Vertex],
    r: &[Vertex],
    u: &[Vertex],
) -> Result<Vec<Part>> {
    let mut lab: Vec<Option<Part>> = vec![None; n];
    for (set, part) in [(s, Part::S), (t, Part::T), (r, Part::R), (u, Part::U)] {
        for &x in set {
            let slot = lab
                .get_mut(x as usize)
                .ok_or_else(|| Error::domain("vertex out of range"))?;
            if slot.is_some() {
                return Err(Error::domain("partition parts overlap"));
            }
            *slot = Some(part);
        }
    }
    lab.into_iter()
        .map(|p| p.ok_or_else(|| Error::domain("partition does not cover every vertex")))
        .collect()
}

/// Evaluates conditions (a)-(d) for the partition given by `labels`.
pub fn corollary_partition_check<G: Adjacency + ?Sized>(
    g: &G,
    labels: &[Part],
    gamma: f64,
) -> Result<CorollaryReport> {
    let n = g.vertex_count();
    if labels.len() != n {
        return Err(Error::domain(
            "partition length differs from the vertex count",
        ));
    }
    if n < 2 {
        return Err(Error::domain("need at least two vertices"));
    }
    let count = |p: Part| labels.iter().filter(|&&l| l == p).count() as f64;
    let (s, t, u) = (count(Part::S), count(Part::T), count(Part::U));
    let slack = n as f64 / libm::log(n as f64);

    let mut s_edge = false;
    let mut t_cycle = false;
    let mut e_inside = 0usize;
    let mut e_to_r = 0usize;
    let mut e_rt = 0usize;
    let mut dsu = Dsu::new(n);
    for (a, b) in edges_of(g) {
        let (la, lb) = (labels[a as usize], labels[b as usize]);
        let st = |p: Part| matches!(p, Part::S | Part::T);
        match (la, lb) {
            (Part::S, Part::S) => s_edge = true,
            (Part::T, Part::T) => {
                if !dsu.union(a as usize, b as usize) {
                    t_cycle = true;
                }
            }
            (Part::R, Part::T) | (Part::T, Part::R) => e_rt += 1,
            _ => {}
        }
        if st(la) && st(lb) {
            e_inside += 1;
        } else if (st(la) && lb == Part::R) || (st(lb) && la == Part::R) {
            e_to_r += 1;
        }
    }
    Ok(CorollaryReport {
        a: !s_edge && !t_cycle,
        b: s >= u.max(gamma - 11.0 * slack),
        c: (e_inside + e_to_r) as f64 <= t + 2.0 * s - 2.0 * u - 2.0 * gamma + 33.0 * slack,
        d: e_rt == 0,
    })
}

/// Number of distinct cycles of length at most `len_cap`.
pub fn short_cycle_census<G: Adjacency + ?Sized>(g: &G, len_cap: usize) -> Result<u64> {
    if len_cap > CYCLE_LENGTH_LIMIT {
        return Err(Error::domain("cycle length cap above 20"));
    }
    let n = g.vertex_count();
    if len_cap < 3 {
        return Ok(0);
    }
    // Each cycle is counted from its smallest vertex, once per direction.
    fn go<G: Adjacency + ?Sized>(
        g: &G,
        start: Vertex,
        v: Vertex,
        len: usize,
        cap: usize,
        on: &mut [bool],
    ) -> u64 {
        let mut found = 0;
        for &w in g.neighbors(v) {
            if w == start && len >= 3 {
                found += 1;
            } else if w > start && !on[w as usize] && len < cap {
                on[w as usize] = true;
                found += go(g, start, w, len + 1, cap, on);
                on[w as usize] = false;
            }
        }
        found
    }
    let mut on = vec![false; n];
    let mut total = 0;
    for s in 0..n as Vertex {
        on[s as usize] = true;
        total += go(g, s, s, 1, len_cap, &mut on);
        on[s as usize] = false;
    }
    Ok(total / 2)
}

/// Number of vertex sets `S` with `|S| ≤ max_size` inducing a connected
/// subgraph with `|E(G[S])| ≥ |S|`.
pub fn cyclic_subset_count<G: Adjacency + ?Sized>(g: &G, max_size: usize) -> Result<u64> {
    let n = g.vertex_count();
    if n > CYCLIC_SUBSET_VERTEX_LIMIT {
        return Err(Error::TooLarge {
            what: "vertices",
            limit: CYCLIC_SUBSET_VERTEX_LIMIT,
            got: n,
        });
    }
    let mask_of: Vec<u32> = (0..n as Vertex)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();
    let mut count = 0;
    for set in 1u32..(1u32 << n) {
        let size = set.count_ones() as usize;
        if size > max_size {
            continue;
        }
        let edges: u32 = (0..n)
            .filter(|&v| set >> v & 1 == 1)
            .map(|v| (mask_of[v] & set).count_ones())
            .sum::<u32>()
            / 2;
        if (edges as usize) < size {
            continue;
        }
        let mut reach = 1u32 << set.trailing_zeros();
        loop {
            let next = (0..n)
                .filter(|&v| reach >> v & 1 == 1)
                .fold(reach, |m, v| m | (mask_of[v] & set));
            if next == reach {
                break;
            }
            reach = next;
        }
        if reach == set {
            count += 1;
        }
    }
    Ok(count)
}

/// Short-cycle stand-in for membership in the cyclic family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclicProxy {
    pub len_cap: usize,
    pub cycles: u64,
    /// `n / ln n`.
    pub threshold: f64,
    pub member: bool,
}

/// Counts cycles of length at most `⌊ln n / 10⌋` (or `len_cap` when given)
/// and compares the count against `n / ln n`.
pub fn cyclic_proxy<G: Adjacency + ?Sized>(g: &G, len_cap: Option<usize>) -> Result<CyclicProxy> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::domain("need at least two vertices"));
    }
    let ln = libm::log(n as f64);
    let len_cap = len_cap.unwrap_or((ln / 10.0) as usize);
    let cycles = short_cycle_census(g, len_cap)?;
    let threshold = n as f64 / ln;
    Ok(CyclicProxy {
        len_cap,
        cycles,
        threshold,
        member: cycles as f64 <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SimpleGraph;
    use proptest::prelude::*;

    fn star() -> SimpleGraph {
        SimpleGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa_bruteforce(&SimpleGraph::cycle(5)).unwrap(), 5);
        assert_eq!(kappa_bruteforce(&star()).unwrap(), 2);
        assert_eq!(kappa_bruteforce(&SimpleGraph::complete(4)).unwrap(), 4);
        assert!(matches!(
            kappa_bruteforce(&SimpleGraph::complete(8)),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn kappa_k4_by_subset_enumeration() {
        let g = SimpleGraph::complete(4);
        let e = g.edge_list();
        let best = (0u32..1 << e.len())
            .filter(|m| {
                let mut d = [0; 4];
                for (i, &(a, b)) in e.iter().enumerate() {
                    if m >> i & 1 == 1 {
                        d[a as usize] += 1;
                        d[b as usize] += 1;
                    }
                }
                d.iter().all(|&x| x <= 2)
            })
            .map(|m| m.count_ones())
            .max()
            .unwrap();
        assert_eq!(best, 4);
    }

    #[test]
    fn tutte_berge_examples() {
        let c = tutte_berge_min(&star()).unwrap();
        assert_eq!(c.value, 2);
        assert_eq!(tutte_berge_value(&star(), &[], &[1, 2, 3]), Some(2));
        assert_eq!(tutte_berge_min(&SimpleGraph::cycle(5)).unwrap().value, 5);
        let e = tutte_berge_min(&SimpleGraph::empty(4)).unwrap();
        assert_eq!(e.value, 0);
        assert_eq!(e.s, vec![0, 1, 2, 3]);
        assert_eq!(
            tutte_berge_value(&SimpleGraph::cycle(5), &[], &[0, 1]),
            None
        );
        assert_eq!(tutte_berge_value(&SimpleGraph::cycle(5), &[2], &[2]), None);
        assert!(tutte_berge_min(&SimpleGraph::empty(13)).is_err());
    }

    #[test]
    fn two_factor_iff_kappa_n() {
        assert_eq!(kappa_bruteforce(&SimpleGraph::complete(4)).unwrap(), 4);
        // Two triangles joined by an edge have a 2-factor; a path does not.
        let g =
            SimpleGraph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)])
                .unwrap();
        assert_eq!(kappa_bruteforce(&g).unwrap(), 6);
        let p = SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(kappa_bruteforce(&p).unwrap(), 3);
    }

    #[test]
    fn corollary_examples() {
        let g = SimpleGraph::cycle(6);
        let all_r = vec![Part::R; 6];
        assert!(corollary_partition_check(&g, &all_r, 0.0).unwrap().all());
        let mut lab = all_r.clone();
        lab[0] = Part::S;
        lab[1] = Part::S;
        let rep = corollary_partition_check(&g, &lab, 0.0).unwrap();
        assert!(!rep.a);
        let cyc_t = vec![Part::T; 6];
        assert!(!corollary_partition_check(&g, &cyc_t, 0.0).unwrap().a);
        let mut rt = all_r;
        rt[2] = Part::T;
        assert!(!corollary_partition_check(&g, &rt, 0.0).unwrap().d);
        assert!(corollary_partition_check(&g, &[Part::R; 5], 0.0).is_err());
        assert!(partition_labels(3, &[0], &[0], &[1, 2], &[]).is_err());
        assert!(partition_labels(3, &[0], &[], &[1], &[]).is_err());
        assert_eq!(
            partition_labels(3, &[0], &[2], &[1], &[]).unwrap(),
            vec![Part::S, Part::R, Part::T]
        );
    }

    #[test]
    fn census_examples() {
        assert_eq!(short_cycle_census(&SimpleGraph::cycle(5), 10).unwrap(), 1);
        assert_eq!(short_cycle_census(&SimpleGraph::cycle(5), 4).unwrap(), 0);
        assert_eq!(short_cycle_census(&SimpleGraph::complete(4), 4).unwrap(), 7);
        assert_eq!(short_cycle_census(&SimpleGraph::complete(4), 3).unwrap(), 4);
        assert_eq!(short_cycle_census(&SimpleGraph::complete(4), 1).unwrap(), 0);
        assert!(short_cycle_census(&SimpleGraph::cycle(5), 21).is_err());
    }

    #[test]
    fn cyclic_subsets_of_small_graphs() {
        // K4: the four triangles and the whole vertex set.
        assert_eq!(
            cyclic_subset_count(&SimpleGraph::complete(4), 4).unwrap(),
            5
        );
        assert_eq!(cyclic_subset_count(&SimpleGraph::cycle(5), 4).unwrap(), 0);
        assert_eq!(cyclic_subset_count(&SimpleGraph::cycle(5), 5).unwrap(), 1);
        let p = cyclic_proxy(&SimpleGraph::cycle(5), Some(5)).unwrap();
        assert_eq!(p.cycles, 1);
        assert!(p.member);
    }

    fn arb_graph(max_n: usize, max_e: usize) -> impl Strategy<Value = SimpleGraph> {
        (3..=max_n).prop_flat_map(move |n| {
            proptest::collection::vec((0..n as Vertex, 0..n as Vertex), 0..=max_e)
                .prop_map(move |e| SimpleGraph::from_edges(n, &e).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn kappa_equals_tutte_berge(g in arb_graph(9, 18)) {
            let k = kappa_bruteforce(&g).unwrap();
            prop_assert_eq!(k, tutte_berge_min(&g).unwrap().value);
            prop_assert!(k <= g.vertex_count());
        }

        #[test]
        fn heuristic_never_beats_kappa(g in arb_graph(10, 20)) {
            let f = crate::strategy::build_two_matching(&g);
            prop_assert!(f.is_valid_in(&g));
            prop_assert!(f.edge_count() <= kappa_bruteforce(&g).unwrap());
        }

        #[test]
        fn any_pair_bounds_kappa(g in arb_graph(8, 14), labels in proptest::collection::vec(0u8..3, 8)) {
            let n = g.vertex_count();
            let u: Vec<Vertex> = (0..n).filter(|&i| labels[i] == 1).map(|i| i as Vertex).collect();
            let s: Vec<Vertex> = (0..n).filter(|&i| labels[i] == 2).map(|i| i as Vertex).collect();
            if let Some(v) = tutte_berge_value(&g, &u, &s) {
                prop_assert!(v >= kappa_bruteforce(&g).unwrap());
            }
        }

        #[test]
        fn cyclic_sets_exist_iff_short_cycles(g in arb_graph(9, 14), k in 3usize..7) {
            let sets = cyclic_subset_count(&g, k).unwrap();
            let cycles = short_cycle_census(&g, k).unwrap();
            prop_assert_eq!(sets > 0, cycles > 0);
            prop_assert!(sets >= cycles.min(1));
        }

        #[test]
        fn corollary_counts_match_direct_recount(g in arb_graph(10, 20), raw in proptest::collection::vec(0u8..4, 10), gamma in 0.0f64..4.0) {
            let n = g.vertex_count();
            let parts = [Part::S, Part::T, Part::R, Part::U];
            let lab: Vec<Part> = raw[..n].iter().map(|&i| parts[i as usize]).collect();
            let rep = corollary_partition_check(&g, &lab, gamma).unwrap();
            let e = g.edge_list();
            let is = |v: Vertex, p: Part| lab[v as usize] == p;
            let st = |v: Vertex| is(v, Part::S) || is(v, Part::T);
            let e_st = e.iter().filter(|&&(a, b)| st(a) && st(b)).count();
            let e_st_r = e.iter().filter(|&&(a, b)| (st(a) && is(b, Part::R)) || (st(b) && is(a, Part::R))).count();
            let e_rt = e.iter().filter(|&&(a, b)| (is(a, Part::R) && is(b, Part::T)) || (is(b, Part::R) && is(a, Part::T))).count();
            let cnt = |p: Part| lab.iter().filter(|&&l| l == p).count() as f64;
            let ln = (n as f64).ln();
            prop_assert_eq!(rep.d, e_rt == 0);
            prop_assert_eq!(rep.b, cnt(Part::S) >= cnt(Part::U).max(gamma - 11.0 * n as f64 / ln));
            prop_assert_eq!(rep.c, (e_st + e_st_r) as f64 <= cnt(Part::T) + 2.0 * cnt(Part::S) - 2.0 * cnt(Part::U) - 2.0 * gamma + 33.0 * n as f64 / ln);
            // Forest check through |E| = |V| - components.
            let tv: Vec<Vertex> = (0..n as Vertex).filter(|&v| is(v, Part::T)).collect();
            let te = e.iter().filter(|&&(a, b)| is(a, Part::T) && is(b, Part::T)).count();
            let mut comp = 0;
            let mut seen = vec![false; n];
            for &v in &tv {
                if seen[v as usize] { continue; }
                comp += 1;
                let mut stack = vec![v];
                seen[v as usize] = true;
                while let Some(x) = stack.pop() {
                    for &y in g.neighbors(x) {
                        if is(y, Part::T) && !seen[y as usize] { seen[y as usize] = true; stack.push(y); }
                    }
                }
            }
            let s_indep = !e.iter().any(|&(a, b)| is(a, Part::S) && is(b, Part::S));
            prop_assert_eq!(rep.a, s_indep && te + comp == tv.len());
        }
    }
}
