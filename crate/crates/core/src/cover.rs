//! Cycle covers (2-factors) of simple graphs.
//!
//! The exact decision reduces a 2-factor of `G` to a perfect matching of the
//! Tutte gadget: every vertex `v` of degree `d` becomes `d` external nodes
//! (one per incident edge) plus `d − 2` internal nodes joined to all of
//! them, and each edge `(u, v)` joins the matching external nodes of `u` and
//! `v`. In a perfect matching the internals absorb `d − 2` externals of each
//! vertex, so exactly two edges per vertex are chosen.
//!
//! For complete S-partite graphs `K_y` the community sizes usually decide
//! the answer on their own: `y` outside the edge cone rules out a cover, and
//! `y` in the cone with every nonempty community of size at least 3
//! guarantees one. Only the remaining gaps go to the matching engine.

use serde::Serialize;

use crate::cone::{cone_membership_counts, ConeTest, IncidenceMatrix, Verdict};
use crate::error::{Error, Result};
use crate::graph::{Graph, SampledGraph, SkeletonGraph};
use crate::graphon::build_complete_partite;
use crate::matching::perfect_matching_seeded;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetNode {
    /// End of original edge `(vertex, other)` at `vertex`.
    External {
        vertex: usize,
        other: usize,
    },
    Internal {
        vertex: usize,
    },
}

#[derive(Debug, Clone)]
pub struct GadgetGraph {
    pub graph: Graph,
    pub nodes: Vec<GadgetNode>,
    first_external: Vec<usize>,
}

impl GadgetGraph {
    /// The original edge carried by gadget edge `(a, b)`, if any.
    pub fn back_map(&self, a: usize, b: usize) -> Option<(usize, usize)> {
        match (self.nodes[a], self.nodes[b]) {
            (GadgetNode::External { vertex: u, other: x }, GadgetNode::External { vertex: v, other: y })
                if x == v && y == u =>
            {
                Some((u.min(v), u.max(v)))
            }
            _ => None,
        }
    }

    /// Gadget node of the `k`-th incident edge of `v` (adjacency order).
    pub fn external(&self, v: usize, k: usize) -> usize {
        self.first_external[v] + k
    }

    /// A matching of the gadget that realizes `edges` (each vertex in at
    /// most two of them): the edges' externals are paired across, and the
    /// internals of each vertex take its remaining externals.
    fn seed_from(&self, g: &Graph, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
        let mut used = vec![false; self.nodes.len()];
        let mut pairs = Vec::with_capacity(self.nodes.len() / 2);
        for &(u, v) in edges {
            let a = self.external(u, g.neighbors(u).binary_search(&v).expect("edge of g"));
            let b = self.external(v, g.neighbors(v).binary_search(&u).expect("edge of g"));
            used[a] = true;
            used[b] = true;
            pairs.push((a, b));
        }
        for v in 0..g.node_count() {
            let d = g.degree(v);
            let ext = self.first_external[v];
            let free = (ext..ext + d).filter(|&e| !used[e]);
            for (internal, e) in (ext + d..ext + 2 * d - 2).zip(free) {
                pairs.push((internal, e));
            }
        }
        pairs
    }
}

/// Near-2-factor used to seed the matching: a maximum matching of the
/// bipartite double cover is a set of directed cycles; as undirected edges,
/// every vertex has degree at most 2 and only 2-cycles fall short.
fn double_cover_seed(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.node_count();
    let mut out = vec![NONE; n];
    let mut into = vec![NONE; n];
    for u in 0..n {
        if let Some(&v) = g.neighbors(u).iter().find(|&&v| into[v] == NONE && out[v] != u) {
            out[u] = v;
            into[v] = u;
        }
    }
    let mut seen = vec![0u32; n];
    for (stamp, root) in (1u32..).zip(0..n) {
        if out[root] == NONE {
            augment_double_cover(g, root, stamp, &mut out, &mut into, &mut seen);
        }
    }
    let mut edges: Vec<(usize, usize)> =
        (0..n).filter(|&u| out[u] != NONE).map(|u| (u.min(out[u]), u.max(out[u]))).collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

const NONE: usize = usize::MAX;

/// Kuhn augmenting search from the free left vertex `root`, iterative.
fn augment_double_cover(g: &Graph, root: usize, stamp: u32, out: &mut [usize], into: &mut [usize], seen: &mut [u32]) {
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    let mut via: Vec<usize> = Vec::new();
    while let Some(top) = stack.last_mut() {
        let (u, idx) = *top;
        if idx == g.degree(u) {
            stack.pop();
            via.pop();
            continue;
        }
        top.1 += 1;
        let v = g.neighbors(u)[idx];
        if seen[v] == stamp {
            continue;
        }
        seen[v] = stamp;
        via.push(v);
        if into[v] == NONE {
            for (&(l, _), &r) in stack.iter().zip(&via) {
                out[l] = r;
                into[r] = l;
            }
            return;
        }
        stack.push((into[v], 0));
    }
}

pub fn build_tutte_gadget(g: &Graph) -> Result<GadgetGraph> {
    let n = g.node_count();
    if let Some(v) = (0..n).find(|&v| g.degree(v) < 2) {
        return Err(Error::LowDegree { vertex: v, degree: g.degree(v) });
    }
    // externals of v are laid out in adjacency order, internals follow
    let mut nodes = Vec::new();
    let mut first_external = vec![0; n];
    for v in 0..n {
        first_external[v] = nodes.len();
        nodes.extend(g.neighbors(v).iter().map(|&w| GadgetNode::External { vertex: v, other: w }));
        nodes.extend((0..g.degree(v) - 2).map(|_| GadgetNode::Internal { vertex: v }));
    }
    let mut adjacency = vec![Vec::new(); nodes.len()];
    for v in 0..n {
        let d = g.degree(v);
        let ext = first_external[v];
        for i in 0..d - 2 {
            let internal = ext + d + i;
            for e in ext..ext + d {
                adjacency[internal].push(e);
                adjacency[e].push(internal);
            }
        }
        for (k, &w) in g.neighbors(v).iter().enumerate() {
            if w > v {
                let k_w = g.neighbors(w).binary_search(&v).expect("symmetric adjacency");
                let a = ext + k;
                let b = first_external[w] + k_w;
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
    }
    for list in adjacency.iter_mut() {
        list.sort_unstable();
    }
    Ok(GadgetGraph { graph: Graph::from_sorted_adjacency(adjacency), nodes, first_external })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    DegreePrecheck,
    ConeNecessity,
    LemmaKySufficiency,
    ExactMatching,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCoverVerdict {
    pub exists: bool,
    pub method: Method,
    /// Node-disjoint cycles covering every node, when requested and found.
    pub witness: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
    Unknown,
}

/// Decides whether `K_y` has a cycle cover from `y` alone, when possible.
pub fn decide_complete_partite(skeleton: &SkeletonGraph, y: &[usize], z: &IncidenceMatrix) -> Decision {
    decide_complete_partite_with(skeleton, y, &ConeTest::lp_only(z))
}

/// As [`decide_complete_partite`], with a prepared membership test.
pub fn decide_complete_partite_with(skeleton: &SkeletonGraph, y: &[usize], cone: &ConeTest<'_>) -> Decision {
    decide_complete_partite_with_method(skeleton, y, cone).0
}

fn decide_complete_partite_with_method(
    skeleton: &SkeletonGraph,
    y: &[usize],
    cone: &ConeTest<'_>,
) -> (Decision, Method) {
    let n: usize = y.iter().sum();
    if n <= 2 {
        return (Decision::No, Method::DegreePrecheck);
    }
    // degree of a node in community i within K_y
    for (i, &yi) in y.iter().enumerate() {
        if yi == 0 {
            continue;
        }
        let own = if skeleton.has_self_loop(i) { yi - 1 } else { 0 };
        let degree = own + skeleton.neighbors(i).map(|j| y[j]).sum::<usize>();
        if degree < 2 {
            return (Decision::No, Method::DegreePrecheck);
        }
    }
    if !cone.contains_counts(y) {
        return (Decision::No, Method::ConeNecessity);
    }
    // A certificate Zc = y with c >= 0 vanishes on edges touching empty
    // communities, so it lives on the skeleton induced by the nonempty ones.
    if y.iter().all(|&yi| yi == 0 || yi >= 3) {
        return (Decision::Yes, Method::LemmaKySufficiency);
    }
    (Decision::Unknown, Method::ExactMatching)
}

/// Skeleton context for graphs sampled from a graphon.
#[derive(Debug, Clone, Copy)]
pub struct CoverContext<'a> {
    pub skeleton: &'a SkeletonGraph,
    pub incidence: &'a IncidenceMatrix,
    /// The graph is known to be the complete S-partite graph of its
    /// community sizes (all block values 0 or 1).
    pub complete: bool,
}

/// Layered cycle-cover decision.
///
/// 1. Fewer than 3 nodes or a vertex of degree < 2: no.
/// 2. With skeleton context: community sizes outside the edge cone rule
///    out a cover for any S-partite graph; for `K_y` the size-based
///    decision is used when it is conclusive.
/// 3. Otherwise the Tutte gadget has a perfect matching iff a cover exists.
///
/// A witness is only produced by the exact path, so requesting one skips
/// the shortcuts that answer "yes".
pub fn has_cycle_cover(g: &SampledGraph, context: Option<CoverContext<'_>>, want_witness: bool) -> CycleCoverVerdict {
    let no = |method| CycleCoverVerdict { exists: false, method, witness: None };
    if g.node_count() < 3 || g.graph.min_degree().unwrap_or(0) < 2 {
        return no(Method::DegreePrecheck);
    }
    if let Some(ctx) = context {
        let y = g.community_sizes(ctx.skeleton.q());
        if ctx.complete {
            match decide_complete_partite_with_method(ctx.skeleton, &y, &ConeTest::lp_only(ctx.incidence)) {
                (Decision::No, method) => return no(method),
                (Decision::Yes, method) if !want_witness => {
                    return CycleCoverVerdict { exists: true, method, witness: None }
                }
                _ => {}
            }
        } else if cone_membership_counts(ctx.incidence, &y).expect("dimensions agree").verdict == Verdict::Outside {
            return no(Method::ConeNecessity);
        }
    }
    exact_cycle_cover(&g.graph, want_witness)
}

/// Cycle cover of a bare graph through the gadget reduction.
pub fn exact_cycle_cover(g: &Graph, want_witness: bool) -> CycleCoverVerdict {
    if g.node_count() < 3 || g.min_degree().unwrap_or(0) < 2 {
        return CycleCoverVerdict { exists: false, method: Method::DegreePrecheck, witness: None };
    }
    let gadget = build_tutte_gadget(g).expect("degrees checked");
    let seed = gadget.seed_from(g, &double_cover_seed(g));
    let matching = perfect_matching_seeded(&gadget.graph, &seed);
    let witness = match (&matching, want_witness) {
        (Some(m), true) => {
            let chosen: Vec<(usize, usize)> =
                m.pairs().into_iter().filter_map(|(a, b)| gadget.back_map(a, b)).collect();
            Some(cycles_from_two_regular(g.node_count(), &chosen))
        }
        _ => None,
    };
    CycleCoverVerdict { exists: matching.is_some(), method: Method::ExactMatching, witness }
}

/// Splits a 2-regular spanning edge set into its cycles.
fn cycles_from_two_regular(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::with_capacity(2); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut prev = start;
        let mut cur = adj[start][0];
        while cur != start {
            seen[cur] = true;
            cycle.push(cur);
            let next = if adj[cur][0] != prev { adj[cur][0] } else { adj[cur][1] };
            prev = cur;
            cur = next;
        }
        cycles.push(cycle);
    }
    cycles
}

/// Independent check that `cycles` is a cycle cover of `g`.
pub fn verify_witness(g: &Graph, cycles: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; g.node_count()];
    for cycle in cycles {
        if cycle.len() < 3 {
            return false;
        }
        for (i, &v) in cycle.iter().enumerate() {
            if v >= seen.len() || seen[v] {
                return false;
            }
            seen[v] = true;
            let next = cycle[(i + 1) % cycle.len()];
            if !g.has_edge(v, next) {
                return false;
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Exhaustive 2-factor search for graphs with at most 12 nodes.
///
/// Repeatedly takes the lowest vertex still short of degree 2 and tries
/// every way to complete it with unused edges to higher vertices.
pub fn brute_force_two_factor(g: &Graph) -> Result<bool> {
    let n = g.node_count();
    if n > 12 {
        return Err(Error::OracleTooLarge(n));
    }
    if n == 0 {
        return Ok(false);
    }
    let mut need = vec![2u8; n];
    Ok(search(g, &mut need))
}

/// The brute-force answer as a verdict.
pub fn oracle_cycle_cover(g: &Graph) -> Result<CycleCoverVerdict> {
    Ok(CycleCoverVerdict { exists: brute_force_two_factor(g)?, method: Method::Oracle, witness: None })
}

fn search(g: &Graph, need: &mut [u8]) -> bool {
    let Some(v) = (0..need.len()).find(|&v| need[v] > 0) else {
        return true;
    };
    let candidates: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| w > v && need[w] > 0).collect();
    match need[v] {
        1 => {
            for &w in &candidates {
                need[v] -= 1;
                need[w] -= 1;
                let ok = search(g, need);
                need[v] += 1;
                need[w] += 1;
                if ok {
                    return true;
                }
            }
            false
        }
        _ => {
            for (i, &a) in candidates.iter().enumerate() {
                for &b in &candidates[i + 1..] {
                    need[v] = 0;
                    need[a] -= 1;
                    need[b] -= 1;
                    let ok = search(g, need);
                    need[v] = 2;
                    need[a] += 1;
                    need[b] += 1;
                    if ok {
                        return true;
                    }
                }
            }
            false
        }
    }
}

/// `K_y` through the exact path, for callers that only hold community sizes.
pub fn complete_partite_has_cycle_cover(skeleton: &SkeletonGraph, y: &[usize], cone: &ConeTest<'_>) -> bool {
    match decide_complete_partite_with(skeleton, y, cone) {
        Decision::Yes => true,
        Decision::No => false,
        Decision::Unknown => exact_cycle_cover(&build_complete_partite(skeleton, y).graph, false).exists,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::incidence_matrix;
    use crate::matching::perfect_matching;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges).unwrap()
    }

    fn plain(g: Graph) -> SampledGraph {
        let n = g.node_count();
        SampledGraph { graph: g, community: vec![0; n] }
    }

    fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        graph(10, &e)
    }

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        graph(n, &e)
    }

    #[test]
    fn gadget_sizes() {
        let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let gad = build_tutte_gadget(&c4).unwrap();
        assert_eq!(gad.graph.node_count(), 8);
        assert_eq!(gad.graph.edge_count(), 4);
        assert!(gad.graph.edges().all(|(a, b)| gad.back_map(a, b).is_some()));

        let k4 = build_tutte_gadget(&complete(4)).unwrap();
        assert_eq!(k4.graph.node_count(), 4 * 6 - 2 * 4);

        let k3 = build_tutte_gadget(&complete(3)).unwrap();
        assert_eq!(k3.graph.node_count(), 6);
        assert_eq!(k3.graph.edge_count(), 3);
        assert!(perfect_matching(&k3.graph).is_some());

        let path = graph(3, &[(0, 1), (1, 2)]);
        assert!(matches!(build_tutte_gadget(&path), Err(Error::LowDegree { vertex: 0, degree: 1 })));
    }

    #[test]
    fn verdict_examples() {
        let tri = plain(complete(3));
        assert!(has_cycle_cover(&tri, None, false).exists);
        let path = plain(graph(3, &[(0, 1), (1, 2)]));
        let v = has_cycle_cover(&path, None, false);
        assert!(!v.exists);
        assert_eq!(v.method, Method::DegreePrecheck);
        let k23 = plain(graph(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]));
        assert!(!has_cycle_cover(&k23, None, false).exists);
        assert!(!brute_force_two_factor(&k23.graph).unwrap());

        let two = plain(graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]));
        let v = has_cycle_cover(&two, None, true);
        assert!(v.exists);
        let mut w = v.witness.unwrap();
        for c in w.iter_mut() {
            c.sort();
        }
        w.sort();
        assert_eq!(w, vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn brute_force_examples() {
        assert!(brute_force_two_factor(&graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])).unwrap());
        assert!(!brute_force_two_factor(&graph(4, &[(0, 1), (0, 2), (0, 3)])).unwrap());
        assert!(brute_force_two_factor(&petersen()).unwrap());
        assert_eq!(oracle_cycle_cover(&petersen()).unwrap().method, Method::Oracle);
        assert!(matches!(brute_force_two_factor(&Graph::empty(13)), Err(Error::OracleTooLarge(13))));
    }

    #[test]
    fn petersen_witness() {
        let v = exact_cycle_cover(&petersen(), true);
        assert!(v.exists);
        let w = v.witness.unwrap();
        assert!(verify_witness(&petersen(), &w));
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn witness_checker_rejects_bad_covers() {
        let k4 = complete(4);
        assert!(verify_witness(&k4, &[vec![0, 1, 2, 3]]));
        assert!(!verify_witness(&k4, &[vec![0, 1, 2]]));
        assert!(!verify_witness(&k4, &[vec![0, 1], vec![2, 3]]));
        assert!(!verify_witness(&graph(4, &[(0, 1), (1, 2), (2, 3)]), &[vec![0, 1, 2, 3]]));
    }

    #[test]
    fn complete_partite_decisions() {
        let fig2 = SkeletonGraph::from_edges(3, &[(0, 0), (0, 1), (0, 2), (1, 2)]);
        let z = incidence_matrix(&fig2);
        assert_eq!(decide_complete_partite(&fig2, &[3, 3, 3], &z), Decision::Yes);

        let edge = SkeletonGraph::from_edges(2, &[(0, 1)]);
        let ze = incidence_matrix(&edge);
        assert_eq!(decide_complete_partite(&edge, &[3, 5], &ze), Decision::No);
        assert_eq!(decide_complete_partite(&edge, &[2, 2], &ze), Decision::Unknown);
        assert!(complete_partite_has_cycle_cover(&edge, &[2, 2], &ConeTest::new(&ze)));
        assert_eq!(decide_complete_partite(&edge, &[1, 1], &ze), Decision::No);
        assert_eq!(decide_complete_partite(&edge, &[0, 3], &ze), Decision::No);

        let looped = SkeletonGraph::from_edges(1, &[(0, 0)]);
        let zl = incidence_matrix(&looped);
        assert_eq!(decide_complete_partite(&looped, &[2], &zl), Decision::No);
        assert_eq!(decide_complete_partite(&looped, &[3], &zl), Decision::Yes);
    }

    #[test]
    fn context_paths_agree_with_exact() {
        let fig2 = SkeletonGraph::from_edges(3, &[(0, 0), (0, 1), (0, 2), (1, 2)]);
        let z = incidence_matrix(&fig2);
        let ctx = CoverContext { skeleton: &fig2, incidence: &z, complete: true };
        for y in [[3usize, 3, 3], [1, 5, 2], [0, 4, 4], [0, 3, 4], [2, 1, 6], [1, 1, 1]] {
            let g = build_complete_partite(&fig2, &y);
            let fast = has_cycle_cover(&g, Some(ctx), false);
            let exact = exact_cycle_cover(&g.graph, false);
            assert_eq!(fast.exists, exact.exists, "{y:?} via {:?}", fast.method);
        }
    }
}
