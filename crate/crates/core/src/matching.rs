//! Maximum-cardinality matching in general graphs (Edmonds' blossom
//! algorithm, BFS formulation with base contraction).

use std::collections::VecDeque;

use crate::graph::Graph;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    mate: Vec<usize>,
}

impl Matching {
    pub fn mate(&self, v: usize) -> Option<usize> {
        (self.mate[v] != NONE).then_some(self.mate[v])
    }

    /// Matched pairs `(u, v)` with `u < v`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.mate.iter().enumerate().filter(|&(u, &v)| v != NONE && u < v).map(|(u, &v)| (u, v)).collect()
    }

    pub fn size(&self) -> usize {
        self.mate.iter().filter(|&&v| v != NONE).count() / 2
    }

    pub fn is_perfect(&self) -> bool {
        self.mate.iter().all(|&v| v != NONE)
    }
}

struct Blossom<'g> {
    graph: &'g Graph,
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    on_path: Vec<u32>,
    stamp: u32,
    queue: VecDeque<usize>,
}

impl<'g> Blossom<'g> {
    fn new(graph: &'g Graph, seed: &[(usize, usize)]) -> Self {
        let n = graph.node_count();
        let mut mate = vec![NONE; n];
        for &(u, v) in seed {
            debug_assert!(graph.has_edge(u, v) && mate[u] == NONE && mate[v] == NONE);
            mate[u] = v;
            mate[v] = u;
        }
        // greedy start, low-degree vertices first
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| graph.degree(v));
        for &v in &order {
            if mate[v] != NONE {
                continue;
            }
            if let Some(&w) = graph.neighbors(v).iter().filter(|&&w| mate[w] == NONE).min_by_key(|&&w| graph.degree(w))
            {
                mate[v] = w;
                mate[w] = v;
            }
        }
        Blossom {
            graph,
            mate,
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            on_path: vec![0; n],
            stamp: 0,
            queue: VecDeque::new(),
        }
    }

    fn lca(&mut self, mut a: usize, mut b: usize) -> usize {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.on_path.iter_mut().for_each(|x| *x = 0);
            self.stamp = 1;
        }
        loop {
            a = self.base[a];
            self.on_path[a] = self.stamp;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if self.on_path[b] == self.stamp {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// Searches an augmenting path from the free vertex `root`; returns its
    /// free endpoint.
    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.mate.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for idx in 0..self.graph.degree(v) {
                let to = self.graph.neighbors(v)[idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    self.queue.push_back(next);
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let ppv = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = ppv;
        }
    }

    /// Augments from every free vertex. With `stop_on_failure`, returns as
    /// soon as some vertex is certified to stay unmatched.
    fn run(&mut self, stop_on_failure: bool) -> bool {
        let mut all = true;
        for v in 0..self.mate.len() {
            if self.mate[v] != NONE {
                continue;
            }
            match self.find_path(v) {
                Some(end) => self.augment(end),
                None => {
                    all = false;
                    if stop_on_failure {
                        return false;
                    }
                }
            }
        }
        all
    }
}

/// Maximum-cardinality matching.
pub fn max_matching(graph: &Graph) -> Matching {
    let mut b = Blossom::new(graph, &[]);
    b.run(false);
    Matching { mate: b.mate }
}

/// A perfect matching if one exists. Stops at the first vertex that no
/// augmenting path can reach, since such a vertex stays exposed in every
/// maximum matching.
pub fn perfect_matching(graph: &Graph) -> Option<Matching> {
    perfect_matching_seeded(graph, &[])
}

/// As [`perfect_matching`], starting from the disjoint edges `seed`.
pub fn perfect_matching_seeded(graph: &Graph, seed: &[(usize, usize)]) -> Option<Matching> {
    if graph.node_count() % 2 == 1 {
        return None;
    }
    let mut b = Blossom::new(graph, seed);
    b.run(true).then_some(Matching { mate: b.mate })
}
