//! Plain graph containers: simple graphs, skeleton graphs with self-loops,
//! and community-labelled samples.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Simple undirected graph on nodes `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adjacency: vec![Vec::new(); n], edge_count: 0 }
    }

    /// Builds a simple graph, rejecting self-loops, duplicate edges and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::EdgeList(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::EdgeList(format!("self-loop at {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::EdgeList(format!("duplicate edge at node {u}")));
            }
        }
        Ok(Graph { adjacency, edge_count: edges.len() })
    }

    /// Builds from adjacency lists that are already symmetric, sorted and
    /// loop-free. Only checked in debug builds.
    pub(crate) fn from_sorted_adjacency(adjacency: Vec<Vec<usize>>) -> Self {
        debug_assert!(adjacency.iter().enumerate().all(|(u, l)| {
            l.windows(2).all(|w| w[0] < w[1]) && l.iter().all(|&v| v != u && adjacency[v].binary_search(&u).is_ok())
        }));
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        Graph { adjacency, edge_count }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.adjacency.iter().map(Vec::len).min()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }
}

/// Graph on the `q` communities of a step-graphon. Self-loops are allowed and
/// mean the community's diagonal block is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonGraph {
    adjacency: Vec<Vec<bool>>,
}

impl SkeletonGraph {
    pub fn from_adjacency(adjacency: Vec<Vec<bool>>) -> Result<Self> {
        let q = adjacency.len();
        for (i, row) in adjacency.iter().enumerate() {
            if row.len() != q {
                return Err(Error::DimensionMismatch { expected: q, got: row.len() });
            }
            for j in 0..i {
                if row[j] != adjacency[j][i] {
                    return Err(Error::InvalidGraphon(format!(
                        "skeleton adjacency not symmetric at ({}, {})",
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(SkeletonGraph { adjacency })
    }

    /// Edge pairs are 0-based; `(i, i)` is a self-loop.
    pub fn from_edges(q: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![vec![false; q]; q];
        for &(i, j) in edges {
            adjacency[i][j] = true;
            adjacency[j][i] = true;
        }
        SkeletonGraph { adjacency }
    }

    pub fn q(&self) -> usize {
        self.adjacency.len()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }

    pub fn has_self_loop(&self, i: usize) -> bool {
        self.adjacency[i][i]
    }

    pub fn self_loop_count(&self) -> usize {
        (0..self.q()).filter(|&i| self.adjacency[i][i]).count()
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adjacency
    }

    /// Canonical edge order: lexicographic in `(min, max)` endpoint.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let q = self.q();
        let mut out = Vec::new();
        for i in 0..q {
            for j in i..q {
                if self.adjacency[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Neighbors of `i` other than itself.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.q()).filter(move |&j| j != i && self.adjacency[i][j])
    }

    pub fn is_connected(&self) -> bool {
        let q = self.q();
        if q == 0 {
            return true;
        }
        let mut seen = vec![false; q];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in self.neighbors(i) {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Skeleton induced on `keep` (indices into the original node set).
    pub fn induced(&self, keep: &[usize]) -> SkeletonGraph {
        let adjacency = keep.iter().map(|&i| keep.iter().map(|&j| self.adjacency[i][j]).collect()).collect();
        SkeletonGraph { adjacency }
    }
}

/// A graph sampled from a step-graphon together with the community of each
/// node. Communities are 0-based indices into the graphon's partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledGraph {
    pub graph: Graph,
    pub community: Vec<usize>,
}

impl SampledGraph {
    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// `y(G)`: number of nodes in each of the `q` communities.
    pub fn community_sizes(&self, q: usize) -> Vec<usize> {
        let mut y = vec![0; q];
        for &c in &self.community {
            y[c] += 1;
        }
        y
    }

    /// `x(G) = y(G) / n`.
    pub fn empirical_concentration(&self, q: usize) -> Vec<f64> {
        let n = self.node_count().max(1) as f64;
        self.community_sizes(q).into_iter().map(|c| c as f64 / n).collect()
    }

    /// True when every edge joins communities adjacent in `skeleton`, i.e. the
    /// community map is a homomorphism onto the skeleton.
    pub fn is_s_partite(&self, skeleton: &SkeletonGraph) -> bool {
        self.graph.edges().all(|(u, v)| skeleton.adjacent(self.community[u], self.community[v]))
    }
}

/// Reads the edge-list format: a line `n m`, then `m` lines `i j` with
/// 0-based endpoints. Blank lines and `#` comments are ignored.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let pair = |line: usize, l: &str| -> Result<(usize, usize)> {
        let mut it = l.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
            _ => Err(Error::EdgeList(format!("line {line}: expected two non-negative integers, got {l:?}"))),
        }
    };
    let (line, header) = lines.next().ok_or_else(|| Error::EdgeList("empty input".into()))?;
    let (n, m) = pair(line, header)?;
    let edges = lines.map(|(line, l)| pair(line, l)).collect::<Result<Vec<_>>>()?;
    if edges.len() != m {
        return Err(Error::EdgeList(format!("header announces {m} edges, found {}", edges.len())));
    }
    Graph::from_edges(n, &edges)
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.node_count(), g.edge_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
