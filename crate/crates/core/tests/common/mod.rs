#![allow(dead_code)]

use std::collections::HashSet;

use graphon_cover::graph::Graph;
use graphon_cover::graphon::{catalog, StepGraphon, CATALOG_NAMES};
use graphon_cover::rational::{ratio, Rational};
use graphon_cover::stochastic::RngStream;
use num_traits::Zero;

/// Catalog graphons with every nonzero block set to 1/2.
pub fn half_variant(w: &StepGraphon) -> StepGraphon {
    let values = w
        .values()
        .iter()
        .map(|row| row.iter().map(|v| if v.is_zero() { Rational::zero() } else { ratio(1, 2) }).collect())
        .collect();
    StepGraphon::new(format!("{}-half", w.name()), w.sigma().to_vec(), values).unwrap()
}

pub fn catalog_all() -> Vec<StepGraphon> {
    CATALOG_NAMES.iter().map(|n| catalog(n).unwrap()).collect()
}

pub fn experiment_catalog() -> Vec<StepGraphon> {
    CATALOG_NAMES.iter().filter(|&&n| n != "fig1").map(|n| catalog(n).unwrap()).collect()
}

pub fn random_graph(rng: &mut RngStream, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.uniform() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Adjacency as bitmasks, one per node.
fn masks(g: &Graph) -> Vec<u16> {
    (0..g.node_count()).map(|u| g.neighbors(u).iter().fold(0u16, |m, &v| m | 1 << v)).collect()
}

/// Canonical code of a graph on at most 11 nodes: the smallest upper-triangle
/// bit string over all orderings that respect the stable colour-refinement
/// partition. Refinement colours are isomorphism invariant, so this is a
/// true canonical form.
pub fn canonical_code(g: &Graph) -> u64 {
    let n = g.node_count();
    let adj = masks(g);
    let mut colour: Vec<usize> = (0..n).map(|u| g.degree(u)).collect();
    loop {
        let sig: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|u| {
                let mut c: Vec<usize> = g.neighbors(u).iter().map(|&v| colour[v]).collect();
                c.sort_unstable();
                (colour[u], c)
            })
            .collect();
        let mut distinct = sig.clone();
        distinct.sort();
        distinct.dedup();
        let next: Vec<usize> = sig.iter().map(|s| distinct.binary_search(s).unwrap()).collect();
        let stable = distinct.len() == {
            let mut c = colour.clone();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        colour = next;
        if stable {
            break;
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&u| colour[u]);
    for &u in &order {
        match classes.last_mut() {
            Some(c) if colour[c[0]] == colour[u] => c.push(u),
            _ => classes.push(vec![u]),
        }
    }
    let mut best = u64::MAX;
    let mut perm = Vec::with_capacity(n);
    search_orderings(&classes, 0, &mut perm, &adj, &mut best);
    best
}

fn search_orderings(classes: &[Vec<usize>], k: usize, perm: &mut Vec<usize>, adj: &[u16], best: &mut u64) {
    if k == classes.len() {
        let n = perm.len();
        let mut code = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                code = code << 1 | ((adj[perm[i]] >> perm[j]) & 1) as u64;
            }
        }
        *best = (*best).min(code);
        return;
    }
    permute(&classes[k], 0, &mut classes[k].clone(), &mut |p| {
        let base = perm.len();
        perm.extend_from_slice(p);
        search_orderings(classes, k + 1, perm, adj, best);
        perm.truncate(base);
    });
}

fn permute(orig: &[usize], i: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if i == orig.len() {
        f(cur);
        return;
    }
    for j in i..cur.len() {
        cur.swap(i, j);
        permute(orig, i + 1, cur, f);
        cur.swap(i, j);
    }
}

/// All connected simple graphs on `1..=max_n` nodes up to isomorphism,
/// grouped by node count. Every connected graph has a vertex whose removal
/// keeps it connected, so extending the connected graphs on `n − 1` nodes
/// by one vertex with a nonempty neighbourhood reaches all of them.
pub fn connected_graphs(max_n: usize) -> Vec<Vec<Graph>> {
    let mut levels = vec![vec![Graph::empty(1)]];
    for n in 2..=max_n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in levels.last().unwrap() {
            let base: Vec<(usize, usize)> = g.edges().collect();
            for subset in 1u32..(1 << (n - 1)) {
                let mut edges = base.clone();
                edges.extend((0..n - 1).filter(|&v| subset >> v & 1 == 1).map(|v| (v, n - 1)));
                let h = Graph::from_edges(n, &edges).unwrap();
                if seen.insert(canonical_code(&h)) {
                    next.push(h);
                }
            }
        }
        levels.push(next);
    }
    levels
}
