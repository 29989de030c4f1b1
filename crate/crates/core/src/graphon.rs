//! Step-graphons: validation, the JSON file format, derived quantities, and
//! the bundled catalog used by the experiments.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, SampledGraph, SkeletonGraph};
use crate::rational::{format_rational, int, parse_rational, ratio, Rational};

/// A graphon that is constant on each rectangle of a partition of `[0,1]²`.
///
/// `sigma` holds the `q + 1` breakpoints `0 = σ_0 < … < σ_q = 1` and
/// `values[i][j]` the block value on community pair `(i, j)` (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepGraphon {
    name: String,
    sigma: Vec<Rational>,
    values: Vec<Vec<Rational>>,
}

#[derive(Serialize, Deserialize)]
struct GraphonDocument {
    name: String,
    sigma: Vec<String>,
    values: Vec<Vec<String>>,
}

impl StepGraphon {
    pub fn new(name: impl Into<String>, sigma: Vec<Rational>, values: Vec<Vec<Rational>>) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidGraphon(msg));
        if sigma.len() < 2 {
            return invalid("sigma needs at least two breakpoints (q >= 1)".into());
        }
        if !sigma[0].is_zero() {
            return invalid(format!("sigma[0] = {} must be 0", format_rational(&sigma[0])));
        }
        let q = sigma.len() - 1;
        if !sigma[q].is_one() {
            return invalid(format!("sigma[{q}] = {} must be 1", format_rational(&sigma[q])));
        }
        for i in 1..=q {
            if sigma[i] <= sigma[i - 1] {
                return invalid(format!("sigma not strictly increasing at index {i}"));
            }
        }
        if values.len() != q {
            return invalid(format!("values has {} rows, expected {q}", values.len()));
        }
        for (i, row) in values.iter().enumerate() {
            if row.len() != q {
                return invalid(format!("values row {} has {} entries, expected {q}", i + 1, row.len()));
            }
            for (j, v) in row.iter().enumerate() {
                if v < &Rational::zero() || v > &Rational::one() {
                    return invalid(format!("value {} outside [0,1] at ({}, {})", format_rational(v), i + 1, j + 1));
                }
            }
        }
        for i in 0..q {
            for j in i + 1..q {
                if values[i][j] != values[j][i] {
                    return invalid(format!("values not symmetric at ({}, {})", i + 1, j + 1));
                }
            }
        }
        Ok(StepGraphon { name: name.into(), sigma, values })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn q(&self) -> usize {
        self.values.len()
    }

    pub fn sigma(&self) -> &[Rational] {
        &self.sigma
    }

    pub fn values(&self) -> &[Vec<Rational>] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> &Rational {
        &self.values[i][j]
    }

    /// Community containing coordinate `s`; the last block is closed at 1.
    pub fn community_of(&self, s: &Rational) -> usize {
        let q = self.q();
        (0..q).find(|&i| s < &self.sigma[i + 1]).unwrap_or(q - 1)
    }

    /// `W(s, t)` for `s, t` in `[0, 1]`.
    pub fn evaluate(&self, s: &Rational, t: &Rational) -> &Rational {
        &self.values[self.community_of(s)][self.community_of(t)]
    }

    /// True when every block value is 0 or 1, so that a sampled graph is the
    /// complete S-partite graph of its community sizes.
    pub fn is_zero_one(&self) -> bool {
        self.values.iter().flatten().all(|v| v.is_zero() || v.is_one())
    }

    /// `δ = min p_ij` over skeleton edges. `None` for an all-zero graphon.
    pub fn min_edge_value(&self) -> Option<Rational> {
        self.values.iter().flatten().filter(|v| !v.is_zero()).min().cloned()
    }

    /// Concentration vector `x*` with `x*_i = σ_i − σ_{i−1}`.
    pub fn concentration_vector(&self) -> Vec<Rational> {
        self.sigma.windows(2).map(|w| &w[1] - &w[0]).collect()
    }

    /// Edge `(i, j)` iff the block value is nonzero; self-loops included.
    pub fn skeleton_graph(&self) -> SkeletonGraph {
        let adjacency = self.values.iter().map(|row| row.iter().map(|v| !v.is_zero()).collect()).collect();
        SkeletonGraph::from_adjacency(adjacency).expect("values are symmetric")
    }

    /// Replaces every community with a nonzero diagonal block by two halves of
    /// equal width whose mutual block carries the old diagonal value and whose
    /// own diagonal blocks are zero. The halves stay adjacent and community
    /// order is preserved. The result is pointwise below `self` and its
    /// skeleton has no self-loops.
    pub fn split_self_loops(&self) -> StepGraphon {
        let q = self.q();
        let split: Vec<bool> = (0..q).map(|i| !self.values[i][i].is_zero()).collect();
        if !split.iter().any(|&s| s) {
            return self.clone();
        }
        let x = self.concentration_vector();
        let half = ratio(1, 2);
        // (original community, half index) for each new community
        let mut origin = Vec::new();
        let mut sigma = vec![Rational::zero()];
        for i in 0..q {
            if split[i] {
                for h in 0..2 {
                    origin.push((i, h));
                    let next = sigma.last().unwrap() + &x[i] * &half;
                    sigma.push(next);
                }
            } else {
                origin.push((i, 0));
                sigma.push(self.sigma[i + 1].clone());
            }
        }
        *sigma.last_mut().unwrap() = Rational::one();
        let values = origin
            .iter()
            .map(|&(a, ha)| {
                origin
                    .iter()
                    .map(
                        |&(b, hb)| {
                            if a == b && split[a] && ha == hb {
                                Rational::zero()
                            } else {
                                self.values[a][b].clone()
                            }
                        },
                    )
                    .collect()
            })
            .collect();
        StepGraphon::new(format!("{}-split", self.name), sigma, values).expect("splitting preserves validity")
    }

    pub fn to_json(&self) -> String {
        let doc = GraphonDocument {
            name: self.name.clone(),
            sigma: self.sigma.iter().map(format_rational).collect(),
            values: self.values.iter().map(|row| row.iter().map(format_rational).collect()).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("plain document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        parse_graphon(text)
    }
}

/// Parses the JSON graphon format: `{"name", "sigma", "values"}` with entries
/// written as rational strings such as `"3/10"`.
pub fn parse_graphon(text: &str) -> Result<StepGraphon> {
    let doc: GraphonDocument = serde_json::from_str(text).map_err(|e| Error::Syntax(e.to_string()))?;
    let sigma = doc
        .sigma
        .iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s).map_err(|e| Error::Syntax(format!("sigma[{i}]: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let values = doc
        .values
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, s)| {
                    parse_rational(s).map_err(|e| Error::Syntax(format!("values at ({}, {}): {e}", i + 1, j + 1)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    StepGraphon::new(doc.name, sigma, values)
}

/// Complete S-partite graph `K_y`: nodes are laid out community by
/// community, and two distinct nodes are adjacent iff their communities are
/// adjacent in `skeleton` (same community only through a self-loop).
pub fn build_complete_partite(skeleton: &SkeletonGraph, y: &[usize]) -> SampledGraph {
    assert_eq!(skeleton.q(), y.len(), "one size per community");
    let community: Vec<usize> = y.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c)).collect();
    let n = community.len();
    let mut start = Vec::with_capacity(y.len());
    let mut acc = 0;
    for &c in y {
        start.push(acc);
        acc += c;
    }
    let adjacency = (0..n)
        .map(|u| {
            let cu = community[u];
            let mut list = Vec::new();
            for j in 0..y.len() {
                if skeleton.adjacent(cu, j) {
                    list.extend((start[j]..start[j] + y[j]).filter(|&v| v != u));
                }
            }
            list
        })
        .collect();
    SampledGraph { graph: Graph::from_sorted_adjacency(adjacency), community }
}

pub const CATALOG_NAMES: [&str; 12] = ["fig1", "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k"];

/// The bundled graphons. All take value 1 on their support.
///
/// * `fig1`: three communities with loops at the outer two, widths .3/.3/.4.
/// * `a`–`f`: loop at community 1 plus the triangle, with
///   `x* = (2α, 1−α, 1−α)/2` for α ∈ {1/2, 1/4, 1/8} and
///   `x* = (1−β, 2β, 1−β)/2` for β ∈ {3/4, 5/8, 18/32}.
/// * `g`–`j`: two communities joined only to each other, first width
///   7/16, 3/8, 1/4, 1/2.
/// * `k`: six communities, triangle 1-2-3 with pendant communities 4, 5, 6
///   hanging off 1, 2, 3.
pub fn catalog(name: &str) -> Result<StepGraphon> {
    let one = || int(1);
    let zero = || int(0);
    let from_pattern = |name: &str, widths: Vec<Rational>, edges: &[(usize, usize)]| {
        let q = widths.len();
        let mut sigma = vec![zero()];
        for w in &widths {
            let next = sigma.last().unwrap() + w;
            sigma.push(next);
        }
        let mut values = vec![vec![zero(); q]; q];
        for &(i, j) in edges {
            values[i][j] = one();
            values[j][i] = one();
        }
        StepGraphon::new(name, sigma, values)
    };
    let triangle_with_loop = [(0, 0), (0, 1), (0, 2), (1, 2)];
    let inside = |alpha: Rational| vec![alpha.clone(), (one() - &alpha) / int(2), (one() - alpha) / int(2)];
    let outside = |beta: Rational| vec![(one() - &beta) / int(2), beta.clone(), (one() - beta) / int(2)];
    let two_block = |s: Rational| vec![s.clone(), one() - s];
    match name {
        "fig1" => from_pattern(name, vec![ratio(3, 10), ratio(3, 10), ratio(2, 5)], &[(0, 0), (0, 1), (1, 2), (2, 2)]),
        "a" => from_pattern(name, inside(ratio(1, 2)), &triangle_with_loop),
        "b" => from_pattern(name, inside(ratio(1, 4)), &triangle_with_loop),
        "c" => from_pattern(name, inside(ratio(1, 8)), &triangle_with_loop),
        "d" => from_pattern(name, outside(ratio(3, 4)), &triangle_with_loop),
        "e" => from_pattern(name, outside(ratio(5, 8)), &triangle_with_loop),
        "f" => from_pattern(name, outside(ratio(18, 32)), &triangle_with_loop),
        "g" => from_pattern(name, two_block(ratio(7, 16)), &[(0, 1)]),
        "h" => from_pattern(name, two_block(ratio(3, 8)), &[(0, 1)]),
        "i" => from_pattern(name, two_block(ratio(1, 4)), &[(0, 1)]),
        "j" => from_pattern(name, two_block(ratio(1, 2)), &[(0, 1)]),
        "k" => from_pattern(
            name,
            vec![ratio(1, 4), ratio(1, 4), ratio(1, 8), ratio(1, 8), ratio(1, 8), ratio(1, 8)],
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 4), (2, 5)],
        ),
        other => Err(Error::UnknownGraphon(other.to_string())),
    }
}

/// Resolves a catalog name or reads a graphon file.
pub fn load_graphon(source: &str) -> Result<StepGraphon> {
    match catalog(source) {
        Ok(w) => Ok(w),
        Err(Error::UnknownGraphon(_)) if std::path::Path::new(source).exists() => {
            parse_graphon(&std::fs::read_to_string(source)?)
        }
        Err(e) => Err(e),
    }
}
