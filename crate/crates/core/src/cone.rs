//! Edge-cone geometry.
//!
//! The edge cone `X` of a skeleton graph is generated by the incidence
//! vectors `z = (e_i + e_j)/2`, one per skeleton edge, with a self-loop at
//! `u_i` giving `e_i`. Everything here is exact: membership is decided by a
//! rational LP and facet normals are primitive integer vectors.

use itertools_lite::combinations;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SkeletonGraph;
use crate::graphon::StepGraphon;
use crate::linalg::{integer_rank, null_vector, rank};
use crate::lp::{maximize, LpOutcome};
use crate::rational::{int, primitive_integer_vector, ratio, Rational};

/// The generators of the edge cone, one column per skeleton edge in
/// canonical (lexicographic) edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    q: usize,
    edges: Vec<(usize, usize)>,
}

pub fn incidence_matrix(skeleton: &SkeletonGraph) -> IncidenceMatrix {
    IncidenceMatrix { q: skeleton.q(), edges: skeleton.edges() }
}

impl IncidenceMatrix {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `2 z_j` as an integer vector.
    pub fn doubled_column(&self, j: usize) -> Vec<i64> {
        let (a, b) = self.edges[j];
        let mut col = vec![0; self.q];
        col[a] += 1;
        col[b] += 1;
        col
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        self.doubled_column(j).into_iter().map(|v| ratio(v, 2)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rational>> {
        (0..self.len()).map(|j| self.column(j)).collect()
    }

    /// `q × k` matrix, row-major.
    pub fn rows(&self) -> Vec<Vec<Rational>> {
        let cols = self.columns();
        (0..self.q).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
    }
}

/// True iff the skeleton has a self-loop or a non-bipartite component.
pub fn has_odd_cycle(skeleton: &SkeletonGraph) -> bool {
    let q = skeleton.q();
    if (0..q).any(|i| skeleton.has_self_loop(i)) {
        return true;
    }
    let mut color: Vec<Option<bool>> = vec![None; q];
    for root in 0..q {
        if color[root].is_some() {
            continue;
        }
        color[root] = Some(false);
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            let ci = color[i].unwrap();
            for j in skeleton.neighbors(i) {
                match color[j] {
                    None => {
                        color[j] = Some(!ci);
                        stack.push(j);
                    }
                    Some(cj) if cj == ci => return true,
                    Some(_) => {}
                }
            }
        }
    }
    false
}

/// Dimension of the edge cone, i.e. the rank of `Z` over the rationals.
pub fn cone_dimension(z: &IncidenceMatrix) -> usize {
    let rows: Vec<Vec<i64>> = (0..z.q).map(|i| (0..z.len()).map(|j| z.doubled_column(j)[i]).collect()).collect();
    integer_rank(&rows).unwrap_or_else(|| rank(&z.rows()))
}

/// Dimension predicted from the cycle structure for a connected skeleton:
/// `q` with an odd cycle, `q − 1` otherwise.
pub fn predicted_dimension(skeleton: &SkeletonGraph) -> Result<usize> {
    if !skeleton.is_connected() {
        return Err(Error::DisconnectedSkeleton);
    }
    let q = skeleton.q();
    Ok(if has_odd_cycle(skeleton) { q } else { q - 1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Outside,
    Boundary,
    Interior,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Conic coefficients `c ≥ 0` with `Zc = x`.
    Coefficients(Vec<Rational>),
    /// `w` with `wᵀz_j ≥ 0` for all generators and `wᵀx < 0`.
    Separator(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeMembership {
    pub verdict: Verdict,
    pub certificate: Certificate,
}

/// Tri-state membership of `x` in the edge cone.
///
/// Solves `max t  s.t.  Zc = x, c_j ≥ t` exactly. Infeasible means Outside;
/// an optimum `t* > 0` means `x` is a strictly positive combination of all
/// generators, i.e. lies in the relative interior; `t* = 0` means Boundary.
pub fn cone_membership(z: &IncidenceMatrix, x: &[Rational]) -> Result<ConeMembership> {
    if x.len() != z.q {
        return Err(Error::DimensionMismatch { expected: z.q, got: x.len() });
    }
    let k = z.len();
    if k == 0 {
        let verdict = if x.iter().all(Zero::is_zero) { Verdict::Boundary } else { Verdict::Outside };
        let certificate = match verdict {
            Verdict::Outside => Certificate::Separator(x.iter().map(|v| -v).collect()),
            _ => Certificate::Coefficients(Vec::new()),
        };
        return Ok(ConeMembership { verdict, certificate });
    }
    // Variables: t, s_1..s_k with c = t·1 + s.
    let zr = z.rows();
    let a: Vec<Vec<Rational>> = zr
        .iter()
        .map(|row| {
            let mut r = Vec::with_capacity(k + 1);
            r.push(row.iter().sum());
            r.extend(row.iter().cloned());
            r
        })
        .collect();
    let mut cost = vec![Rational::zero(); k + 1];
    cost[0] = Rational::one();
    match maximize(&a, x, &cost) {
        LpOutcome::Infeasible { farkas } => {
            Ok(ConeMembership { verdict: Verdict::Outside, certificate: Certificate::Separator(farkas) })
        }
        LpOutcome::Unbounded => unreachable!("1ᵀx bounds t because every generator sums to 1"),
        LpOutcome::Optimal { x: sol, value } => {
            let t = sol[0].clone();
            let coefficients: Vec<Rational> = sol[1..].iter().map(|s| s + &t).collect();
            let verdict = if value.is_positive() { Verdict::Interior } else { Verdict::Boundary };
            Ok(ConeMembership { verdict, certificate: Certificate::Coefficients(coefficients) })
        }
    }
}

/// Integer-vector membership, e.g. for community sizes `y`.
pub fn cone_membership_counts(z: &IncidenceMatrix, y: &[usize]) -> Result<ConeMembership> {
    let x: Vec<Rational> = y.iter().map(|&v| int(v as i64)).collect();
    cone_membership(z, &x)
}

/// Supporting hyperplanes spanned by `q − 1` independent generators.
/// Exact in/out test for integer points, set up once per cone.
///
/// A full-dimensional cone is the intersection of its facet half-spaces,
/// and every facet is spanned by generators, so integer normals decide
/// membership without an LP. Lower-dimensional cones, or cones with too many
/// generator subsets to enumerate, fall back to the LP.
#[derive(Debug, Clone)]
pub struct ConeTest<'a> {
    z: &'a IncidenceMatrix,
    normals: Option<Vec<Vec<i64>>>,
}

const FACET_SUBSET_LIMIT: u128 = 20_000;

impl<'a> ConeTest<'a> {
    pub fn new(z: &'a IncidenceMatrix) -> Self {
        let q = z.q();
        let affordable = q >= 2 && binomial(z.len() as u128, (q - 1) as u128) <= FACET_SUBSET_LIMIT;
        let normals =
            (affordable && cone_dimension(z) == q).then(|| facet_hyperplanes(z).ok()).flatten().and_then(|f| {
                f.normals
                    .iter()
                    .map(|v| v.iter().map(|x| x.to_i64()).collect::<Option<Vec<i64>>>())
                    .collect::<Option<Vec<_>>>()
            });
        ConeTest { z, normals }
    }

    /// Always answers through the LP.
    pub fn lp_only(z: &'a IncidenceMatrix) -> Self {
        ConeTest { z, normals: None }
    }

    pub fn incidence(&self) -> &IncidenceMatrix {
        self.z
    }

    pub fn uses_facets(&self) -> bool {
        self.normals.is_some()
    }

    pub fn contains_counts(&self, y: &[usize]) -> bool {
        match &self.normals {
            Some(normals) => {
                normals.iter().all(|v| v.iter().zip(y).map(|(&a, &b)| a as i128 * b as i128).sum::<i128>() >= 0)
            }
            None => cone_membership_counts(self.z, y).expect("dimensions agree").verdict != Verdict::Outside,
        }
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetSet {
    pub normals: Vec<Vec<BigInt>>,
    /// Indices into `normals` vanishing at a reference point, once computed.
    pub active: Option<Vec<usize>>,
}

/// Enumerates facet-defining hyperplanes by brute force over `(q−1)`-subsets
/// of generators. Each subset of full rank `q − 1` gives a normal line; each
/// orientation on which every generator has a nonnegative product is kept.
/// Normals are primitive integer vectors, deduplicated, in sorted order.
pub fn facet_hyperplanes(z: &IncidenceMatrix) -> Result<FacetSet> {
    let q = z.q;
    if q < 2 {
        return Err(Error::UnsupportedDimension(q));
    }
    let columns = z.columns();
    let mut normals: Vec<Vec<BigInt>> = Vec::new();
    for subset in combinations(columns.len(), q - 1) {
        let rows: Vec<Vec<Rational>> = subset.iter().map(|&j| columns[j].clone()).collect();
        let Some(v) = null_vector(&rows) else {
            continue;
        };
        let v = primitive_integer_vector(&v);
        for oriented in [v.clone(), v.iter().map(|x| -x).collect()] {
            let supporting = columns.iter().all(|c| !dot_int(&oriented, c).is_negative());
            if supporting && !normals.contains(&oriented) {
                normals.push(oriented);
            }
        }
    }
    normals.sort();
    Ok(FacetSet { normals, active: None })
}

pub fn dot_int(v: &[BigInt], x: &[Rational]) -> Rational {
    v.iter().zip(x).map(|(a, b)| b * Rational::from_integer(a.clone())).sum()
}

impl FacetSet {
    /// Records which normals vanish at `xstar`.
    pub fn with_active(mut self, xstar: &[Rational]) -> Self {
        self.active = Some(
            self.normals.iter().enumerate().filter(|(_, v)| dot_int(v, xstar).is_zero()).map(|(i, _)| i).collect(),
        );
        self
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn normals_f64(&self) -> Vec<Vec<f64>> {
        self.normals.iter().map(|v| v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect()
    }
}

/// The facets whose hyperplanes contain `xstar`: `H(x*)`.
pub fn active_facets(facets: &FacetSet, z: &IncidenceMatrix, xstar: &[Rational]) -> Result<FacetSet> {
    if cone_membership(z, xstar)?.verdict == Verdict::Outside {
        return Err(Error::Precondition("active facets need x* inside the edge cone".into()));
    }
    let normals: Vec<Vec<BigInt>> = facets.normals.iter().filter(|v| dot_int(v, xstar).is_zero()).cloned().collect();
    let active = Some((0..normals.len()).collect());
    Ok(FacetSet { normals, active })
}

pub const AFFINE_TOLERANCE: f64 = 1e-9;

/// `Ω* = {ω ∈ L : vᵀω ≥ 0 for every active normal v}` evaluated in floating
/// point, with the active normals pre-converted.
#[derive(Debug, Clone)]
pub struct OmegaStar {
    normals: Vec<Vec<f64>>,
}

impl OmegaStar {
    pub fn new(active: &FacetSet) -> Self {
        OmegaStar { normals: active.normals_f64() }
    }

    pub fn facet_count(&self) -> usize {
        self.normals.len()
    }

    /// Closed half-spaces, no epsilon. The caller guarantees `ω ∈ L`.
    pub fn contains_unchecked(&self, omega: &[f64]) -> bool {
        self.normals.iter().all(|v| v.iter().zip(omega).map(|(a, b)| a * b).sum::<f64>() >= 0.0)
    }

    pub fn contains(&self, omega: &[f64]) -> Result<bool> {
        let sum: f64 = omega.iter().sum();
        if (sum - 1.0).abs() > AFFINE_TOLERANCE {
            return Err(Error::OffAffineHyperplane { sum });
        }
        Ok(self.contains_unchecked(omega))
    }
}

/// Membership of `omega` in `Ω*` for the given active facet set.
pub fn in_omega_star(active: &FacetSet, omega: &[f64]) -> Result<bool> {
    OmegaStar::new(active).contains(omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// `T_n(x) = √n (x − x*) + x*` and its inverse `(ω − x*)/√n + x*`.
pub fn transform_tn(x: &[f64], xstar: &[f64], n: u64, direction: Direction) -> Vec<f64> {
    assert_eq!(x.len(), xstar.len(), "dimension mismatch");
    assert!(n >= 1, "n must be positive");
    let root = (n as f64).sqrt();
    x.iter()
        .zip(xstar)
        .map(|(&xi, &si)| match direction {
            Direction::Forward => root * (xi - si) + si,
            Direction::Inverse => (xi - si) / root + si,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Item1,
    Item2,
    Item3,
    Item4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PredictedRate {
    ExpToOne,
    ExpToZero,
    RootNToZero,
    RootNToPStar,
}

impl Regime {
    pub fn from_conditions(cond_a: bool, cond_b_prime: bool, cond_b: bool) -> Regime {
        if !cond_b_prime {
            Regime::Item2
        } else if !cond_a {
            Regime::Item3
        } else if cond_b {
            Regime::Item1
        } else {
            Regime::Item4
        }
    }

    pub fn predicted_rate(self) -> PredictedRate {
        match self {
            Regime::Item1 => PredictedRate::ExpToOne,
            Regime::Item2 => PredictedRate::ExpToZero,
            Regime::Item3 => PredictedRate::RootNToZero,
            Regime::Item4 => PredictedRate::RootNToPStar,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    #[serde(rename = "condA")]
    pub cond_a: bool,
    #[serde(rename = "condBprime")]
    pub cond_b_prime: bool,
    #[serde(rename = "condB")]
    pub cond_b: bool,
    pub regime: Regime,
    pub predicted_rate: PredictedRate,
    #[serde(skip)]
    pub membership: Verdict,
}

/// Classifies a graphon into one of the four convergence regimes:
/// A = odd cycle in S, B' = x* ∈ X, B = x* ∈ int X.
pub fn classify_regime(w: &StepGraphon) -> Result<RegimeReport> {
    let skeleton = w.skeleton_graph();
    if !skeleton.is_connected() {
        return Err(Error::DisconnectedSkeleton);
    }
    let z = incidence_matrix(&skeleton);
    let membership = cone_membership(&z, &w.concentration_vector())?.verdict;
    let cond_a = has_odd_cycle(&skeleton);
    let cond_b_prime = membership != Verdict::Outside;
    let cond_b = membership == Verdict::Interior;
    let regime = Regime::from_conditions(cond_a, cond_b_prime, cond_b);
    Ok(RegimeReport { cond_a, cond_b_prime, cond_b, regime, predicted_rate: regime.predicted_rate(), membership })
}

/// Minimal k-subset enumeration, in lexicographic order.
mod itertools_lite {
    pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if k > n {
            return out;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.clone());
            let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
                return out;
            };
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
}
