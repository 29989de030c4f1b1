//! Seeded randomness and the samplers built on it.
//!
//! Every random quantity in the crate is drawn from an [`RngStream`]
//! (xoshiro256** seeded through a SplitMix64 expansion). Streams for
//! independent trials or shards are derived from a master seed and integer
//! labels with [`derive_trial_seed`], so results never depend on how work is
//! scheduled across threads.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256StarStar;
use rayon::prelude::*;
use serde::Serialize;

use crate::cone::{active_facets, classify_regime, facet_hyperplanes, incidence_matrix, OmegaStar, Regime};
use crate::error::{Error, Result};
use crate::graph::{Graph, SampledGraph};
use crate::graphon::StepGraphon;
use crate::rational::{to_f64, Rational};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `labels` into `master` with the SplitMix64 finalizer. For fixed
/// labels the map is a bijection of the master seed, and it is sensitive to
/// label order.
pub fn derive_trial_seed(master: u64, labels: &[u64]) -> u64 {
    labels.iter().fold(mix64(master ^ GOLDEN_GAMMA), |h, &label| {
        mix64(h.wrapping_add(GOLDEN_GAMMA) ^ mix64(label.wrapping_add(GOLDEN_GAMMA)))
    })
}

/// Stable 64-bit label for a graphon name (FNV-1a).
pub fn name_label(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// A deterministic random stream: identical seeds give identical sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    inner: Xoshiro256StarStar,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { inner: Xoshiro256StarStar::seed_from_u64(seed) }
    }

    pub fn derived(master: u64, labels: &[u64]) -> Self {
        Self::new(derive_trial_seed(master, labels))
    }

    /// Uniform integer in `[0, 2^53)`.
    pub fn next_53(&mut self) -> u64 {
        self.inner.next_u64() >> 11
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        self.next_53() as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

/// `ceil(p · 2^53)`: a 53-bit draw `m` satisfies `m / 2^53 < p` exactly
/// when `m < threshold(p)`.
fn threshold(p: &Rational) -> u64 {
    let scaled = p * Rational::from_integer(BigInt::from(1u64 << 53));
    scaled.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

/// Inverse-CDF categorical sampler with exact rational cut points.
#[derive(Debug, Clone)]
pub struct CategoricalSampler {
    cut: Vec<u64>,
}

impl CategoricalSampler {
    pub fn new(weights: &[Rational]) -> Self {
        let mut acc = Rational::zero();
        let mut cut = Vec::with_capacity(weights.len());
        for w in weights {
            acc += w;
            cut.push(threshold(&acc));
        }
        if let Some(last) = cut.last_mut() {
            *last = 1u64 << 53;
        }
        CategoricalSampler { cut }
    }

    pub fn categories(&self) -> usize {
        self.cut.len()
    }

    pub fn draw(&self, rng: &mut RngStream) -> usize {
        let m = rng.next_53();
        self.cut.iter().position(|&c| m < c).unwrap_or(self.cut.len() - 1)
    }

    /// Counts of `n` independent draws.
    pub fn counts(&self, n: usize, rng: &mut RngStream) -> Vec<usize> {
        let mut y = vec![0; self.cut.len()];
        for _ in 0..n {
            y[self.draw(rng)] += 1;
        }
        y
    }
}

/// `y ~ Multinomial(n, x*)`, realized as `n` categorical draws.
pub fn sample_community_sizes(xstar: &[Rational], n: usize, rng: &mut RngStream) -> Vec<usize> {
    CategoricalSampler::new(xstar).counts(n, rng)
}

/// Samples `G_n ~ W`.
///
/// Community sizes are drawn first; nodes are then laid out community by
/// community (node labels are exchangeable, so this is the same law as
/// labelling nodes in draw order). Each pair `i < j` then receives an edge
/// with probability `p_{c(i) c(j)}`; blocks with value 0 or 1 consume no
/// randomness, so a 0/1 graphon yields exactly `K_y`.
pub fn sample_graph(w: &StepGraphon, n: usize, rng: &mut RngStream) -> SampledGraph {
    let q = w.q();
    let y = sample_community_sizes(&w.concentration_vector(), n, rng);
    let community: Vec<usize> = y.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c)).collect();
    let cut: Vec<Vec<u64>> = (0..q).map(|i| (0..q).map(|j| threshold(w.value(i, j))).collect()).collect();
    let full = 1u64 << 53;
    let mut adjacency = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            let c = cut[community[u]][community[v]];
            let present = if c == 0 {
                false
            } else if c >= full {
                true
            } else {
                rng.next_53() < c
            };
            if present {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
    }
    SampledGraph { graph: Graph::from_sorted_adjacency(adjacency), community }
}

/// The Gaussian limit `ω* ~ N(x*, Σ)`, `Σ = diag(x*) − x* x*ᵀ`, with a
/// factor `U` (`q × (q−1)`) such that `Σ = U Uᵀ`.
#[derive(Debug, Clone)]
pub struct GaussianModel {
    pub xstar: DVector<f64>,
    pub sigma: DMatrix<f64>,
    pub factor: DMatrix<f64>,
}

/// Builds the factor from the spectral decomposition of `Σ`, keeping the
/// `q − 1` leading eigenvectors scaled by the root eigenvalues.
pub fn build_gaussian(xstar: &[f64]) -> Result<GaussianModel> {
    let q = xstar.len();
    if q == 0 || xstar.iter().any(|&v| v.is_nan() || v <= 0.0) || (xstar.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::NotProbabilityVector);
    }
    let x = DVector::from_column_slice(xstar);
    let sigma = DMatrix::from_diagonal(&x) - &x * x.transpose();
    let eigen = SymmetricEigen::new(sigma.clone());
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));
    let mut factor = DMatrix::zeros(q, q - 1);
    for (col, &k) in order.iter().take(q - 1).enumerate() {
        let scale = eigen.eigenvalues[k].max(0.0).sqrt();
        let mut v = eigen.eigenvectors.column(k).into_owned();
        // fix the sign so that the first nonzero entry is positive
        if let Some(first) = v.iter().find(|e| e.abs() > 1e-12) {
            if *first < 0.0 {
                v = -v;
            }
        }
        factor.set_column(col, &(v * scale));
    }
    Ok(GaussianModel { xstar: x, sigma, factor })
}

impl GaussianModel {
    pub fn q(&self) -> usize {
        self.xstar.len()
    }

    /// `x* + U g` written into `out`.
    pub fn sample_into(&self, rng: &mut RngStream, g: &mut [f64], out: &mut [f64]) {
        for gi in g.iter_mut() {
            *gi = rng.standard_normal();
        }
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = self.xstar[i];
            for (k, gk) in g.iter().enumerate() {
                acc += self.factor[(i, k)] * gk;
            }
            *o = acc;
        }
    }
}

/// One draw of `ω*`.
pub fn sample_omega_star(model: &GaussianModel, rng: &mut RngStream) -> Vec<f64> {
    let q = model.q();
    let mut g = vec![0.0; q.saturating_sub(1)];
    let mut out = vec![0.0; q];
    model.sample_into(rng, &mut g, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PStarEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PStarEstimate {
    fn exact(mean: f64, note: &str) -> Self {
        PStarEstimate { mean, stderr: 0.0, samples: 0, note: Some(note.to_string()) }
    }

    fn from_counts(hits: u64, samples: u64) -> Self {
        let mean = hits as f64 / samples as f64;
        PStarEstimate { mean, stderr: (mean * (1.0 - mean) / samples as f64).sqrt(), samples, note: None }
    }
}

pub const DEFAULT_PSTAR_SAMPLES: u64 = 1_000_000;
const PSTAR_SHARD: u64 = 1 << 16;
const PSTAR_LABEL: u64 = 0x70_7374_6172; // "pstar"

/// Monte-Carlo estimate of `p* = P(ω* ∈ Ω*)`.
///
/// Interior concentration vectors return exactly 1 and degenerate (bipartite)
/// cones exactly 0 without sampling; x* outside the cone is an error since
/// `Ω*` is then undefined. Samples are split into fixed-size shards with
/// derived seeds and run on the current rayon pool.
pub fn estimate_p_star(w: &StepGraphon, num_samples: u64, master_seed: u64) -> Result<PStarEstimate> {
    let report = classify_regime(w)?;
    match report.regime {
        Regime::Item1 => return Ok(PStarEstimate::exact(1.0, "x* interior to the edge cone: Omega* = L")),
        Regime::Item2 => return Err(Error::OmegaStarUndefined),
        Regime::Item3 => {
            return Ok(PStarEstimate::exact(0.0, "degenerate edge cone: Omega* is a slab of Gaussian measure zero"))
        }
        Regime::Item4 => {}
    }
    if num_samples == 0 {
        return Err(Error::Precondition("num_samples must be positive".into()));
    }
    let xstar = w.concentration_vector();
    let z = incidence_matrix(&w.skeleton_graph());
    let active = active_facets(&facet_hyperplanes(&z)?, &z, &xstar)?;
    let omega = OmegaStar::new(&active);
    let xs: Vec<f64> = xstar.iter().map(to_f64).collect();
    let model = build_gaussian(&xs)?;
    let shards = num_samples.div_ceil(PSTAR_SHARD);
    let hits: u64 = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let count = PSTAR_SHARD.min(num_samples - shard * PSTAR_SHARD);
            let mut rng = RngStream::derived(master_seed, &[PSTAR_LABEL, name_label(w.name()), shard]);
            let q = model.q();
            let mut g = vec![0.0; q - 1];
            let mut out = vec![0.0; q];
            let mut hits = 0u64;
            for _ in 0..count {
                model.sample_into(&mut rng, &mut g, &mut out);
                if omega.contains_unchecked(&out) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    Ok(PStarEstimate::from_counts(hits, num_samples))
}
