//! Seeded sweeps of the empirical cycle-cover probability and the
//! least-squares rate fits built on them.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::cone::{classify_regime, incidence_matrix, ConeTest, IncidenceMatrix, Regime};
use crate::cover::{complete_partite_has_cycle_cover, has_cycle_cover, CoverContext};
use crate::error::{Error, Result};
use crate::graph::SkeletonGraph;
use crate::graphon::StepGraphon;
use crate::stochastic::{name_label, sample_graph, CategoricalSampler, PStarEstimate, RngStream};

pub const DEFAULT_TRIALS: u64 = 20_000;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub graphon: StepGraphon,
    pub n_list: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub out_dir: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(graphon: StepGraphon, n_list: Vec<usize>, trials: u64, seed: u64, workers: usize) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if workers == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        if n_list.is_empty() {
            return Err(Error::Config("n list is empty".into()));
        }
        if n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n list must be positive and strictly increasing".into()));
        }
        Ok(SweepConfig { graphon, n_list, trials, seed, workers, out_dir: None })
    }

    pub fn with_out_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.out_dir = Some(dir.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialBatch {
    pub n: usize,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub stderr: f64,
    /// `p_hat` is 0 or 1, so the log transforms are undefined.
    pub flagged: bool,
}

impl TrialBatch {
    pub fn from_counts(n: usize, trials: u64, successes: u64) -> Self {
        let p_hat = successes as f64 / trials as f64;
        TrialBatch {
            n,
            trials,
            successes,
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
            flagged: successes == 0 || successes == trials,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub graphon: String,
    pub batches: Vec<TrialBatch>,
}

/// Per-graphon data shared by all trials.
struct TrialSetup<'w> {
    graphon: &'w StepGraphon,
    skeleton: SkeletonGraph,
    incidence: IncidenceMatrix,
    sampler: CategoricalSampler,
    label: u64,
}

impl<'w> TrialSetup<'w> {
    fn new(graphon: &'w StepGraphon) -> Self {
        let skeleton = graphon.skeleton_graph();
        let incidence = incidence_matrix(&skeleton);
        TrialSetup {
            graphon,
            sampler: CategoricalSampler::new(&graphon.concentration_vector()),
            skeleton,
            incidence,
            label: name_label(graphon.name()),
        }
    }

    fn rng(&self, n: usize, trial: u64, seed: u64) -> RngStream {
        RngStream::derived(seed, &[self.label, n as u64, trial])
    }

    /// One full trial: sample `G_n` and decide it.
    fn trial(&self, n: usize, trial: u64, seed: u64) -> bool {
        let g = sample_graph(self.graphon, n, &mut self.rng(n, trial, seed));
        let ctx = CoverContext { skeleton: &self.skeleton, incidence: &self.incidence, complete: false };
        has_cycle_cover(&g, Some(ctx), false).exists
    }

    /// Community sizes of one trial. For a 0/1 graphon `sample_graph` draws
    /// exactly these from the stream and then builds `K_y` deterministically.
    fn sizes(&self, n: usize, trial: u64, seed: u64) -> Vec<usize> {
        self.sampler.counts(n, &mut self.rng(n, trial, seed))
    }

    fn batch(&self, n: usize, trials: u64, seed: u64) -> TrialBatch {
        let successes = if self.graphon.is_zero_one() {
            // many trials share the same y; decide each distinct y once
            let tally = (0..trials)
                .into_par_iter()
                .fold(HashMap::new, |mut m: HashMap<Vec<usize>, u64>, t| {
                    *m.entry(self.sizes(n, t, seed)).or_default() += 1;
                    m
                })
                .reduce(HashMap::new, |mut a, b| {
                    for (y, c) in b {
                        *a.entry(y).or_default() += c;
                    }
                    a
                });
            let distinct: Vec<(Vec<usize>, u64)> = tally.into_iter().collect();
            let cone = ConeTest::new(&self.incidence);
            distinct
                .par_iter()
                .filter(|(y, _)| complete_partite_has_cycle_cover(&self.skeleton, y, &cone))
                .map(|(_, c)| c)
                .sum()
        } else {
            (0..trials).into_par_iter().filter(|&t| self.trial(n, t, seed)).count() as u64
        };
        TrialBatch::from_counts(n, trials, successes)
    }
}

/// Runs `trials` seeded trials of `G_n ~ W` on the current rayon pool.
pub fn empirical_probability(w: &StepGraphon, n: usize, trials: u64, master_seed: u64) -> TrialBatch {
    TrialSetup::new(w).batch(n, trials, master_seed)
}

/// Runs every `n` of the config on a pool of `config.workers` threads.
/// Each trial has its own derived seed, so the counts do not depend on the
/// number of workers.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let setup = TrialSetup::new(&config.graphon);
    let mut batches = Vec::with_capacity(config.n_list.len());
    for &n in &config.n_list {
        let batch = pool.install(|| setup.batch(n, config.trials, config.seed));
        eprintln!(
            "[sweep] {} n={} successes={}/{} p_hat={}",
            config.graphon.name(),
            n,
            batch.successes,
            batch.trials,
            format_g(batch.p_hat)
        );
        batches.push(batch);
    }
    Ok(SweepResult { graphon: config.graphon.name().to_string(), batches })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FitCoordinates {
    LogPvsN,
    Log1mPvsN,
    LogPvsLogN,
    LogAbsDevVsLogN,
}

impl FitCoordinates {
    pub fn for_regime(regime: Regime) -> Self {
        match regime {
            Regime::Item1 => FitCoordinates::Log1mPvsN,
            Regime::Item2 => FitCoordinates::LogPvsN,
            Regime::Item3 => FitCoordinates::LogPvsLogN,
            Regime::Item4 => FitCoordinates::LogAbsDevVsLogN,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FitCoordinates::LogPvsN => "LogPvsN",
            FitCoordinates::Log1mPvsN => "Log1mPvsN",
            FitCoordinates::LogPvsLogN => "LogPvsLogN",
            FitCoordinates::LogAbsDevVsLogN => "LogAbsDevVsLogN",
        }
    }

    /// Transformed point for a batch, or `None` where the log is undefined.
    pub fn transform(self, n: usize, p: f64, pstar: f64) -> Option<(f64, f64)> {
        let n = n as f64;
        let (x, y) = match self {
            FitCoordinates::LogPvsN => (n, p.ln()),
            FitCoordinates::Log1mPvsN => (n, (1.0 - p).ln()),
            FitCoordinates::LogPvsLogN => (n.ln(), p.ln()),
            FitCoordinates::LogAbsDevVsLogN => (n.ln(), (p - pstar).abs().ln()),
        };
        (x.is_finite() && y.is_finite()).then_some((x, y))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub coordinates: FitCoordinates,
    pub points_used: usize,
    pub residual_rms: f64,
    #[serde(skip)]
    pub points: Vec<(f64, f64)>,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(points: &[(f64, f64)], coordinates: FitCoordinates) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} point(s), need at least 2", points.len())));
    }
    let m = points.len() as f64;
    let x_mean = points.iter().map(|p| p.0).sum::<f64>() / m;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - x_mean).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - x_mean) * (p.1 - y_mean)).sum();
    let scale = points.iter().map(|p| p.0.abs()).fold(0.0, f64::max).max(1.0);
    if sxx <= (f64::EPSILON * scale).powi(2) * m {
        return Err(Error::DegenerateFit("x values do not vary".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sse: f64 = points.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    Ok(FitResult {
        slope,
        intercept,
        coordinates,
        points_used: points.len(),
        residual_rms: (sse / m).sqrt(),
        points: points.to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub graphon: String,
    pub regime: Regime,
    pub fit: FitResult,
    /// The fitted slope should be negative in every regime.
    pub expected_negative_slope: bool,
    /// `−1/2` in the root-n regimes.
    pub theoretical_exponent: Option<f64>,
    pub p_star: Option<f64>,
}

/// Fits the sweep in the coordinates matching the graphon's regime,
/// skipping saturated batches.
pub fn rate_report(w: &StepGraphon, sweep: &SweepResult, pstar: Option<&PStarEstimate>) -> Result<RateReport> {
    if sweep.batches.is_empty() {
        return Err(Error::Precondition("empty sweep".into()));
    }
    let regime = classify_regime(w)?.regime;
    let coordinates = FitCoordinates::for_regime(regime);
    let p_star = match (regime, pstar) {
        (Regime::Item4, None) => return Err(Error::Precondition("Item4 fit needs a p* estimate".into())),
        (Regime::Item4, Some(p)) => Some(p.mean),
        _ => None,
    };
    let unflagged: Vec<&TrialBatch> = sweep.batches.iter().filter(|b| !b.flagged).collect();
    if unflagged.is_empty() {
        return Err(Error::DegenerateFit("every batch has p_hat 0 or 1".into()));
    }
    let points: Vec<(f64, f64)> =
        unflagged.iter().filter_map(|b| coordinates.transform(b.n, b.p_hat, p_star.unwrap_or(0.0))).collect();
    let fit = linear_fit(&points, coordinates)?;
    Ok(RateReport {
        graphon: w.name().to_string(),
        regime,
        fit,
        expected_negative_slope: true,
        theoretical_exponent: matches!(regime, Regime::Item3 | Regime::Item4).then_some(-0.5),
        p_star,
    })
}

/// `printf("%.10g")`.
pub fn format_g(x: f64) -> String {
    const PRECISION: i32 = 10;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const CSV_HEADER: &str = "graphon,n,trials,successes,p_hat,stderr";

pub fn sweep_csv(sweep: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for b in &sweep.batches {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            sweep.graphon,
            b.n,
            b.trials,
            b.successes,
            format_g(b.p_hat),
            format_g(b.stderr)
        );
    }
    out
}

/// Parses a sweep CSV; `p_hat` and `stderr` are recomputed from the counts.
pub fn read_sweep_csv(text: &str) -> Result<SweepResult> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        Some(h) => return Err(Error::Csv(format!("unexpected header {h:?}"))),
        None => return Err(Error::Csv("empty file".into())),
    }
    let mut graphon: Option<String> = None;
    let mut batches = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Csv(format!("line {row}: expected 6 fields, got {}", fields.len())));
        }
        match &graphon {
            None => graphon = Some(fields[0].to_string()),
            Some(g) if g != fields[0] => {
                return Err(Error::Csv(format!("line {row}: mixed graphons {g} and {}", fields[0])))
            }
            _ => {}
        }
        let num = |k: usize, what: &str| -> Result<u64> {
            fields[k].parse::<u64>().map_err(|_| Error::Csv(format!("line {row}: bad {what} {:?}", fields[k])))
        };
        let n = num(1, "n")? as usize;
        let trials = num(2, "trials")?;
        let successes = num(3, "successes")?;
        if trials == 0 || successes > trials {
            return Err(Error::Csv(format!("line {row}: successes {successes} of {trials} trials")));
        }
        batches.push(TrialBatch::from_counts(n, trials, successes));
    }
    let graphon = graphon.ok_or_else(|| Error::Csv("no data rows".into()))?;
    Ok(SweepResult { graphon, batches })
}

#[derive(Serialize)]
struct FitRecord<'a> {
    graphon: &'a str,
    coordinates: FitCoordinates,
    slope: f64,
    intercept: f64,
    residual_rms: f64,
    points_used: usize,
}

pub fn fits_json(fits: &[RateReport]) -> String {
    let records: Vec<FitRecord<'_>> = fits
        .iter()
        .map(|r| FitRecord {
            graphon: &r.graphon,
            coordinates: r.fit.coordinates,
            slope: r.fit.slope,
            intercept: r.fit.intercept,
            residual_rms: r.fit.residual_rms,
            points_used: r.fit.points_used,
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&records).expect("plain records serialize");
    s.push('\n');
    s
}

pub fn plot_data(fit: &FitResult) -> String {
    let mut out = format!("# fit: slope={} intercept={}\n", format_g(fit.slope), format_g(fit.intercept));
    for (x, y) in &fit.points {
        let _ = writeln!(out, "{} {}", format_g(*x), format_g(*y));
    }
    out
}

/// Writes `<graphon>_sweep.csv`, `<graphon>_fits.json` and one
/// `<graphon>_<coordinates>.dat` per fit; returns the paths written.
pub fn write_outputs(sweep: &SweepResult, fits: &[RateReport], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put(format!("{}_sweep.csv", sweep.graphon), sweep_csv(sweep))?;
    put(format!("{}_fits.json", sweep.graphon), fits_json(fits))?;
    for r in fits {
        put(format!("{}_{}.dat", r.graphon, r.fit.coordinates.as_str()), plot_data(&r.fit))?;
    }
    Ok(written)
}
