//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a command fails at run time (one-line
//! diagnostic on stderr), 2 on malformed invocations (usage on stderr).

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser, Subcommand};
use serde::Serialize;

use crate::cone::{
    active_facets, classify_regime, cone_dimension, facet_hyperplanes, incidence_matrix, Regime, RegimeReport, Verdict,
};
use crate::cover::exact_cycle_cover;
use crate::error::{Error, Result};
use crate::experiments::{
    rate_report, read_sweep_csv, run_sweep, write_outputs, RateReport, SweepConfig, SweepResult, DEFAULT_TRIALS,
};
use crate::graph::{format_edge_list, parse_edge_list};
use crate::graphon::{load_graphon, StepGraphon};
use crate::rational::format_rational;
use crate::stochastic::{estimate_p_star, name_label, sample_graph, PStarEstimate, RngStream, DEFAULT_PSTAR_SAMPLES};

const SAMPLE_LABEL: u64 = 0x7361_6d70_6c65; // "sample"

#[derive(Debug, Parser)]
#[command(name = "graphon-cover", version, about = "Cycle covers of random graphs sampled from step-graphons")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, PartialEq)]
pub enum Command {
    /// Regime classification, cone membership and facets as JSON.
    Analyze {
        /// Catalog name or path to a graphon JSON file.
        #[arg(long)]
        graphon: String,
    },
    /// Monte-Carlo estimate of p*.
    Pstar {
        #[arg(long)]
        graphon: String,
        #[arg(long, default_value_t = DEFAULT_PSTAR_SAMPLES, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_parser = positive_usize)]
        threads: Option<usize>,
    },
    /// Empirical cycle-cover probabilities over a grid of n, with rate fits.
    Sweep {
        #[arg(long)]
        graphon: String,
        /// `a,b,c` or `a..b:step` (inclusive).
        #[arg(long, value_parser = parse_n_list_arg, required_unless_present = "n", conflicts_with = "n")]
        n_list: Option<NList>,
        #[arg(long, value_parser = positive_usize)]
        n: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TRIALS, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Samples for p* when the fit needs it.
        #[arg(long, default_value_t = DEFAULT_PSTAR_SAMPLES, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_parser = positive_usize)]
        threads: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Cycle-cover detection on an edge-list file (`-` for stdin).
    Detect {
        file: PathBuf,
        /// Print the cycles of a cover when one exists.
        #[arg(long)]
        witness: bool,
    },
    /// One sampled graph as an edge list.
    Sample {
        #[arg(long)]
        graphon: String,
        #[arg(long, value_parser = positive_usize)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Rate fit of a sweep CSV.
    Fit {
        file: PathBuf,
        /// Defaults to the graphon named in the CSV.
        #[arg(long)]
        graphon: Option<String>,
        #[arg(long, default_value_t = DEFAULT_PSTAR_SAMPLES, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_parser = positive_usize)]
        threads: Option<usize>,
    },
}

fn positive_usize(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NList(pub Vec<usize>);

fn parse_n_list_arg(s: &str) -> std::result::Result<NList, String> {
    parse_n_list(s).map(NList)
}

/// `a,b,c` or the inclusive range `a..b:step`; must be strictly increasing.
pub fn parse_n_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    let list = if let Some((range, step)) = s.split_once(':') {
        let (a, b) = range.split_once("..").ok_or("expected a..b:step")?;
        let a = positive_usize(a.trim())?;
        let b = positive_usize(b.trim())?;
        let step = positive_usize(step.trim())?;
        if b < a {
            return Err(format!("empty range {a}..{b}"));
        }
        (a..=b).step_by(step).collect()
    } else {
        s.split(',').map(|p| positive_usize(p.trim())).collect::<std::result::Result<Vec<_>, _>>()?
    };
    if list.windows(2).any(|w| w[0] >= w[1]) {
        return Err("values must be strictly increasing".into());
    }
    Ok(list)
}

pub fn parse_command<I, T>(args: I) -> std::result::Result<Command, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(args).map(|c| c.command)
}

/// Parses and executes; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let command = match parse_command(args) {
        Ok(c) => c,
        Err(e) => {
            let mut text = e.render().to_string();
            return if e.use_stderr() {
                if !text.contains("Usage:") {
                    text = format!("{text}\n{}\n", Cli::command().render_usage());
                }
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or_else(default_threads))
        .build()
        .map_err(|e| Error::Config(e.to_string()))
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Serialize)]
struct Facets {
    normals: Vec<Vec<String>>,
    active: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct Analysis<'a> {
    graphon: &'a str,
    q: usize,
    concentration: Vec<String>,
    skeleton_edges: Vec<(usize, usize)>,
    #[serde(flatten)]
    report: &'a RegimeReport,
    membership: Verdict,
    cone_dimension: usize,
    facets: Option<Facets>,
}

#[derive(Serialize)]
struct PStarOutput<'a> {
    graphon: &'a str,
    regime: Regime,
    p_star_mean: f64,
    stderr: f64,
    samples: u64,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

#[derive(Serialize)]
struct FitOutput<'a> {
    graphon: &'a str,
    regime: Regime,
    coordinates: crate::experiments::FitCoordinates,
    slope: f64,
    intercept: f64,
    residual_rms: f64,
    points_used: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    theoretical_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_star: Option<f64>,
}

fn json_line(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Analyze { graphon } => analyze(&load_graphon(&graphon)?, out),
        Command::Pstar { graphon, samples, seed, threads } => {
            let w = load_graphon(&graphon)?;
            let regime = classify_regime(&w)?.regime;
            let est = pool(threads)?.install(|| estimate_p_star(&w, samples, seed))?;
            json_line(
                out,
                &PStarOutput {
                    graphon: w.name(),
                    regime,
                    p_star_mean: est.mean,
                    stderr: est.stderr,
                    samples: est.samples,
                    seed,
                    note: est.note.as_deref(),
                },
            )
        }
        Command::Sweep { graphon, n_list, n, trials, samples, seed, threads, out: dir } => {
            let w = load_graphon(&graphon)?;
            let n_list = n_list.map_or_else(|| n.into_iter().collect(), |l| l.0);
            let workers = threads.unwrap_or_else(default_threads);
            let config = SweepConfig::new(w.clone(), n_list, trials, seed, workers)?.with_out_dir(&dir);
            let sweep = run_sweep(&config)?;
            let fits = fit_sweep(&w, &sweep, samples, seed, Some(workers), out)?;
            for path in write_outputs(&sweep, &fits, &dir)? {
                writeln!(out, "wrote {}", path.display())?;
            }
            Ok(())
        }
        Command::Detect { file, witness } => {
            let g = parse_edge_list(&read_input(&file)?)?;
            let verdict = exact_cycle_cover(&g, witness);
            writeln!(out, "cycle cover: {}", if verdict.exists { "yes" } else { "no" })?;
            writeln!(out, "method: {:?}", verdict.method)?;
            for cycle in verdict.witness.unwrap_or_default() {
                let nodes: Vec<String> = cycle.iter().map(usize::to_string).collect();
                writeln!(out, "cycle: {}", nodes.join(" "))?;
            }
            Ok(())
        }
        Command::Sample { graphon, n, seed } => {
            let w = load_graphon(&graphon)?;
            let mut rng = RngStream::derived(seed, &[SAMPLE_LABEL, name_label(w.name()), n as u64]);
            let g = sample_graph(&w, n, &mut rng);
            let communities: Vec<String> = g.community.iter().map(usize::to_string).collect();
            writeln!(out, "# communities: {}", communities.join(" "))?;
            write!(out, "{}", format_edge_list(&g.graph))?;
            Ok(())
        }
        Command::Fit { file, graphon, samples, seed, threads } => {
            let sweep = read_sweep_csv(&read_input(&file)?)?;
            let w = load_graphon(graphon.as_deref().unwrap_or(&sweep.graphon))?;
            let report = rate_report_with_pstar(&w, &sweep, samples, seed, threads)?;
            json_line(
                out,
                &FitOutput {
                    graphon: &report.graphon,
                    regime: report.regime,
                    coordinates: report.fit.coordinates,
                    slope: report.fit.slope,
                    intercept: report.fit.intercept,
                    residual_rms: report.fit.residual_rms,
                    points_used: report.fit.points_used,
                    theoretical_exponent: report.theoretical_exponent,
                    p_star: report.p_star,
                },
            )
        }
    }
}

fn rate_report_with_pstar(
    w: &StepGraphon,
    sweep: &SweepResult,
    samples: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<RateReport> {
    let pstar: Option<PStarEstimate> = if classify_regime(w)?.regime == Regime::Item4 {
        Some(pool(threads)?.install(|| estimate_p_star(w, samples, seed))?)
    } else {
        None
    };
    rate_report(w, sweep, pstar.as_ref())
}

/// Fits a finished sweep; a sweep too saturated to fit still gets its CSV.
fn fit_sweep(
    w: &StepGraphon,
    sweep: &SweepResult,
    samples: u64,
    seed: u64,
    threads: Option<usize>,
    out: &mut dyn Write,
) -> Result<Vec<RateReport>> {
    match rate_report_with_pstar(w, sweep, samples, seed, threads) {
        Ok(r) => {
            writeln!(
                out,
                "fit {} {}: slope={} intercept={} points={} residual_rms={}",
                r.graphon,
                r.fit.coordinates.as_str(),
                r.fit.slope,
                r.fit.intercept,
                r.fit.points_used,
                r.fit.residual_rms
            )?;
            Ok(vec![r])
        }
        Err(Error::DegenerateFit(why)) => {
            writeln!(out, "fit {}: skipped ({why})", sweep.graphon)?;
            Ok(Vec::new())
        }
        Err(e) => Err(e),
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn analyze(w: &StepGraphon, out: &mut dyn Write) -> Result<()> {
    let report = classify_regime(w)?;
    let skeleton = w.skeleton_graph();
    let z = incidence_matrix(&skeleton);
    let xstar = w.concentration_vector();
    let facets = if w.q() >= 2 {
        let all = facet_hyperplanes(&z)?;
        let active = if report.membership == Verdict::Outside {
            None
        } else {
            let act = active_facets(&all, &z, &xstar)?;
            Some(all.normals.iter().enumerate().filter(|(_, v)| act.normals.contains(v)).map(|(i, _)| i).collect())
        };
        Some(Facets {
            normals: all.normals.iter().map(|v| v.iter().map(|x| x.to_string()).collect()).collect(),
            active,
        })
    } else {
        None
    };
    json_line(
        out,
        &Analysis {
            graphon: w.name(),
            q: w.q(),
            concentration: xstar.iter().map(format_rational).collect(),
            skeleton_edges: skeleton.edges(),
            report: &report,
            membership: report.membership,
            cone_dimension: cone_dimension(&z),
            facets,
        },
    )
}
