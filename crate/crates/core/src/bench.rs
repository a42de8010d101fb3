//! Cold/warm timing harness: the first invocation of an algorithm is reported
//! on its own, the remaining invocations as a steady-state mean.

use std::fmt;
use std::fmt::Write as _;
use std::hint::black_box;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::centrality::{betweenness, pagerank, PageRankConfig, ScoreMap};
use crate::community::{label_propagation, CommunityAssignment, LpConfig};
use crate::graph::{Graph, NodeId, Topology};
use crate::traversal::{bfs, prim_mst, BfsResult, BfsTermination, SpanningTree};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Betweenness,
    Bfs,
    LabelPropagation,
    Pagerank,
    PrimMst,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Betweenness,
        Algorithm::Bfs,
        Algorithm::LabelPropagation,
        Algorithm::Pagerank,
        Algorithm::PrimMst,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Betweenness => "betweenness",
            Algorithm::Bfs => "bfs",
            Algorithm::LabelPropagation => "label_propagation",
            Algorithm::Pagerank => "pagerank",
            Algorithm::PrimMst => "prim_mst",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let known: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
            Error::domain(format!(
                "unknown algorithm `{s}` (expected one of {})",
                known.join(", ")
            ))
        })
    }
}

/// Parameters forwarded to the benchmarked algorithm.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AlgorithmConfig {
    pub pagerank: PageRankConfig,
    pub label_propagation: LpConfig,
    /// `None` traverses the whole component.
    pub bfs_max_depth: Option<usize>,
    /// Start node for BFS and Prim; the first node when absent.
    pub start: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub algorithm: Algorithm,
    pub repetitions: usize,
    pub config: AlgorithmConfig,
    pub dataset: PathBuf,
}

impl BenchSpec {
    pub fn new(algorithm: Algorithm, dataset: impl Into<PathBuf>) -> Self {
        Self {
            algorithm,
            repetitions: 100,
            config: AlgorithmConfig::default(),
            dataset: dataset.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub algorithm: Algorithm,
    pub repetitions: usize,
    pub nodes: usize,
    pub edges: usize,
    pub first_run_seconds: f64,
    pub subsequent_mean_seconds: f64,
    /// Population standard deviation of the subsequent runs.
    pub subsequent_std_seconds: f64,
    /// Extremes of the subsequent runs.
    pub min_seconds: f64,
    pub max_seconds: f64,
    /// Digest of the algorithm output, identical for every repetition.
    pub checksum: String,
    pub environment: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Load,
    Timing,
}

/// Start and end of a harness phase, in nanoseconds since the harness began.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhaseMarker {
    pub phase: Phase,
    pub start_ns: u128,
    pub end_ns: u128,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOutcome {
    pub report: BenchReport,
    /// Seconds per repetition, in execution order.
    pub samples: Vec<f64>,
    pub phases: Vec<PhaseMarker>,
}

impl BenchOutcome {
    /// One `<iteration>,<seconds>` line per repetition, iterations from 1.
    pub fn write_raw_log<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, s) in self.samples.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, s)?;
        }
        Ok(())
    }
}

/// Parses a raw log written by [`BenchOutcome::write_raw_log`].
pub fn parse_raw_log(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let (iter, secs) = line
                .split_once(',')
                .ok_or_else(|| Error::domain(format!("raw log line {}: missing comma", i + 1)))?;
            if iter.trim().parse::<usize>().ok() != Some(i + 1) {
                return Err(Error::domain(format!("raw log line {}: bad iteration `{iter}`", i + 1)));
            }
            secs.trim()
                .parse::<f64>()
                .map_err(|_| Error::domain(format!("raw log line {}: bad seconds `{secs}`", i + 1)))
        })
        .collect()
}

/// Loads the dataset, then times the algorithm. Loading finishes before the
/// first timed repetition starts.
pub fn run_bench(spec: &BenchSpec) -> Result<BenchOutcome> {
    let origin = Instant::now();
    let (graph, _) = Graph::from_csv_path(&spec.dataset)?;
    let load = PhaseMarker {
        phase: Phase::Load,
        start_ns: 0,
        end_ns: origin.elapsed().as_nanos(),
    };
    let mut outcome = time_algorithm(&graph, spec.algorithm, spec.repetitions, &spec.config, origin)?;
    outcome.phases.insert(0, load);
    Ok(outcome)
}

/// Times `repetitions` invocations on an already built graph.
pub fn run_bench_on_graph(
    g: &Graph,
    algorithm: Algorithm,
    repetitions: usize,
    config: &AlgorithmConfig,
) -> Result<BenchOutcome> {
    time_algorithm(g, algorithm, repetitions, config, Instant::now())
}

fn time_algorithm(
    g: &Graph,
    algorithm: Algorithm,
    repetitions: usize,
    config: &AlgorithmConfig,
    origin: Instant,
) -> Result<BenchOutcome> {
    if repetitions < 2 {
        return Err(Error::domain("a benchmark needs at least two repetitions"));
    }
    if g.node_count() == 0 {
        return Err(Error::domain("cannot benchmark on an empty graph"));
    }
    let start: NodeId = match &config.start {
        Some(name) => g
            .node_id(name)
            .ok_or_else(|| Error::domain(format!("unknown start node `{name}`")))?,
        None => 0,
    };
    let termination = BfsTermination {
        max_depth: config.bfs_max_depth,
        ..BfsTermination::default()
    };

    let mut samples = Vec::with_capacity(repetitions);
    let mut checksum: Option<u64> = None;
    let timing_start = origin.elapsed().as_nanos();
    for _ in 0..repetitions {
        let t0 = Instant::now();
        let digest = match algorithm {
            Algorithm::Pagerank => digest_scores(&black_box(pagerank(g, &config.pagerank)?)),
            Algorithm::Betweenness => digest_scores(&black_box(betweenness(g))),
            Algorithm::LabelPropagation => {
                digest_communities(&black_box(label_propagation(g, &config.label_propagation)))
            }
            Algorithm::Bfs => digest_bfs(&black_box(bfs(g, start, &termination)?)),
            Algorithm::PrimMst => digest_tree(&black_box(prim_mst(g, start)?)),
        };
        samples.push(t0.elapsed().as_secs_f64());
        match checksum {
            None => checksum = Some(digest),
            Some(c) if c != digest => {
                return Err(Error::domain(format!(
                    "{algorithm} produced different results across repetitions"
                )))
            }
            Some(_) => {}
        }
    }
    let timing = PhaseMarker {
        phase: Phase::Timing,
        start_ns: timing_start,
        end_ns: origin.elapsed().as_nanos(),
    };

    let steady = &samples[1..];
    let mean = steady.iter().sum::<f64>() / steady.len() as f64;
    let var = steady.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / steady.len() as f64;
    let report = BenchReport {
        algorithm,
        repetitions,
        nodes: g.node_count(),
        edges: g.edge_count(),
        first_run_seconds: samples[0],
        subsequent_mean_seconds: mean,
        subsequent_std_seconds: var.sqrt(),
        min_seconds: steady.iter().copied().fold(f64::INFINITY, f64::min),
        max_seconds: steady.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        checksum: format!("{:016x}", checksum.unwrap_or_default()),
        environment: environment_note(),
    };
    Ok(BenchOutcome {
        report,
        samples,
        phases: vec![timing],
    })
}

fn environment_note() -> String {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    format!(
        "{}-{}, {threads} hardware threads, {profile} build, single-threaded sequential runs",
        std::env::consts::OS,
        std::env::consts::ARCH
    )
}

/// 64-bit FNV-1a.
struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    fn u64(&mut self, x: u64) {
        self.write(&x.to_le_bytes());
    }
}

fn digest_scores(s: &ScoreMap) -> u64 {
    let mut h = Fnv::new();
    for &x in s.scores() {
        h.u64(x.to_bits());
    }
    h.0
}

fn digest_communities(a: &CommunityAssignment) -> u64 {
    let mut h = Fnv::new();
    for &l in a.labels() {
        h.u64(l as u64);
    }
    h.0
}

fn digest_bfs(r: &BfsResult) -> u64 {
    let mut h = Fnv::new();
    for (&u, &d) in r.order.iter().zip(&r.depths) {
        h.u64(u as u64);
        h.u64(d as u64);
    }
    h.0
}

fn digest_tree(t: &SpanningTree) -> u64 {
    let mut h = Fnv::new();
    for &(u, v, w) in &t.edges {
        h.u64(u as u64);
        h.u64(v as u64);
        h.u64(w.to_bits());
    }
    h.u64(t.total_weight.to_bits());
    h.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub repetitions: usize,
    pub first_run_seconds: f64,
    pub subsequent_mean_seconds: f64,
    pub subsequent_std_seconds: f64,
    /// First run divided by the steady-state mean.
    pub warmup_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
}

impl SummaryTable {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<18} {:>5} {:>14} {:>14} {:>14} {:>8}",
            "algorithm", "reps", "first (s)", "mean (s)", "std (s)", "ratio"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<18} {:>5} {:>14.9} {:>14.9} {:>14.9} {:>8.2}",
                r.algorithm.name(),
                r.repetitions,
                r.first_run_seconds,
                r.subsequent_mean_seconds,
                r.subsequent_std_seconds,
                r.warmup_ratio
            );
        }
        out
    }
}

/// One row per report, sorted by algorithm name.
pub fn summarize(reports: &[BenchReport]) -> Result<SummaryTable> {
    if reports.is_empty() {
        return Err(Error::domain("nothing to summarize"));
    }
    let mut rows: Vec<SummaryRow> = reports
        .iter()
        .map(|r| SummaryRow {
            algorithm: r.algorithm,
            repetitions: r.repetitions,
            first_run_seconds: r.first_run_seconds,
            subsequent_mean_seconds: r.subsequent_mean_seconds,
            subsequent_std_seconds: r.subsequent_std_seconds,
            warmup_ratio: if r.subsequent_mean_seconds > 0.0 {
                r.first_run_seconds / r.subsequent_mean_seconds
            } else {
                0.0
            },
        })
        .collect();
    rows.sort_by(|a, b| a.algorithm.name().cmp(b.algorithm.name()));
    Ok(SummaryTable { rows })
}
