//! `graphsci`: batch command line over `Source,Target,weight` edge lists.

mod query;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::builder::PossibleValuesParser;
use clap::{Parser, Subcommand, ValueEnum};
use graphsci_core::bench::{run_bench, summarize, Algorithm, AlgorithmConfig, BenchSpec};
use graphsci_core::generate::edge_list_rows;
use graphsci_core::graph::CSV_HEADER;
use graphsci_core::linkpred::{render_table, run_pipeline, EvalReport, PipelineConfig};
use graphsci_core::{Graph, IngestSummary, LpConfig, Topology};
use serde::{Deserialize, Serialize};

use crate::query::{QueryParams, QueryPreset};

#[derive(Debug, Parser)]
#[command(name = "graphsci", version, about = "Graph analytics over CSV edge lists")]
struct Cli {
    /// Output style for results on standard output.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate an edge list; optionally write the deduplicated edges.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Only validate; never write output files.
        #[arg(long)]
        validate_only: bool,
        /// Destination for the deduplicated edge list.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Answer one of the preset questions.
    Query {
        #[arg(long)]
        input: PathBuf,
        #[arg(value_enum)]
        preset: QueryPreset,
        /// Rows reported (default 1 for q1/q2, 10 for q4).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// BFS depth bound for q4.
        #[arg(long, default_value_t = 5)]
        max_depth: usize,
    },
    /// Train and assess link-prediction models described by a TOML file.
    Predict {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Overrides every seed in the configuration.
        #[arg(long)]
        seed: Option<u64>,
        /// Per-pair score CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time algorithms: one cold run, then steady-state repetitions.
    Bench {
        #[arg(long)]
        input: PathBuf,
        /// Algorithm to time; repeat the flag or pass `all`.
        #[arg(long, required = true, value_parser = PossibleValuesParser::new(algorithm_choices()))]
        algorithm: Vec<String>,
        #[arg(long, default_value_t = 100)]
        repetitions: usize,
        /// Depth bound for bfs; unbounded when absent.
        #[arg(long)]
        max_depth: Option<usize>,
        /// Seed for label propagation.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory receiving the report JSON and raw log.
        #[arg(long, default_value = "bench-results")]
        out: PathBuf,
    },
    /// Write a synthetic edge list in the ingest format.
    Generate {
        #[arg(long, default_value_t = 820)]
        nodes: usize,
        #[arg(long, default_value_t = 3000)]
        edges: usize,
        /// Extra rows repeating an existing pair in reverse orientation.
        #[arg(long, default_value_t = 25)]
        duplicates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Destination file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn algorithm_choices() -> Vec<&'static str> {
    let mut names: Vec<&'static str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
    names.push("all");
    names
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest {
            input,
            validate_only,
            out,
        } => cmd_ingest(&input, validate_only, out.as_deref(), cli.format),
        Command::Query {
            input,
            preset,
            k,
            seed,
            max_depth,
        } => {
            let g = load(&input)?;
            let answer = query::run(&g, preset, QueryParams { k, seed, max_depth })?;
            emit(cli.format, &answer, || query::render_table(&answer))
        }
        Command::Predict {
            input,
            config,
            seed,
            out,
        } => cmd_predict(&input, &config, seed, out.as_deref(), cli.format),
        Command::Bench {
            input,
            algorithm,
            repetitions,
            max_depth,
            seed,
            out,
        } => cmd_bench(&input, &algorithm, repetitions, max_depth, seed, &out, cli.format),
        Command::Generate {
            nodes,
            edges,
            duplicates,
            seed,
            out,
        } => cmd_generate(nodes, edges, duplicates, seed, out.as_deref()),
    }
}

fn load(path: &Path) -> Result<Graph> {
    let (g, summary) = Graph::from_csv_path(path)?;
    eprintln!(
        "loaded {}: {} nodes, {} edges ({} duplicate rows, {} self-loops dropped)",
        path.display(),
        summary.nodes,
        summary.edges,
        summary.duplicates_resolved,
        summary.self_loops_dropped
    );
    Ok(g)
}

/// JSON goes to stdout as one pretty document; tables are rendered lazily.
fn emit<T: Serialize>(format: Format, value: &T, table: impl FnOnce() -> String) -> Result<()> {
    let mut stdout = io::stdout().lock();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut stdout, value)?;
            writeln!(stdout)?;
        }
        Format::Table => write!(stdout, "{}", table())?,
    }
    stdout.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct IngestOutput {
    valid: bool,
    #[serde(flatten)]
    summary: IngestSummary,
}

fn cmd_ingest(input: &Path, validate_only: bool, out: Option<&Path>, format: Format) -> Result<()> {
    let (g, summary) = Graph::from_csv_path(input)?;
    if let (false, Some(out)) = (validate_only, out) {
        write_edges(&g, out)?;
        eprintln!("wrote {} edges to {}", g.edge_count(), out.display());
    }
    let body = IngestOutput { valid: true, summary };
    emit(format, &body, || {
        format!(
            "rows                 {}\nnodes                {}\nedges                {}\nduplicates resolved  {}\nself-loops dropped   {}\n",
            summary.rows, summary.nodes, summary.edges, summary.duplicates_resolved, summary.self_loops_dropped
        )
    })
}

fn write_edges(g: &Graph, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{}", CSV_HEADER.join(","))?;
    for (u, v, weight) in g.edge_list() {
        writeln!(w, "{},{},{}", g.name(u), g.name(v), weight)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelList {
    models: Vec<PipelineConfig>,
}

/// A file holds either one pipeline table or a `[[models]]` array.
fn read_pipeline_configs(path: &Path) -> Result<Vec<PipelineConfig>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let table: toml::Table = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let configs = if table.contains_key("models") {
        toml::from_str::<ModelList>(&text)
            .with_context(|| format!("parsing {}", path.display()))?
            .models
    } else {
        vec![toml::from_str::<PipelineConfig>(&text).with_context(|| format!("parsing {}", path.display()))?]
    };
    if configs.is_empty() {
        bail!("{} lists no models", path.display());
    }
    Ok(configs)
}

#[derive(Serialize)]
struct ModelOutput {
    name: String,
    config: PipelineConfig,
    report: EvalReport,
}

#[derive(Serialize)]
struct PredictOutput {
    nodes: usize,
    edges: usize,
    models: Vec<ModelOutput>,
}

fn cmd_predict(input: &Path, config: &Path, seed: Option<u64>, out: Option<&Path>, format: Format) -> Result<()> {
    let g = load(input)?;
    let configs = read_pipeline_configs(config)?;
    let mut models = Vec::with_capacity(configs.len());
    let mut scores = match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            writeln!(w, "model,source,target,label,score")?;
            Some(w)
        }
        None => None,
    };
    for cfg in configs {
        let cfg = match seed {
            Some(s) => cfg.with_seed(s),
            None => cfg,
        };
        let run = run_pipeline(&g, &cfg).with_context(|| format!("model `{}`", cfg.name))?;
        if let Some(w) = scores.as_mut() {
            for p in &run.predictions {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    cfg.name,
                    g.name(p.u),
                    g.name(p.v),
                    u8::from(p.positive),
                    p.score
                )?;
            }
        }
        models.push(ModelOutput {
            name: cfg.name.clone(),
            config: cfg,
            report: run.report,
        });
    }
    if let Some(mut w) = scores {
        w.flush()?;
    }
    let table = render_table(models.iter().map(|m| (m.name.as_str(), &m.report)));
    if format == Format::Json {
        eprint!("{table}");
    }
    let body = PredictOutput {
        nodes: g.node_count(),
        edges: g.edge_count(),
        models,
    };
    emit(format, &body, || table.clone())
}

/// Deterministic part of a bench report; timings live in the written files.
#[derive(Serialize)]
struct BenchEntry {
    algorithm: Algorithm,
    repetitions: usize,
    nodes: usize,
    edges: usize,
    checksum: String,
}

fn cmd_bench(
    input: &Path,
    names: &[String],
    repetitions: usize,
    max_depth: Option<usize>,
    seed: u64,
    out: &Path,
    format: Format,
) -> Result<()> {
    let mut algorithms: Vec<Algorithm> = Vec::new();
    for name in names {
        let chosen: Vec<Algorithm> = if name == "all" {
            Algorithm::ALL.to_vec()
        } else {
            vec![name.parse()?]
        };
        for a in chosen {
            if !algorithms.contains(&a) {
                algorithms.push(a);
            }
        }
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH)?.as_millis();

    let mut reports = Vec::new();
    let mut entries = Vec::new();
    for algorithm in algorithms {
        let spec = BenchSpec {
            algorithm,
            repetitions,
            config: AlgorithmConfig {
                bfs_max_depth: max_depth,
                label_propagation: LpConfig {
                    seed,
                    ..LpConfig::default()
                },
                ..AlgorithmConfig::default()
            },
            dataset: input.to_path_buf(),
        };
        let outcome = run_bench(&spec)?;
        let report_path = out.join(format!("{algorithm}-{stamp}.json"));
        let log_path = out.join(format!("{algorithm}-{stamp}.log"));
        let mut report_file =
            BufWriter::new(File::create(&report_path).with_context(|| format!("creating {}", report_path.display()))?);
        serde_json::to_writer_pretty(&mut report_file, &outcome.report)?;
        writeln!(report_file)?;
        report_file.flush()?;
        let mut log_file =
            BufWriter::new(File::create(&log_path).with_context(|| format!("creating {}", log_path.display()))?);
        outcome.write_raw_log(&mut log_file)?;
        log_file.flush()?;
        eprintln!(
            "{algorithm}: wrote {} and {}",
            report_path.display(),
            log_path.display()
        );

        let r = &outcome.report;
        entries.push(BenchEntry {
            algorithm,
            repetitions: r.repetitions,
            nodes: r.nodes,
            edges: r.edges,
            checksum: r.checksum.clone(),
        });
        reports.push(outcome.report);
    }
    let table = summarize(&reports)?;
    if format == Format::Json {
        eprint!("{}", table.render_text());
    }
    emit(format, &entries, || table.render_text())
}

fn cmd_generate(nodes: usize, edges: usize, duplicates: usize, seed: u64, out: Option<&Path>) -> Result<()> {
    let rows = edge_list_rows(nodes, edges, duplicates, seed)?;
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(File::create(path).with_context(|| format!("creating {}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    writeln!(w, "{}", CSV_HEADER.join(","))?;
    for (a, b, weight) in &rows {
        writeln!(w, "{a},{b},{weight}")?;
    }
    w.flush()?;
    if let Some(path) = out {
        eprintln!("wrote {} rows to {}", rows.len(), path.display());
    }
    Ok(())
}
