use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cocite::config::{AnalysisSection, ConfigFile, SimulationSection};
use cocite::{ingest, pipeline, Error};

#[derive(Parser)]
#[command(
    name = "cocite",
    version,
    about = "Co-citation network analysis and brokerage growth simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full analysis pipeline and write CSV/GraphML/JSON outputs.
    Analyze(AnalyzeArgs),
    /// Run the growth simulator.
    Simulate(SimulateArgs),
    /// Parse export files and emit the normalized corpus as NDJSON.
    Parse(ParseArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Field-tagged export file; repeat for several files.
    #[arg(long, num_args = 1..)]
    input: Option<Vec<PathBuf>>,
    /// Document types to keep (`all` keeps everything).
    #[arg(long, value_delimiter = ',')]
    doc_types: Option<Vec<String>>,
    #[arg(long)]
    year_min: Option<i32>,
    #[arg(long)]
    year_max: Option<i32>,
    #[arg(long)]
    slice_years: Option<u32>,
    /// Selection threshold `c,cc,ccv`.
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long)]
    top_n: Option<u32>,
    #[arg(long)]
    burst_s: Option<f64>,
    #[arg(long)]
    burst_gamma: Option<f64>,
    /// `sum` or `strongest`.
    #[arg(long)]
    burst_aggregation: Option<String>,
    /// `max` or `minmax`.
    #[arg(long)]
    normalization: Option<String>,
    /// citation | centrality | burst | sigma2 | sigma3
    #[arg(long)]
    rank_by: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl AnalyzeArgs {
    fn section(&self) -> AnalysisSection {
        AnalysisSection {
            input: self.input.clone(),
            doc_types: self.doc_types.clone(),
            year_min: self.year_min,
            year_max: self.year_max,
            slice_years: self.slice_years,
            threshold: self.threshold.clone(),
            top_n: self.top_n,
            burst_s: self.burst_s,
            burst_gamma: self.burst_gamma,
            burst_aggregation: self.burst_aggregation.clone(),
            normalization: self.normalization.clone(),
            rank_by: self.rank_by.clone(),
            k: self.k,
            out: self.out.clone(),
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// brokerage | preferential_attachment | uniform | compare
    #[arg(long)]
    mechanism: Option<String>,
    #[arg(long)]
    seed_communities: Option<usize>,
    #[arg(long)]
    seed_size: Option<usize>,
    #[arg(long)]
    intra_p: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    links_per_node: Option<usize>,
    #[arg(long)]
    rng_seed: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SimulateArgs {
    fn section(&self) -> SimulationSection {
        SimulationSection {
            mechanism: self.mechanism.clone(),
            seed_communities: self.seed_communities,
            seed_size: self.seed_size,
            intra_p: self.intra_p,
            steps: self.steps,
            links_per_node: self.links_per_node,
            rng_seed: self.rng_seed,
            runs: self.runs,
            out: self.out.clone(),
        }
    }
}

#[derive(Args)]
struct ParseArgs {
    #[arg(long, num_args = 1.., required = true)]
    input: Vec<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_config(path: Option<&PathBuf>) -> Result<ConfigFile, Error> {
    match path {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

fn analyze(args: &AnalyzeArgs) -> Result<serde_json::Value, Error> {
    let file = load_config(args.config.as_ref())?;
    let cfg = file.analysis.overlay(&args.section()).resolve()?;
    let report = pipeline::run_analysis(&cfg)?;
    Ok(serde_json::json!({
        "records": report.manifest.parsed.records,
        "analyzed": report.manifest.analyzed.records,
        "nodes": report.manifest.network.nodes,
        "edges": report.manifest.network.edges,
        "outputs": report.files,
    }))
}

fn simulate(args: &SimulateArgs) -> Result<serde_json::Value, Error> {
    let file = load_config(args.config.as_ref())?;
    let cfg = file.simulation.overlay(&args.section()).resolve()?;
    let report = pipeline::run_simulation(&cfg)?;
    Ok(serde_json::json!({
        "runs": report.manifest.runs,
        "added_nodes": report.manifest.added_nodes,
        "median_ratio": report.manifest.median_ratio,
        "first_wins": report.manifest.first_wins,
        "outputs": report.files,
    }))
}

fn parse(args: &ParseArgs) -> Result<serde_json::Value, Error> {
    let (corpus, loss, diagnostics) = pipeline::ingest_inputs(&args.input)?;
    let text = ingest::to_ndjson(&corpus)?;
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::Io {
                    path: "<stdout>".into(),
                    source: e,
                })?;
        }
    }
    Ok(serde_json::json!({
        "records": corpus.len(),
        "parse_loss": loss,
        "diagnostics": diagnostics,
    }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, summary_to_stderr) = match &cli.command {
        Command::Analyze(args) => (analyze(args), false),
        Command::Simulate(args) => (simulate(args), false),
        Command::Parse(args) => (parse(args), args.out.is_none()),
    };
    match result {
        Ok(summary) => {
            if summary_to_stderr {
                eprintln!("{summary}");
            } else {
                println!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            let body = serde_json::json!({ "error": err.kind(), "message": err.to_string() });
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}
