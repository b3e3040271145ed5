//! End-to-end runs: corpus analysis and growth simulation.
//!
//! Outputs are written to a staging directory inside the output directory,
//! checked, and only then moved into place. A failed run leaves no outputs
//! behind.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::{PipelineConfig, SimulationConfig, SimulationMode};
use crate::error::{Error, Result};
use crate::export;
use crate::growth::{self, Mechanism, SimResult};
use crate::ingest::{self, CitedRefKey, Corpus, ExportFormat, ParseLoss, YearRange};
use crate::metrics::{self, Metric};
use crate::network::{self, SliceSummary};

pub const CORPUS_FILE: &str = "corpus.ndjson";
pub const METRICS_FILE: &str = "metrics.csv";
pub const RANKING_FILE: &str = "ranking.csv";
pub const CORRELATION_FILE: &str = "correlation.csv";
pub const EDGES_FILE: &str = "edges.csv";
pub const NETWORK_FILE: &str = "network.graphml";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SIMULATION_FILE: &str = "simulation.csv";
pub const SUMMARY_FILE: &str = "summary.csv";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub records: usize,
    pub dated_records: usize,
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
    pub doc_types: BTreeMap<String, usize>,
    /// (record, cited reference) pairs after per-record deduplication.
    pub citation_incidences: usize,
    pub unique_refs: usize,
}

impl CorpusStats {
    pub fn of(corpus: &Corpus) -> Self {
        let mut doc_types = BTreeMap::new();
        let mut unique = BTreeSet::new();
        let mut incidences = 0;
        for r in corpus.records() {
            *doc_types.entry(r.doc_type.to_string()).or_insert(0) += 1;
            let distinct: BTreeSet<&CitedRefKey> = r.cited_refs.iter().collect();
            incidences += distinct.len();
            unique.extend(distinct);
        }
        CorpusStats {
            records: corpus.len(),
            dated_records: corpus.dated_records().count(),
            year_min: corpus.year_min(),
            year_max: corpus.year_max(),
            doc_types,
            citation_incidences: incidences,
            unique_refs: unique.len(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FileDiagnostic {
    pub file: PathBuf,
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct NetworkStats {
    pub nodes: usize,
    pub edges: usize,
    pub slices: Vec<SliceSummary>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub parse_ms: u128,
    pub network_ms: u128,
    pub metrics_ms: u128,
    pub write_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: PipelineConfig,
    pub parsed: CorpusStats,
    pub analyzed: CorpusStats,
    pub parse_loss: ParseLoss,
    pub diagnostics: Vec<FileDiagnostic>,
    pub network: NetworkStats,
    pub outputs: Vec<&'static str>,
    pub timings: Timings,
}

#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub manifest: AnalysisManifest,
    pub files: Vec<PathBuf>,
}

/// Parses every input file and concatenates the corpora. Records repeated
/// across files (same id) are kept once.
pub fn ingest_inputs(inputs: &[PathBuf]) -> Result<(Corpus, ParseLoss, Vec<FileDiagnostic>)> {
    for path in inputs {
        if !path.is_file() {
            return Err(Error::ConfigInvalid(format!(
                "input not found: {}",
                path.display()
            )));
        }
    }
    let mut corpus = Corpus::default();
    let mut loss = ParseLoss::default();
    let mut diagnostics = Vec::new();
    for path in inputs {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let parsed = ingest::parse_export_file(&bytes, ExportFormat::FieldTagged)?;
        loss.absorb(&parsed.loss);
        diagnostics.extend(parsed.diagnostics.into_iter().map(|d| FileDiagnostic {
            file: path.clone(),
            line: d.line,
            message: d.message,
        }));
        loss.duplicate_records += corpus.extend_unique(parsed.corpus);
    }
    Ok((corpus, loss, diagnostics))
}

fn apply_filters(corpus: &Corpus, cfg: &PipelineConfig) -> Result<Corpus> {
    let years = match cfg.years {
        Some(range) => range,
        None => YearRange::new(i32::MIN, i32::MAX)?,
    };
    let filtered = match &cfg.doc_types {
        Some(types) => ingest::filter_corpus(corpus, types, years),
        None => {
            let all: BTreeSet<_> = corpus
                .records()
                .iter()
                .map(|r| r.doc_type.clone())
                .collect();
            ingest::filter_corpus(corpus, &all, years)
        }
    };
    Ok(filtered)
}

/// Output files staged in a temporary directory under the final output
/// directory. Dropping it without [`Staging::commit`] removes everything,
/// including the output directory when it did not exist before.
struct Staging {
    dir: tempfile::TempDir,
    out: PathBuf,
    files: Vec<String>,
    created_out: bool,
    committed: bool,
}

impl Staging {
    fn new(out: &Path) -> Result<Self> {
        let created_out = !out.exists();
        std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        let dir = tempfile::Builder::new()
            .prefix(".cocite-staging-")
            .tempdir_in(out)
            .map_err(|e| Error::io(out, e))?;
        Ok(Staging {
            dir,
            out: out.to_path_buf(),
            files: Vec::new(),
            created_out,
            committed: false,
        })
    }

    fn write<F>(&mut self, name: &str, body: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<()>,
    {
        let path = self.dir.path().join(name);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        w.flush().map_err(|e| Error::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn check_header(&self, name: &str, expected: &[String]) -> Result<()> {
        let path = self.dir.path().join(name);
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        let mut reader = csv::Reader::from_reader(file);
        let header: Vec<String> = reader.headers()?.iter().map(String::from).collect();
        if header != expected {
            return Err(Error::OutputValidation {
                path,
                reason: format!("header {header:?} differs from {expected:?}"),
            });
        }
        Ok(())
    }

    fn check_nonempty(&self, name: &str) -> Result<()> {
        let path = self.dir.path().join(name);
        let mut first = String::new();
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        BufReader::new(file)
            .read_line(&mut first)
            .map_err(|e| Error::io(&path, e))?;
        if first.trim().is_empty() {
            return Err(Error::OutputValidation {
                path,
                reason: "file is empty".into(),
            });
        }
        Ok(())
    }

    fn commit(mut self) -> Result<Vec<PathBuf>> {
        let mut moved = Vec::new();
        for name in &self.files {
            let from = self.dir.path().join(name);
            let to = self.out.join(name);
            if let Err(e) = std::fs::rename(&from, &to) {
                for done in &moved {
                    let _ = std::fs::remove_file(done);
                }
                return Err(Error::io(&to, e));
            }
            moved.push(to);
        }
        self.committed = true;
        Ok(moved)
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(self.dir.path());
        if self.created_out && !self.committed {
            let _ = std::fs::remove_dir(&self.out);
        }
    }
}

fn io_result(path: &str, r: std::io::Result<()>) -> Result<()> {
    r.map_err(|e| Error::io(path, e))
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Runs ingest, slicing, network construction, metrics, ranking and
/// correlation, and writes all outputs.
pub fn run_analysis(cfg: &PipelineConfig) -> Result<AnalysisReport> {
    let mut timings = Timings::default();

    let clock = Instant::now();
    let (corpus, parse_loss, diagnostics) = ingest_inputs(&cfg.inputs)?;
    let filtered = apply_filters(&corpus, cfg)?;
    if filtered.dated_records().next().is_none() {
        return Err(Error::EmptyCorpus);
    }
    timings.parse_ms = clock.elapsed().as_millis();

    let clock = Instant::now();
    let (slices, net) = network::build_network(&filtered, cfg.slice_years, cfg.threshold)?;
    timings.network_ms = clock.elapsed().as_millis();

    let clock = Instant::now();
    let node_metrics = metrics::compute_metrics(&net, &cfg.metrics)?;
    let ranked = metrics::rank_candidates(&node_metrics, cfg.rank_by, cfg.k);
    let correlation = metrics::pearson_matrix(&node_metrics, &Metric::ALL);
    timings.metrics_ms = clock.elapsed().as_millis();

    let clock = Instant::now();
    let mut staging = Staging::new(&cfg.out)?;
    staging.write(CORPUS_FILE, |w| {
        io_result(
            CORPUS_FILE,
            w.write_all(ingest::to_ndjson(&corpus)?.as_bytes()),
        )
    })?;
    staging.write(METRICS_FILE, |w| {
        export::write_metrics_csv(w, &node_metrics)
    })?;
    staging.write(RANKING_FILE, |w| export::write_ranking_csv(w, &ranked))?;
    staging.write(CORRELATION_FILE, |w| {
        export::write_correlation_csv(w, &correlation)
    })?;
    staging.write(EDGES_FILE, |w| export::write_edges_csv(w, &net))?;
    staging.write(NETWORK_FILE, |w| {
        io_result(NETWORK_FILE, export::write_network_graphml(w, &net))
    })?;

    staging.check_header(METRICS_FILE, &strings(&export::METRICS_HEADER))?;
    staging.check_header(RANKING_FILE, &export::ranking_header())?;
    staging.check_header(CORRELATION_FILE, &export::correlation_header(&correlation))?;
    staging.check_header(EDGES_FILE, &strings(&export::EDGES_HEADER))?;
    staging.check_nonempty(NETWORK_FILE)?;
    timings.write_ms = clock.elapsed().as_millis();

    let manifest = AnalysisManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        parsed: CorpusStats::of(&corpus),
        analyzed: CorpusStats::of(&filtered),
        parse_loss,
        diagnostics,
        network: NetworkStats {
            nodes: net.node_count(),
            edges: net.edge_count(),
            slices,
        },
        outputs: vec![
            CORPUS_FILE,
            METRICS_FILE,
            RANKING_FILE,
            CORRELATION_FILE,
            EDGES_FILE,
            NETWORK_FILE,
            MANIFEST_FILE,
        ],
        timings,
    };
    staging.write(MANIFEST_FILE, |w| {
        serde_json::to_writer_pretty(&mut *w, &manifest)?;
        io_result(MANIFEST_FILE, w.write_all(b"\n"))
    })?;
    staging.check_nonempty(MANIFEST_FILE)?;

    let files = staging.commit()?;
    Ok(AnalysisReport { manifest, files })
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: SimulationConfig,
    pub runs: usize,
    pub added_nodes: usize,
    pub median_ratio: Option<f64>,
    pub first_wins: Option<usize>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub manifest: SimulationManifest,
    pub comparison: Option<growth::Comparison>,
    pub files: Vec<PathBuf>,
}

fn graphml_name(mechanism: Mechanism, run: usize) -> String {
    format!("network_{mechanism}_run{run}.graphml")
}

/// Runs the growth simulator and writes per-node results, per-run
/// summaries (comparison mode) and the final networks.
pub fn run_simulation(cfg: &SimulationConfig) -> Result<SimulationReport> {
    let (results, comparison): (Vec<SimResult>, Option<growth::Comparison>) = match cfg.mode {
        SimulationMode::Compare => {
            let first = cfg.growth.with_mechanism(Mechanism::Brokerage);
            let second = cfg.growth.with_mechanism(Mechanism::PreferentialAttachment);
            let (pairs, cmp) = growth::run_comparison(&first, &second, cfg.runs)?;
            let flat = pairs.into_iter().flat_map(|(a, b)| [a, b]).collect();
            (flat, Some(cmp))
        }
        SimulationMode::Single(mechanism) => {
            let base = cfg.growth.with_mechanism(mechanism);
            let results = (0..cfg.runs)
                .map(|run| {
                    growth::simulate(&base.with_seed(base.rng_seed.wrapping_add(run as u64)))
                })
                .collect::<Result<_>>()?;
            (results, None)
        }
    };
    let per_run = match cfg.mode {
        SimulationMode::Compare => 2,
        SimulationMode::Single(_) => 1,
    };
    let indexed: Vec<(usize, &SimResult)> = results
        .iter()
        .enumerate()
        .map(|(i, r)| (i / per_run, r))
        .collect();

    let mut staging = Staging::new(&cfg.out)?;
    staging.write(SIMULATION_FILE, |w| {
        export::write_simulation_csv(w, indexed.iter().copied())
    })?;
    staging.check_header(SIMULATION_FILE, &strings(&export::SIMULATION_HEADER))?;
    if let Some(cmp) = &comparison {
        staging.write(SUMMARY_FILE, |w| export::write_summary_csv(w, cmp))?;
        staging.check_header(SUMMARY_FILE, &export::summary_header(cmp))?;
    }
    for &(run, result) in &indexed {
        let name = graphml_name(result.config.mechanism, run);
        staging.write(&name, |w| {
            io_result(&name, export::write_sim_graphml(w, result))
        })?;
    }

    let mut outputs = staging.files.clone();
    outputs.push(MANIFEST_FILE.to_string());
    let manifest = SimulationManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        runs: cfg.runs,
        added_nodes: results.iter().map(|r| r.added.len()).sum(),
        median_ratio: comparison.as_ref().and_then(|c| c.median_ratio),
        first_wins: comparison.as_ref().map(|c| c.first_wins),
        outputs,
    };
    staging.write(MANIFEST_FILE, |w| {
        serde_json::to_writer_pretty(&mut *w, &manifest)?;
        io_result(MANIFEST_FILE, w.write_all(b"\n"))
    })?;

    let files = staging.commit()?;
    Ok(SimulationReport {
        manifest,
        comparison,
        files,
    })
}
