//! Run configuration.
//!
//! The configuration file is TOML with an `[analysis]` and a `[simulation]`
//! section of flat keys. Every key has a command-line flag of the same name
//! (underscores become dashes); values given on the command line replace
//! those from the file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{GrowthConfig, Mechanism};
use crate::ingest::{DocType, YearRange};
use crate::metrics::{BurstAggregation, BurstParams, Metric, MetricsConfig, NormalizationMode};
use crate::network::SelectionThreshold;

pub const DEFAULT_TOP_N: u32 = 50;
pub const DEFAULT_SLICE_YEARS: u32 = 1;
pub const DEFAULT_RANK_K: usize = 10;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub simulation: SimulationSection,
}

impl ConfigFile {
    /// Reads a configuration file; relative paths inside it are resolved
    /// against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ConfigFile = toml::from_str(&text)
            .map_err(|e| Error::ConfigInvalid(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(inputs) = cfg.analysis.input.as_mut() {
            inputs.iter_mut().for_each(rebase);
        }
        if let Some(out) = cfg.analysis.out.as_mut() {
            rebase(out);
        }
        if let Some(out) = cfg.simulation.out.as_mut() {
            rebase(out);
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    pub input: Option<Vec<PathBuf>>,
    /// Document types to keep; `["all"]` disables the filter.
    pub doc_types: Option<Vec<String>>,
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
    pub slice_years: Option<u32>,
    /// `c,cc,ccv` selection threshold.
    pub threshold: Option<String>,
    pub top_n: Option<u32>,
    pub burst_s: Option<f64>,
    pub burst_gamma: Option<f64>,
    /// `sum` or `strongest`.
    pub burst_aggregation: Option<String>,
    /// `max` or `minmax`.
    pub normalization: Option<String>,
    pub rank_by: Option<String>,
    pub k: Option<usize>,
    pub out: Option<PathBuf>,
}

macro_rules! overlay_fields {
    ($base:expr, $over:expr, $($field:ident),*) => {
        $( if $over.$field.is_some() { $base.$field = $over.$field.clone(); } )*
    };
}

impl AnalysisSection {
    /// Applies every value present in `over` on top of `self`.
    pub fn overlay(mut self, over: &AnalysisSection) -> Self {
        if over.top_n.is_some() {
            self.threshold = None;
        }
        if over.threshold.is_some() {
            self.top_n = None;
        }
        overlay_fields!(
            self,
            over,
            input,
            doc_types,
            year_min,
            year_max,
            slice_years,
            threshold,
            top_n,
            burst_s,
            burst_gamma,
            burst_aggregation,
            normalization,
            rank_by,
            k,
            out
        );
        self
    }

    pub fn resolve(&self) -> Result<PipelineConfig> {
        let inputs = self.input.clone().unwrap_or_default();
        if inputs.is_empty() {
            return Err(Error::ConfigInvalid("no input files given".into()));
        }

        let doc_types = match self.doc_types.as_deref() {
            None => Some(BTreeSet::from([DocType::Article])),
            Some(list) if list.iter().any(|d| d.eq_ignore_ascii_case("all")) => None,
            Some(list) => Some(list.iter().map(|d| DocType::from_raw(d)).collect()),
        };

        let years = match (self.year_min, self.year_max) {
            (None, None) => None,
            (lo, hi) => Some(YearRange::new(
                lo.unwrap_or(i32::MIN),
                hi.unwrap_or(i32::MAX),
            )?),
        };

        let threshold = match (&self.threshold, self.top_n) {
            (Some(_), Some(_)) => {
                return Err(Error::ConfigInvalid(
                    "threshold and top_n are mutually exclusive".into(),
                ))
            }
            (Some(t), None) => SelectionThreshold::parse_triple(t)?,
            (None, Some(n)) => SelectionThreshold::top_n(n)?,
            (None, None) => SelectionThreshold::top_n(DEFAULT_TOP_N)?,
        };

        let defaults = BurstParams::default();
        let burst = BurstParams::new(
            self.burst_s.unwrap_or(defaults.s()),
            self.burst_gamma.unwrap_or(defaults.gamma()),
        )?;
        let aggregation = match self.burst_aggregation.as_deref() {
            None | Some("sum") => BurstAggregation::Sum,
            Some("strongest") => BurstAggregation::Strongest,
            Some(other) => {
                return Err(Error::ConfigInvalid(format!(
                    "unknown burst aggregation {other:?}"
                )))
            }
        };
        let normalization = match self.normalization.as_deref() {
            None => NormalizationMode::Max,
            Some(s) => s.parse()?,
        };
        let rank_by = match self.rank_by.as_deref() {
            None => Metric::Sigma2,
            Some(s) => s.parse()?,
        };
        let k = self.k.unwrap_or(DEFAULT_RANK_K);
        if k == 0 {
            return Err(Error::ConfigInvalid("k must be at least 1".into()));
        }
        let slice_years = self.slice_years.unwrap_or(DEFAULT_SLICE_YEARS);
        if slice_years == 0 {
            return Err(Error::ConfigInvalid("slice_years must be positive".into()));
        }
        let out = self
            .out
            .clone()
            .ok_or_else(|| Error::ConfigInvalid("no output directory given".into()))?;

        Ok(PipelineConfig {
            inputs,
            doc_types,
            years,
            slice_years,
            threshold,
            metrics: MetricsConfig {
                burst,
                aggregation,
                normalization,
            },
            rank_by,
            k,
            out,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    /// `None` keeps every document type.
    pub doc_types: Option<BTreeSet<DocType>>,
    pub years: Option<YearRange>,
    pub slice_years: u32,
    pub threshold: SelectionThreshold,
    pub metrics: MetricsConfig,
    pub rank_by: Metric,
    pub k: usize,
    pub out: PathBuf,
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    /// `brokerage`, `preferential_attachment`, `uniform` or `compare`.
    pub mechanism: Option<String>,
    pub seed_communities: Option<usize>,
    pub seed_size: Option<usize>,
    pub intra_p: Option<f64>,
    pub steps: Option<usize>,
    pub links_per_node: Option<usize>,
    pub rng_seed: Option<u64>,
    pub runs: Option<usize>,
    pub out: Option<PathBuf>,
}

impl SimulationSection {
    pub fn overlay(mut self, over: &SimulationSection) -> Self {
        overlay_fields!(
            self,
            over,
            mechanism,
            seed_communities,
            seed_size,
            intra_p,
            steps,
            links_per_node,
            rng_seed,
            runs,
            out
        );
        self
    }

    pub fn resolve(&self) -> Result<SimulationConfig> {
        let mode = match self.mechanism.as_deref() {
            None | Some("compare") => SimulationMode::Compare,
            Some(other) => SimulationMode::Single(other.parse()?),
        };
        let mechanism = match mode {
            SimulationMode::Compare => Mechanism::Brokerage,
            SimulationMode::Single(m) => m,
        };
        let growth = GrowthConfig {
            mechanism,
            seed_communities: self.seed_communities.unwrap_or(4),
            seed_size: self.seed_size.unwrap_or(10),
            intra_p: self.intra_p.unwrap_or(0.6),
            steps: self.steps.unwrap_or(30),
            links_per_node: self.links_per_node.unwrap_or(2),
            rng_seed: self.rng_seed.unwrap_or(0),
        };
        growth.validate()?;
        if mode == SimulationMode::Compare {
            growth
                .with_mechanism(Mechanism::PreferentialAttachment)
                .validate()?;
        }
        let runs = self.runs.unwrap_or(1);
        if runs == 0 {
            return Err(Error::ConfigInvalid("runs must be positive".into()));
        }
        let out = self
            .out
            .clone()
            .ok_or_else(|| Error::ConfigInvalid("no output directory given".into()))?;
        Ok(SimulationConfig {
            mode,
            growth,
            runs,
            out,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulationMode {
    /// Brokerage against preferential attachment with paired seeds.
    Compare,
    Single(Mechanism),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub mode: SimulationMode,
    pub growth: GrowthConfig,
    pub runs: usize,
    pub out: PathBuf,
}
