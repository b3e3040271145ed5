//! Normalization of raw node properties and their geometric-mean combination.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMode {
    /// `x / max`; the top node maps to exactly 1.
    #[default]
    Max,
    /// `(x - min) / (max - min)`.
    MinMax,
}

impl FromStr for NormalizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(NormalizationMode::Max),
            "minmax" | "min_max" => Ok(NormalizationMode::MinMax),
            other => Err(Error::ConfigInvalid(format!(
                "unknown normalization {other:?}"
            ))),
        }
    }
}

/// Scales non-negative raw values into `[0, 1]`. A zero (or, for min-max, a
/// constant) column maps to all zeros.
pub fn normalize_values(raw: &[f64], mode: NormalizationMode) -> Vec<f64> {
    let max = raw.iter().copied().fold(0.0, f64::max);
    match mode {
        NormalizationMode::Max => {
            if max > 0.0 {
                raw.iter().map(|&x| x / max).collect()
            } else {
                vec![0.0; raw.len()]
            }
        }
        NormalizationMode::MinMax => {
            let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
            let span = max - min;
            if span > 0.0 {
                raw.iter().map(|&x| (x - min) / span).collect()
            } else {
                vec![0.0; raw.len()]
            }
        }
    }
}

pub fn normalize<K: Ord + Clone>(
    raw: &BTreeMap<K, f64>,
    mode: NormalizationMode,
) -> BTreeMap<K, f64> {
    let values: Vec<f64> = raw.values().copied().collect();
    raw.keys()
        .cloned()
        .zip(normalize_values(&values, mode))
        .collect()
}

/// A node property that can enter a sigma index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Citation,
    Centrality,
    Burst,
}

/// Ordered, duplicate-free selection of properties combined by [`sigma`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaConfig {
    properties: Vec<Property>,
}

impl SigmaConfig {
    pub fn new(properties: Vec<Property>) -> Result<Self> {
        if properties.is_empty() {
            return Err(Error::ConfigInvalid(
                "sigma needs at least one property".into(),
            ));
        }
        let unique: BTreeSet<_> = properties.iter().collect();
        if unique.len() != properties.len() {
            return Err(Error::ConfigInvalid("duplicate sigma property".into()));
        }
        Ok(SigmaConfig { properties })
    }

    pub fn sigma2() -> Self {
        SigmaConfig {
            properties: vec![Property::Burst, Property::Centrality],
        }
    }

    pub fn sigma3() -> Self {
        SigmaConfig {
            properties: vec![Property::Burst, Property::Centrality, Property::Citation],
        }
    }

    pub fn properties(&self) -> &[Property] {
        &self.properties
    }
}

/// Normalized property values of one node.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Rho {
    pub citation: f64,
    pub centrality: f64,
    pub burst: f64,
}

impl Rho {
    pub fn get(&self, property: Property) -> f64 {
        match property {
            Property::Citation => self.citation,
            Property::Centrality => self.centrality,
            Property::Burst => self.burst,
        }
    }
}

/// Geometric mean of values in `[0, 1]`.
pub fn geometric_mean(values: &[f64]) -> f64 {
    let product: f64 = values.iter().product();
    match values.len() {
        0 => 0.0,
        1 => product,
        2 => product.sqrt(),
        3 => product.cbrt(),
        n => product.powf(1.0 / n as f64),
    }
}

pub fn sigma(rho: &Rho, cfg: &SigmaConfig) -> f64 {
    let values: Vec<f64> = cfg.properties.iter().map(|&p| rho.get(p)).collect();
    geometric_mean(&values)
}

/// Column selectors for ranking and correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Citation,
    Centrality,
    Burst,
    Sigma2,
    Sigma3,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Citation,
        Metric::Burst,
        Metric::Centrality,
        Metric::Sigma2,
        Metric::Sigma3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Citation => "rho_citation",
            Metric::Centrality => "rho_centrality",
            Metric::Burst => "rho_burst",
            Metric::Sigma2 => "sigma2",
            Metric::Sigma3 => "sigma3",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Metric::Citation => "citation",
            Metric::Centrality => "centrality",
            Metric::Burst => "burst",
            Metric::Sigma2 => "sigma2",
            Metric::Sigma3 => "sigma3",
        };
        f.write_str(s)
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "citation" => Ok(Metric::Citation),
            "centrality" => Ok(Metric::Centrality),
            "burst" => Ok(Metric::Burst),
            "sigma2" => Ok(Metric::Sigma2),
            "sigma3" => Ok(Metric::Sigma3),
            other => Err(Error::ConfigInvalid(format!(
                "unknown ranking selector {other:?}"
            ))),
        }
    }
}
