//! Per-node indicators of a co-citation network and the sigma indices built
//! from them.
//!
//! Three raw properties are computed for every node: total citations,
//! betweenness centrality on the unweighted network and total burst weight of
//! its citation ring. Each is scaled into `[0, 1]` (the `rho` values) and the
//! sigma indices are geometric means of chosen `rho` values.

pub mod betweenness;
pub mod burst;
pub mod correlation;
pub mod sigma;

use rayon::prelude::*;
use serde::Serialize;

pub use betweenness::betweenness;
pub use burst::{detect_bursts, BurstAggregation, BurstInterval, BurstParams, BurstResult};
pub use correlation::{pearson, pearson_matrix, CorrelationMatrix};
pub use sigma::{
    geometric_mean, normalize, normalize_values, sigma, Metric, NormalizationMode, Property, Rho,
    SigmaConfig,
};

use crate::error::Result;
use crate::ingest::CitedRefKey;
use crate::network::{CitationRing, CoCitationNetwork};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeMetrics {
    pub key: CitedRefKey,
    pub citation_raw: u64,
    pub centrality_raw: f64,
    pub burst_raw: f64,
    /// Highest observed-over-base rate ratio among the bursts, 0 if none.
    pub burst_ratio: f64,
    pub bursts: Vec<BurstInterval>,
    pub rho: Rho,
    pub sigma2: f64,
    pub sigma3: f64,
}

impl NodeMetrics {
    /// Metrics from already-normalized values, as printed in published
    /// rankings. Raw fields mirror the `rho` values.
    pub fn from_rho(key: CitedRefKey, citation_raw: u64, rho: Rho) -> Self {
        NodeMetrics {
            key,
            citation_raw,
            centrality_raw: rho.centrality,
            burst_raw: rho.burst,
            burst_ratio: 0.0,
            bursts: Vec::new(),
            sigma2: sigma(&rho, &SigmaConfig::sigma2()),
            sigma3: sigma(&rho, &SigmaConfig::sigma3()),
            rho,
        }
    }

    pub fn value(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Citation => self.rho.citation,
            Metric::Centrality => self.rho.centrality,
            Metric::Burst => self.rho.burst,
            Metric::Sigma2 => self.sigma2,
            Metric::Sigma3 => self.sigma3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MetricsConfig {
    pub burst: BurstParams,
    pub aggregation: BurstAggregation,
    pub normalization: NormalizationMode,
}

/// Yearly totals over the contiguous span of years present in the network,
/// zero-filled.
pub fn contiguous_totals(network: &CoCitationNetwork) -> CitationRing {
    let totals = network.yearly_totals();
    let (Some(&lo), Some(&hi)) = (totals.keys().next(), totals.keys().next_back()) else {
        return totals;
    };
    (lo..=hi)
        .map(|y| (y, totals.get(&y).copied().unwrap_or(0)))
        .collect()
}

/// Computes metrics for every node, in key order.
pub fn compute_metrics(
    network: &CoCitationNetwork,
    cfg: &MetricsConfig,
) -> Result<Vec<NodeMetrics>> {
    let centrality = betweenness(&network.adjacency());
    let totals = contiguous_totals(network);

    let bursts: Vec<BurstResult> = network
        .nodes
        .par_iter()
        .map(|(_, node)| detect_bursts(&node.citation_ring, &totals, cfg.burst))
        .collect::<Result<_>>()?;

    let citations: Vec<u64> = network
        .nodes
        .values()
        .map(|n| n.total_citations())
        .collect();
    let burst_raw: Vec<f64> = bursts.iter().map(|b| b.score(cfg.aggregation)).collect();

    let rho_citation = normalize_values(
        &citations.iter().map(|&c| c as f64).collect::<Vec<_>>(),
        cfg.normalization,
    );
    let rho_centrality = normalize_values(&centrality, cfg.normalization);
    let rho_burst = normalize_values(&burst_raw, cfg.normalization);

    let metrics = network
        .nodes
        .keys()
        .zip(bursts)
        .enumerate()
        .map(|(i, (key, burst))| {
            let rho = Rho {
                citation: rho_citation[i],
                centrality: rho_centrality[i],
                burst: rho_burst[i],
            };
            NodeMetrics {
                key: key.clone(),
                citation_raw: citations[i],
                centrality_raw: centrality[i],
                burst_raw: burst_raw[i],
                burst_ratio: burst.peak_rate_ratio(),
                bursts: burst.intervals,
                sigma2: sigma(&rho, &SigmaConfig::sigma2()),
                sigma3: sigma(&rho, &SigmaConfig::sigma3()),
                rho,
            }
        })
        .collect();
    Ok(metrics)
}

/// Top `k` nodes by `by`, descending. Ties go to more citations, then the
/// earlier publication year, then key order.
pub fn rank_candidates(metrics: &[NodeMetrics], by: Metric, k: usize) -> Vec<&NodeMetrics> {
    let mut ranked: Vec<&NodeMetrics> = metrics.iter().collect();
    ranked.sort_by(|a, b| {
        b.value(by)
            .total_cmp(&a.value(by))
            .then_with(|| b.citation_raw.cmp(&a.citation_raw))
            .then_with(|| a.key.year_order().cmp(&b.key.year_order()))
            .then_with(|| a.key.cmp(&b.key))
    });
    ranked.truncate(k);
    ranked
}
