//! Network growth under preferential attachment versus brokerage.
//!
//! Every run starts from `seed_communities` disjoint random blocks (each pair
//! inside a block linked with probability `intra_p`, no links between blocks)
//! and then adds `steps` nodes one at a time:
//!
//! * `PreferentialAttachment`: `m` distinct targets drawn with probability
//!   proportional to current degree.
//! * `Brokerage`: two distinct seed communities drawn uniformly; `ceil(m/2)`
//!   targets uniform inside the first and `floor(m/2)` inside the second.
//! * `Uniform`: `m` distinct targets uniform over existing nodes (control).

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::betweenness;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    PreferentialAttachment,
    Brokerage,
    Uniform,
}

impl Mechanism {
    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::PreferentialAttachment => "preferential_attachment",
            Mechanism::Brokerage => "brokerage",
            Mechanism::Uniform => "uniform",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "preferential_attachment" | "pa" => Ok(Mechanism::PreferentialAttachment),
            "brokerage" => Ok(Mechanism::Brokerage),
            "uniform" => Ok(Mechanism::Uniform),
            other => Err(Error::ConfigInvalid(format!("unknown mechanism {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub mechanism: Mechanism,
    pub seed_communities: usize,
    pub seed_size: usize,
    pub intra_p: f64,
    pub steps: usize,
    pub links_per_node: usize,
    pub rng_seed: u64,
}

impl GrowthConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::ConfigInvalid(msg));
        if self.seed_communities == 0 || self.seed_size == 0 {
            return fail("seed_communities and seed_size must be positive".into());
        }
        if self.links_per_node == 0 {
            return fail("links_per_node must be positive".into());
        }
        if !(self.intra_p > 0.0 && self.intra_p <= 1.0) {
            return fail(format!("intra_p must lie in (0, 1], got {}", self.intra_p));
        }
        if self.seed_size * self.seed_communities < self.links_per_node + 1 {
            return fail("seed_size * seed_communities must be at least links_per_node + 1".into());
        }
        if self.mechanism == Mechanism::Brokerage {
            if self.seed_communities < 2 {
                return fail("brokerage needs at least two seed communities".into());
            }
            if self.links_per_node < 2 {
                return fail("brokerage needs at least two links per node".into());
            }
        }
        Ok(())
    }

    pub fn with_mechanism(self, mechanism: Mechanism) -> Self {
        GrowthConfig { mechanism, ..self }
    }

    pub fn with_seed(self, rng_seed: u64) -> Self {
        GrowthConfig { rng_seed, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AddedNode {
    pub node: usize,
    pub step: usize,
    pub mechanism: Mechanism,
    /// Links requested from the node when it arrived.
    pub links: usize,
    /// Degree in the final network.
    pub degree: usize,
    /// Normalized betweenness in the final network.
    pub betweenness: f64,
    /// Seed communities of its targets, sorted and deduplicated.
    pub target_communities: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub config: GrowthConfig,
    pub adjacency: Vec<Vec<usize>>,
    /// Seed community of each node; `None` for added nodes.
    pub community: Vec<Option<usize>>,
    pub seed_edges: usize,
    pub added: Vec<AddedNode>,
}

impl SimResult {
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }
}

struct Growing {
    adjacency: Vec<Vec<usize>>,
    community: Vec<Option<usize>>,
}

impl Growing {
    fn link(&mut self, a: usize, b: usize) {
        debug_assert!(a != b && !self.adjacency[a].contains(&b));
        self.adjacency[a].push(b);
        self.adjacency[b].push(a);
    }
}

fn seed_graph(cfg: &GrowthConfig, rng: &mut ChaCha8Rng) -> Growing {
    let n = cfg.seed_communities * cfg.seed_size;
    let mut g = Growing {
        adjacency: vec![Vec::new(); n],
        community: (0..n).map(|v| Some(v / cfg.seed_size)).collect(),
    };
    for c in 0..cfg.seed_communities {
        let base = c * cfg.seed_size;
        for i in 0..cfg.seed_size {
            for j in i + 1..cfg.seed_size {
                if rng.random_bool(cfg.intra_p) {
                    g.link(base + i, base + j);
                }
            }
        }
    }
    g
}

/// Degree-proportional sampling of up to `m` distinct existing nodes. Falls
/// back to uniform choice when every remaining candidate has degree 0.
fn preferential_targets(g: &Growing, m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = g.adjacency.len();
    let mut chosen = vec![false; n];
    let mut targets = Vec::with_capacity(m);
    while targets.len() < m.min(n) {
        let weight: usize = (0..n)
            .filter(|&v| !chosen[v])
            .map(|v| g.adjacency[v].len())
            .sum();
        let pick = if weight == 0 {
            let open: Vec<usize> = (0..n).filter(|&v| !chosen[v]).collect();
            open[rng.random_range(0..open.len())]
        } else {
            let mut r = rng.random_range(0..weight);
            let mut pick = n;
            for v in (0..n).filter(|&v| !chosen[v]) {
                let d = g.adjacency[v].len();
                if r < d {
                    pick = v;
                    break;
                }
                r -= d;
            }
            pick
        };
        chosen[pick] = true;
        targets.push(pick);
    }
    targets
}

fn uniform_targets(pool: &[usize], m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let amount = m.min(pool.len());
    index::sample(rng, pool.len(), amount)
        .into_iter()
        .map(|i| pool[i])
        .collect()
}

fn brokerage_targets(cfg: &GrowthConfig, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let k = cfg.seed_communities;
    let first = rng.random_range(0..k);
    let mut second = rng.random_range(0..k - 1);
    if second >= first {
        second += 1;
    }
    let m = cfg.links_per_node;
    let members =
        |c: usize| -> Vec<usize> { (c * cfg.seed_size..(c + 1) * cfg.seed_size).collect() };
    let mut targets = uniform_targets(&members(first), m.div_ceil(2), rng);
    targets.extend(uniform_targets(&members(second), m / 2, rng));
    targets
}

/// Runs one growth simulation. Deterministic for a given configuration.
pub fn simulate(cfg: &GrowthConfig) -> Result<SimResult> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut g = seed_graph(cfg, &mut rng);
    let seed_edges = g.adjacency.iter().map(Vec::len).sum::<usize>() / 2;

    let mut arrivals = Vec::with_capacity(cfg.steps);
    for step in 0..cfg.steps {
        let targets = match cfg.mechanism {
            Mechanism::PreferentialAttachment => {
                preferential_targets(&g, cfg.links_per_node, &mut rng)
            }
            Mechanism::Uniform => {
                let pool: Vec<usize> = (0..g.adjacency.len()).collect();
                uniform_targets(&pool, cfg.links_per_node, &mut rng)
            }
            Mechanism::Brokerage => brokerage_targets(cfg, &mut rng),
        };
        let node = g.adjacency.len();
        g.adjacency.push(Vec::new());
        g.community.push(None);
        let mut communities: Vec<usize> = targets.iter().filter_map(|&t| g.community[t]).collect();
        communities.sort_unstable();
        communities.dedup();
        for &t in &targets {
            g.link(node, t);
        }
        arrivals.push((node, step, targets.len(), communities));
    }

    let centrality = betweenness(&g.adjacency);
    let added = arrivals
        .into_iter()
        .map(|(node, step, links, target_communities)| AddedNode {
            node,
            step,
            mechanism: cfg.mechanism,
            links,
            degree: g.adjacency[node].len(),
            betweenness: centrality[node],
            target_communities,
        })
        .collect();

    Ok(SimResult {
        config: *cfg,
        adjacency: g.adjacency,
        community: g.community,
        seed_edges,
        added,
    })
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    Some(if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    })
}

/// Median betweenness of added nodes whose final degree equals the number
/// of links each node brings.
pub fn degree_matched_median(result: &SimResult) -> Option<f64> {
    let m = result.config.links_per_node;
    let values: Vec<f64> = result
        .added
        .iter()
        .filter(|a| a.degree == m)
        .map(|a| a.betweenness)
        .collect();
    median(&values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunComparison {
    pub run: usize,
    pub rng_seed: u64,
    pub median_first: Option<f64>,
    pub median_second: Option<f64>,
    /// `median_first / median_second`; undefined if either side is undefined
    /// or the denominator is zero.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub first: Mechanism,
    pub second: Mechanism,
    pub runs: Vec<RunComparison>,
    pub median_ratio: Option<f64>,
    /// Runs in which the first mechanism's median strictly exceeds the second's.
    pub first_wins: usize,
}

/// Runs both configurations `runs` times with paired seeds
/// (`rng_seed + run`) and compares degree-matched medians.
pub fn compare_mechanisms(
    first: &GrowthConfig,
    second: &GrowthConfig,
    runs: usize,
) -> Result<Comparison> {
    run_comparison(first, second, runs).map(|(_, comparison)| comparison)
}

pub(crate) fn summarize(
    first: Mechanism,
    second: Mechanism,
    results: &[(SimResult, SimResult)],
) -> Comparison {
    let runs: Vec<RunComparison> = results
        .iter()
        .enumerate()
        .map(|(run, (a, b))| {
            let median_first = degree_matched_median(a);
            let median_second = degree_matched_median(b);
            let ratio = match (median_first, median_second) {
                (Some(x), Some(y)) if y > 0.0 => Some(x / y),
                _ => None,
            };
            RunComparison {
                run,
                rng_seed: a.config.rng_seed,
                median_first,
                median_second,
                ratio,
            }
        })
        .collect();
    let ratios: Vec<f64> = runs.iter().filter_map(|r| r.ratio).collect();
    let first_wins = runs
        .iter()
        .filter(|r| matches!((r.median_first, r.median_second), (Some(x), Some(y)) if x > y))
        .count();
    Comparison {
        first,
        second,
        median_ratio: median(&ratios),
        runs,
        first_wins,
    }
}

/// Like [`compare_mechanisms`], also returning every simulated pair.
pub fn run_comparison(
    first: &GrowthConfig,
    second: &GrowthConfig,
    runs: usize,
) -> Result<(Vec<(SimResult, SimResult)>, Comparison)> {
    if runs == 0 {
        return Err(Error::ConfigInvalid("runs must be positive".into()));
    }
    if *first != second.with_mechanism(first.mechanism) {
        return Err(Error::ConfigInvalid(
            "compared configurations may differ only in mechanism".into(),
        ));
    }
    first.validate()?;
    second.validate()?;
    let results: Vec<(SimResult, SimResult)> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let seed = first.rng_seed.wrapping_add(run as u64);
            Ok((
                simulate(&first.with_seed(seed))?,
                simulate(&second.with_seed(seed))?,
            ))
        })
        .collect::<Result<_>>()?;
    let comparison = summarize(first.mechanism, second.mechanism, &results);
    Ok((results, comparison))
}
