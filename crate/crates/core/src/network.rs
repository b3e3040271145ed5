//! Time-sliced document co-citation networks.
//!
//! Each slice selects the cited references that pass a [`SelectionThreshold`]
//! among the records published in that slice, counts how often every pair of
//! selected references is cited together, and the slice networks are merged
//! into one panoramic [`CoCitationNetwork`].

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{CitedRefKey, Corpus};

/// Per-year citation counts of a single reference.
pub type CitationRing = BTreeMap<i32, u32>;

/// Citation rings of every reference cited within one slice.
pub type SliceCounts = BTreeMap<CitedRefKey, CitationRing>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TimeSlice {
    pub start_year: i32,
    pub end_year: i32,
}

impl TimeSlice {
    pub fn contains(&self, year: i32) -> bool {
        (self.start_year..=self.end_year).contains(&year)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SelectionThreshold {
    /// Keep the `n` most cited references of each slice.
    TopN { n: u32 },
    /// `c`: minimum citations in a single year of the slice; `cc`: minimum
    /// co-citation count; `ccv`: minimum cosine co-citation coefficient x100.
    Triple { c: u32, cc: u32, ccv: u32 },
}

impl SelectionThreshold {
    pub fn top_n(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidThreshold("top-n must be positive".into()));
        }
        Ok(SelectionThreshold::TopN { n })
    }

    pub fn triple(c: u32, cc: u32, ccv: u32) -> Result<Self> {
        if c == 0 || cc == 0 || ccv == 0 {
            return Err(Error::InvalidThreshold(format!(
                "all components must be positive, got {c},{cc},{ccv}"
            )));
        }
        Ok(SelectionThreshold::Triple { c, cc, ccv })
    }

    /// Parses the `c,cc,ccv` caption form, e.g. `3,3,20`.
    pub fn parse_triple(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let nums: Option<Vec<u32>> = parts.iter().map(|p| p.parse().ok()).collect();
        match nums.as_deref() {
            Some(&[c, cc, ccv]) => SelectionThreshold::triple(c, cc, ccv),
            _ => Err(Error::InvalidThreshold(format!(
                "expected c,cc,ccv, got {text:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeRecord {
    pub citation_ring: CitationRing,
    pub first_seen_slice: usize,
}

impl NodeRecord {
    pub fn total_citations(&self) -> u64 {
        self.citation_ring.values().map(|&c| u64::from(c)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EdgeRecord {
    pub cocite_count: u32,
    pub first_year: i32,
}

/// Unordered pair of distinct references, stored smaller-first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey(CitedRefKey, CitedRefKey);

impl EdgeKey {
    /// Returns `None` for a self pair.
    pub fn new(a: CitedRefKey, b: CitedRefKey) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(EdgeKey(a, b)),
            std::cmp::Ordering::Greater => Some(EdgeKey(b, a)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn first(&self) -> &CitedRefKey {
        &self.0
    }

    pub fn second(&self) -> &CitedRefKey {
        &self.1
    }
}

pub type EdgeMap = BTreeMap<EdgeKey, EdgeRecord>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoCitationNetwork {
    pub nodes: BTreeMap<CitedRefKey, NodeRecord>,
    pub edges: EdgeMap,
}

impl CoCitationNetwork {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Folds `other` into `self`: rings summed per year, edge counts summed,
    /// earliest first year and first slice kept.
    pub fn merge(&mut self, other: &CoCitationNetwork) {
        for (key, node) in &other.nodes {
            match self.nodes.get_mut(key) {
                Some(existing) => {
                    for (&year, &count) in &node.citation_ring {
                        *existing.citation_ring.entry(year).or_insert(0) += count;
                    }
                    existing.first_seen_slice =
                        existing.first_seen_slice.min(node.first_seen_slice);
                }
                None => {
                    self.nodes.insert(key.clone(), node.clone());
                }
            }
        }
        for (key, edge) in &other.edges {
            match self.edges.get_mut(key) {
                Some(existing) => {
                    existing.cocite_count += edge.cocite_count;
                    existing.first_year = existing.first_year.min(edge.first_year);
                }
                None => {
                    self.edges.insert(key.clone(), *edge);
                }
            }
        }
    }

    /// Per-year citation totals summed over all node rings.
    pub fn yearly_totals(&self) -> CitationRing {
        let mut totals = CitationRing::new();
        for node in self.nodes.values() {
            for (&year, &count) in &node.citation_ring {
                *totals.entry(year).or_insert(0) += count;
            }
        }
        totals
    }

    /// Adjacency lists indexed by the position of each node in key order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let index: HashMap<&CitedRefKey, usize> =
            self.nodes.keys().enumerate().map(|(i, k)| (k, i)).collect();
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for key in self.edges.keys() {
            let a = index[key.first()];
            let b = index[key.second()];
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// Partitions `[year_min, year_max]` of the dated records into contiguous
/// slices of `slice_length_years`; the last slice may be shorter.
pub fn slice_corpus(corpus: &Corpus, slice_length_years: u32) -> Result<Vec<TimeSlice>> {
    if slice_length_years == 0 {
        return Err(Error::ConfigInvalid("slice length must be positive".into()));
    }
    let (lo, hi) = match (corpus.year_min(), corpus.year_max()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => return Err(Error::EmptyCorpus),
    };
    let step = slice_length_years as i32;
    let mut slices = Vec::new();
    let mut start = lo;
    while start <= hi {
        let end = start.saturating_add(step - 1).min(hi);
        slices.push(TimeSlice {
            start_year: start,
            end_year: end,
        });
        start = end + 1;
    }
    Ok(slices)
}

/// Citation rings of every reference cited by records published in `slice`.
/// A record counts once per distinct reference.
pub fn count_slice_citations(corpus: &Corpus, slice: TimeSlice) -> SliceCounts {
    let mut counts = SliceCounts::new();
    for (year, record) in corpus.dated_records() {
        if !slice.contains(year) {
            continue;
        }
        let distinct: BTreeSet<&CitedRefKey> = record.cited_refs.iter().collect();
        for key in distinct {
            *counts
                .entry(key.clone())
                .or_default()
                .entry(year)
                .or_insert(0) += 1;
        }
    }
    counts
}

fn ring_total(ring: &CitationRing) -> u64 {
    ring.values().map(|&c| u64::from(c)).sum()
}

/// Picks the references of one slice that enter its network.
///
/// `Triple` keeps references whose best single year reaches `c`. `TopN`
/// ranks by slice total, breaking ties by earlier publication year and then
/// key order.
pub fn select_nodes(counts: &SliceCounts, threshold: SelectionThreshold) -> BTreeSet<CitedRefKey> {
    match threshold {
        SelectionThreshold::Triple { c, .. } => counts
            .iter()
            .filter(|(_, ring)| ring.values().copied().max().unwrap_or(0) >= c)
            .map(|(key, _)| key.clone())
            .collect(),
        SelectionThreshold::TopN { n } => {
            let mut ranked: Vec<(&CitedRefKey, u64)> = counts
                .iter()
                .map(|(k, ring)| (k, ring_total(ring)))
                .collect();
            ranked.sort_by(|(ka, ta), (kb, tb)| {
                tb.cmp(ta)
                    .then_with(|| ka.year_order().cmp(&kb.year_order()))
                    .then_with(|| ka.cmp(kb))
            });
            ranked
                .into_iter()
                .take(n as usize)
                .map(|(k, _)| k.clone())
                .collect()
        }
    }
}

/// Counts co-citations among `selected` references over the records of
/// `slice`. Every record adds one to each unordered pair of distinct selected
/// references it cites.
pub fn count_cocitations(
    corpus: &Corpus,
    slice: TimeSlice,
    selected: &BTreeSet<CitedRefKey>,
) -> EdgeMap {
    let keys: Vec<&CitedRefKey> = selected.iter().collect();
    let index: HashMap<&CitedRefKey, u32> = keys
        .iter()
        .enumerate()
        .map(|(i, &k)| (k, i as u32))
        .collect();

    let mut acc: HashMap<(u32, u32), EdgeRecord> = HashMap::new();
    let mut cited: Vec<u32> = Vec::new();
    for (year, record) in corpus.dated_records() {
        if !slice.contains(year) {
            continue;
        }
        cited.clear();
        cited.extend(
            record
                .cited_refs
                .iter()
                .filter_map(|k| index.get(k).copied()),
        );
        cited.sort_unstable();
        cited.dedup();
        for (i, &a) in cited.iter().enumerate() {
            for &b in &cited[i + 1..] {
                acc.entry((a, b))
                    .and_modify(|e| {
                        e.cocite_count += 1;
                        e.first_year = e.first_year.min(year);
                    })
                    .or_insert(EdgeRecord {
                        cocite_count: 1,
                        first_year: year,
                    });
            }
        }
    }

    acc.into_iter()
        .map(|((a, b), edge)| {
            (
                EdgeKey(keys[a as usize].clone(), keys[b as usize].clone()),
                edge,
            )
        })
        .collect()
}

/// Drops edges below the `cc` count or `ccv` cosine coefficient of a
/// `Triple` threshold. `TopN` leaves edges untouched.
pub fn prune_edges(edges: EdgeMap, counts: &SliceCounts, threshold: SelectionThreshold) -> EdgeMap {
    let SelectionThreshold::Triple { cc, ccv, .. } = threshold else {
        return edges;
    };
    let total = |key: &CitedRefKey| counts.get(key).map(ring_total).unwrap_or(0) as f64;
    edges
        .into_iter()
        .filter(|(key, edge)| {
            if edge.cocite_count < cc {
                return false;
            }
            let denom = (total(key.first()) * total(key.second())).sqrt();
            denom > 0.0 && f64::from(edge.cocite_count) / denom * 100.0 >= f64::from(ccv)
        })
        .collect()
}

/// Builds the network of one slice.
pub fn slice_network(
    corpus: &Corpus,
    slice: TimeSlice,
    slice_index: usize,
    threshold: SelectionThreshold,
) -> CoCitationNetwork {
    let counts = count_slice_citations(corpus, slice);
    let selected = select_nodes(&counts, threshold);
    let edges = prune_edges(
        count_cocitations(corpus, slice, &selected),
        &counts,
        threshold,
    );
    let nodes = selected
        .into_iter()
        .map(|key| {
            let ring = counts[&key].clone();
            (
                key,
                NodeRecord {
                    citation_ring: ring,
                    first_seen_slice: slice_index,
                },
            )
        })
        .collect();
    CoCitationNetwork { nodes, edges }
}

/// Merges ordered slice networks into the panoramic network.
pub fn merge_slices(slice_networks: &[CoCitationNetwork]) -> CoCitationNetwork {
    let mut merged = CoCitationNetwork::default();
    for net in slice_networks {
        merged.merge(net);
    }
    merged
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceSummary {
    pub slice: TimeSlice,
    pub nodes: usize,
    pub edges: usize,
}

/// Slices the corpus, builds every slice network in parallel and merges them.
pub fn build_network(
    corpus: &Corpus,
    slice_length_years: u32,
    threshold: SelectionThreshold,
) -> Result<(Vec<SliceSummary>, CoCitationNetwork)> {
    let slices = slice_corpus(corpus, slice_length_years)?;
    let networks: Vec<CoCitationNetwork> = slices
        .par_iter()
        .enumerate()
        .map(|(i, &slice)| slice_network(corpus, slice, i, threshold))
        .collect();
    let summaries = slices
        .iter()
        .zip(&networks)
        .map(|(&slice, net)| SliceSummary {
            slice,
            nodes: net.node_count(),
            edges: net.edge_count(),
        })
        .collect();
    Ok((summaries, merge_slices(&networks)))
}
