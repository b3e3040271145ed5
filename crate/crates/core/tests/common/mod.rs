//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls into the code paths being checked; the oracles work
//! from the definitions directly and favour clarity over speed.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use cocite::ingest::{BibRecord, CitedRefKey, Corpus, DocType};
use cocite::network::TimeSlice;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

// ---------------------------------------------------------------- betweenness

fn simple_paths(
    adj: &[Vec<usize>],
    at: usize,
    target: usize,
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if at == target {
        out.push(path.clone());
        return;
    }
    for &next in &adj[at] {
        if !path.contains(&next) {
            path.push(next);
            simple_paths(adj, next, target, path, out);
            path.pop();
        }
    }
}

/// Betweenness by listing every simple path between every pair and keeping
/// the shortest ones. Normalized by the number of unordered pairs not
/// containing the node.
pub fn brute_betweenness(adj: &[Vec<usize>]) -> Vec<f64> {
    let n = adj.len();
    let mut score = vec![0.0; n];
    if n <= 2 {
        return score;
    }
    for s in 0..n {
        for t in s + 1..n {
            let mut paths = Vec::new();
            simple_paths(adj, s, t, &mut vec![s], &mut paths);
            let Some(shortest) = paths.iter().map(Vec::len).min() else {
                continue;
            };
            let geodesics: Vec<&Vec<usize>> =
                paths.iter().filter(|p| p.len() == shortest).collect();
            let total = geodesics.len() as f64;
            for (v, sc) in score.iter_mut().enumerate() {
                if v == s || v == t {
                    continue;
                }
                let through = geodesics.iter().filter(|p| p.contains(&v)).count() as f64;
                *sc += through / total;
            }
        }
    }
    let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
    score.iter().map(|s| s / pairs).collect()
}

pub fn graph_from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

pub fn is_connected(adj: &[Vec<usize>]) -> bool {
    if adj.is_empty() {
        return true;
    }
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Every labeled graph on `n` nodes, one per subset of the possible edges.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Vec<Vec<usize>>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        graph_from_edges(n, &edges)
    })
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<Vec<usize>> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    graph_from_edges(n, &edges)
}

pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<usize>> {
    loop {
        let p = rng.random_range(0.2..0.9);
        let g = random_graph(rng, n, p);
        if is_connected(&g) {
            return g;
        }
    }
}

// ---------------------------------------------------------------- bursts

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Negative log binomial likelihood.
pub fn binomial_cost(r: u64, n: u64, p: f64) -> f64 {
    let ln_choose = ln_factorial(n) - ln_factorial(r) - ln_factorial(n - r);
    let hits = if r == 0 { 0.0 } else { r as f64 * p.ln() };
    let misses = if n == r {
        0.0
    } else {
        (n - r) as f64 * (1.0 - p).ln()
    };
    -(ln_choose + hits + misses)
}

#[derive(Debug)]
pub struct BruteBurst {
    pub states: Vec<bool>,
    pub cost: f64,
    /// Cost saved by the burst state, one entry per maximal burst run.
    pub weights: Vec<f64>,
}

/// Scores every one of the `2^Y` state sequences. Among sequences within a
/// relative `1e-9` of the optimum the lexicographically smallest one wins
/// (base before burst, earliest year first).
pub fn brute_bursts(counts: &[u64], totals: &[u64], s: f64, gamma: f64) -> BruteBurst {
    let years = counts.len();
    let all: u64 = totals.iter().sum();
    if all == 0 {
        return BruteBurst {
            states: vec![false; years],
            cost: 0.0,
            weights: Vec::new(),
        };
    }
    let p0 = counts.iter().sum::<u64>() as f64 / all as f64;
    let p1 = (s * p0).min(1.0);
    let entry = gamma * (years as f64).ln();

    let decode = |mask: u64| -> Vec<bool> {
        (0..years)
            .map(|t| mask >> (years - 1 - t) & 1 == 1)
            .collect()
    };
    let cost_of = |seq: &[bool]| -> f64 {
        let mut prev = false;
        let mut c = 0.0;
        for (t, &burst) in seq.iter().enumerate() {
            c += binomial_cost(counts[t], totals[t], if burst { p1 } else { p0 });
            if burst && !prev {
                c += entry;
            }
            prev = burst;
        }
        c
    };

    let costs: Vec<f64> = (0u64..1 << years).map(|m| cost_of(&decode(m))).collect();
    let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * (1.0 + best.abs());
    let mask = (0u64..1 << years)
        .find(|&m| costs[m as usize] <= best + tol)
        .unwrap();
    let states = decode(mask);

    let mut weights = Vec::new();
    let mut current: Option<f64> = None;
    for (t, &burst) in states.iter().enumerate() {
        if burst {
            let saved =
                binomial_cost(counts[t], totals[t], p0) - binomial_cost(counts[t], totals[t], p1);
            *current.get_or_insert(0.0) += saved;
        } else if let Some(w) = current.take() {
            weights.push(w);
        }
    }
    weights.extend(current);

    BruteBurst {
        states,
        cost: costs[mask as usize],
        weights,
    }
}

// ---------------------------------------------------------------- co-citation

/// Pair counts by a double loop over each record's distinct selected
/// references; the value is `(count, earliest citing year)`.
pub fn naive_cocitations(
    corpus: &Corpus,
    slice: TimeSlice,
    selected: &[CitedRefKey],
) -> BTreeMap<(CitedRefKey, CitedRefKey), (u32, i32)> {
    let mut out: BTreeMap<(CitedRefKey, CitedRefKey), (u32, i32)> = BTreeMap::new();
    for record in corpus.records() {
        let Some(year) = record.year else { continue };
        if year < slice.start_year || year > slice.end_year {
            continue;
        }
        let mut refs: Vec<&CitedRefKey> = Vec::new();
        for r in &record.cited_refs {
            if selected.contains(r) && !refs.contains(&r) {
                refs.push(r);
            }
        }
        for i in 0..refs.len() {
            for j in i + 1..refs.len() {
                let (a, b) = if refs[i] < refs[j] {
                    (refs[i], refs[j])
                } else {
                    (refs[j], refs[i])
                };
                let entry = out.entry((a.clone(), b.clone())).or_insert((0, year));
                entry.0 += 1;
                entry.1 = entry.1.min(year);
            }
        }
    }
    out
}

pub fn key_pool(n: usize) -> Vec<CitedRefKey> {
    (0..n)
        .map(|i| {
            let vol = (i % 40 + 1).to_string();
            CitedRefKey::new(
                &format!("AUTHOR{i:02} X"),
                Some(1980 + (i % 15) as i32),
                "J TEST",
                Some(&vol),
                None,
            )
        })
        .collect()
}

/// Random corpus over `pool`; a few records lack a year and citation lists
/// may repeat a reference.
pub fn random_corpus(
    rng: &mut ChaCha8Rng,
    records: usize,
    pool: &[CitedRefKey],
    years: (i32, i32),
) -> Corpus {
    let recs = (0..records)
        .map(|i| {
            let cites = rng.random_range(0..=8);
            BibRecord {
                id: format!("R{i}"),
                authors: vec!["TEST A".into()],
                year: if rng.random_bool(0.05) {
                    None
                } else {
                    Some(rng.random_range(years.0..=years.1))
                },
                source: "J TEST".into(),
                doc_type: DocType::Article,
                cited_refs: (0..cites)
                    .map(|_| pool.choose(rng).unwrap().clone())
                    .collect(),
            }
        })
        .collect();
    Corpus::new(recs)
}

// ---------------------------------------------------------------- correlation

pub fn two_pass_pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
