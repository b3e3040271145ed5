//! Two-state burst detection over yearly citation counts.
//!
//! The base state emits citations at the reference's overall share of the
//! yearly totals, `p0`; the burst state at `min(s * p0, 1)`. A year's cost in
//! a state is the negative log binomial likelihood of the observed count.
//! Entering the burst state costs `gamma * ln(Y)`, leaving it is free, and the
//! automaton starts in the base state.
//!
//! Ties: among all minimum-cost state sequences the one that stays in the
//! base state earliest (lexicographically smallest, base < burst) is
//! returned. Costs closer than [`TIE_EPS`] (relative) are treated as equal.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::CitationRing;

/// Relative tolerance under which two path costs count as a tie.
pub const TIE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BurstParams {
    s: f64,
    gamma: f64,
}

impl BurstParams {
    pub fn new(s: f64, gamma: f64) -> Result<Self> {
        if !(s > 1.0 && s.is_finite()) {
            return Err(Error::InvalidBurstParams(format!(
                "s must exceed 1, got {s}"
            )));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidBurstParams(format!(
                "gamma must be non-negative, got {gamma}"
            )));
        }
        Ok(BurstParams { s, gamma })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Default for BurstParams {
    fn default() -> Self {
        BurstParams { s: 2.0, gamma: 1.0 }
    }
}

/// How interval weights are folded into one burst score per node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BurstAggregation {
    #[default]
    Sum,
    Strongest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BurstInterval {
    pub start_year: i32,
    pub end_year: i32,
    /// Cost saved by the burst state over the base state across the interval.
    pub weight: f64,
    /// Observed share within the interval divided by the base rate.
    pub rate_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BurstResult {
    pub intervals: Vec<BurstInterval>,
    /// One flag per year of the stream, `true` in the burst state.
    pub states: Vec<bool>,
    pub total_cost: f64,
}

impl BurstResult {
    fn quiet(years: usize) -> Self {
        BurstResult {
            intervals: Vec::new(),
            states: vec![false; years],
            total_cost: 0.0,
        }
    }

    pub fn score(&self, aggregation: BurstAggregation) -> f64 {
        match aggregation {
            BurstAggregation::Sum => self.intervals.iter().map(|i| i.weight).sum(),
            BurstAggregation::Strongest => {
                self.intervals.iter().map(|i| i.weight).fold(0.0, f64::max)
            }
        }
    }

    pub fn peak_rate_ratio(&self) -> f64 {
        self.intervals
            .iter()
            .map(|i| i.rate_ratio)
            .fold(0.0, f64::max)
    }
}

/// `ln C(n, r)` by direct summation.
fn ln_choose(n: u64, r: u64) -> f64 {
    let r = r.min(n - r);
    (1..=r).map(|i| ((n - r + i) as f64 / i as f64).ln()).sum()
}

/// Negative log binomial likelihood of `r` successes in `n` trials at `p`,
/// with `0 * ln 0 = 0`.
pub fn state_cost(r: u64, n: u64, p: f64) -> f64 {
    let term = |k: u64, q: f64| if k == 0 { 0.0 } else { k as f64 * q.ln() };
    -(ln_choose(n, r) + term(r, p) + term(n - r, 1.0 - p))
}

/// Per-year costs of the base and burst states plus the up-transition cost.
/// `None` for a degenerate stream (no citations in any year).
pub fn cost_table(
    counts: &[u64],
    totals: &[u64],
    params: BurstParams,
) -> Option<(Vec<[f64; 2]>, f64)> {
    let cited: u64 = counts.iter().sum();
    let total: u64 = totals.iter().sum();
    if total == 0 {
        return None;
    }
    let p0 = cited as f64 / total as f64;
    let p1 = (params.s * p0).min(1.0);
    let costs = counts
        .iter()
        .zip(totals)
        .map(|(&r, &n)| [state_cost(r, n, p0), state_cost(r, n, p1)])
        .collect();
    let up = params.gamma * (counts.len() as f64).ln();
    Some((costs, up))
}

/// `true` when `base` should be preferred over `burst`.
pub(crate) fn prefer_base(base: f64, burst: f64) -> bool {
    base <= burst || (base - burst).abs() <= TIE_EPS * (1.0 + base.abs().max(burst.abs()))
}

/// Minimum-cost state sequence for a cost table, starting from the base state.
pub fn optimal_states(costs: &[[f64; 2]], up: f64) -> (Vec<bool>, f64) {
    let years = costs.len();
    // best[t][q]: cheapest cost of years t.. given state q at year t.
    let mut best = vec![[0.0f64; 2]; years + 1];
    for t in (0..years).rev() {
        let next = best[t + 1];
        for q in 0..2 {
            let tail = if t + 1 == years {
                0.0
            } else if q == 0 {
                next[0].min(up + next[1])
            } else {
                next[0].min(next[1])
            };
            best[t][q] = costs[t][q] + tail;
        }
    }

    let mut states = Vec::with_capacity(years);
    let mut prev = 0usize;
    let mut total = 0.0;
    for t in 0..years {
        let enter_burst = if prev == 0 { up } else { 0.0 };
        let stay_base = best[t][0];
        let go_burst = enter_burst + best[t][1];
        let q = if prefer_base(stay_base, go_burst) {
            0
        } else {
            1
        };
        total += costs[t][q] + if q == 1 && prev == 0 { up } else { 0.0 };
        states.push(q == 1);
        prev = q;
    }
    (states, total)
}

/// Detects citation bursts of one reference.
///
/// The stream consists of the years of `totals` in ascending order; years in
/// `ring` must be a subset with `ring[y] <= totals[y]`.
pub fn detect_bursts(
    ring: &CitationRing,
    totals: &CitationRing,
    params: BurstParams,
) -> Result<BurstResult> {
    for (year, &count) in ring {
        match totals.get(year) {
            Some(&t) if t >= count => {}
            _ => {
                return Err(Error::InvalidStream(format!(
                    "year {year}: count {count} exceeds total {:?}",
                    totals.get(year)
                )))
            }
        }
    }

    let years: Vec<i32> = totals.keys().copied().collect();
    let counts: Vec<u64> = years
        .iter()
        .map(|y| u64::from(ring.get(y).copied().unwrap_or(0)))
        .collect();
    let trials: Vec<u64> = totals.values().map(|&t| u64::from(t)).collect();

    let Some((costs, up)) = cost_table(&counts, &trials, params) else {
        return Ok(BurstResult::quiet(years.len()));
    };
    let p0 = counts.iter().sum::<u64>() as f64 / trials.iter().sum::<u64>() as f64;
    let (states, total_cost) = optimal_states(&costs, up);

    let mut intervals = Vec::new();
    let mut t = 0;
    while t < states.len() {
        if !states[t] {
            t += 1;
            continue;
        }
        let start = t;
        while t < states.len() && states[t] {
            t += 1;
        }
        let weight: f64 = (start..t).map(|y| costs[y][0] - costs[y][1]).sum();
        let hits: u64 = counts[start..t].iter().sum();
        let tries: u64 = trials[start..t].iter().sum();
        let rate_ratio = if tries == 0 || p0 == 0.0 {
            0.0
        } else {
            hits as f64 / tries as f64 / p0
        };
        intervals.push(BurstInterval {
            start_year: years[start],
            end_year: years[t - 1],
            weight,
            rate_ratio,
        });
    }

    Ok(BurstResult {
        intervals,
        states,
        total_cost,
    })
}
