//! Betweenness centrality for undirected, unweighted graphs (Brandes).
//!
//! Scores are pair fractions: the dependency sum of a node divided by the
//! number of unordered pairs not involving it, `(n-1)(n-2)/2`. Pairs in
//! different components contribute nothing.

use rayon::prelude::*;

/// Sources handled by one parallel task. Partial sums are combined in chunk
/// order so results do not depend on thread scheduling.
const SOURCE_CHUNK: usize = 32;

/// Normalized betweenness of every node of `adj` (adjacency lists, each
/// undirected edge listed in both directions, no self loops).
pub fn betweenness(adj: &[Vec<usize>]) -> Vec<f64> {
    let n = adj.len();
    if n <= 2 {
        return vec![0.0; n];
    }

    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut work = Workspace::new(n);
            let mut acc = vec![0.0; n];
            for &s in chunk {
                work.accumulate_from(adj, s, &mut acc);
            }
            acc
        })
        .collect();

    let mut total = vec![0.0; n];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }

    // Every unordered pair is visited from both endpoints.
    let scale = 1.0 / ((n - 1) as f64 * (n - 2) as f64);
    total.iter_mut().for_each(|b| *b *= scale);
    total
}

struct Workspace {
    stack: Vec<usize>,
    queue: std::collections::VecDeque<usize>,
    preds: Vec<Vec<usize>>,
    paths: Vec<f64>,
    dist: Vec<i64>,
    delta: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            stack: Vec::with_capacity(n),
            queue: std::collections::VecDeque::with_capacity(n),
            preds: vec![Vec::new(); n],
            paths: vec![0.0; n],
            dist: vec![-1; n],
            delta: vec![0.0; n],
        }
    }

    fn accumulate_from(&mut self, adj: &[Vec<usize>], s: usize, acc: &mut [f64]) {
        for v in 0..adj.len() {
            self.preds[v].clear();
            self.paths[v] = 0.0;
            self.dist[v] = -1;
            self.delta[v] = 0.0;
        }
        self.stack.clear();
        self.paths[s] = 1.0;
        self.dist[s] = 0;
        self.queue.push_back(s);

        while let Some(v) = self.queue.pop_front() {
            self.stack.push(v);
            for &w in &adj[v] {
                if self.dist[w] < 0 {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.paths[w] += self.paths[v];
                    self.preds[w].push(v);
                }
            }
        }

        while let Some(w) = self.stack.pop() {
            let coeff = (1.0 + self.delta[w]) / self.paths[w];
            for &v in &self.preds[w] {
                self.delta[v] += self.paths[v] * coeff;
            }
            if w != s {
                acc[w] += self.delta[w];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    #[test]
    fn path_of_three() {
        let b = betweenness(&graph(3, &[(0, 1), (1, 2)]));
        assert_eq!(b, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn complete_k4_is_zero() {
        let edges: Vec<_> = (0..4)
            .flat_map(|a| (a + 1..4).map(move |b| (a, b)))
            .collect();
        assert!(betweenness(&graph(4, &edges)).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn tiny_graphs_are_zero() {
        assert!(betweenness(&[]).is_empty());
        assert_eq!(betweenness(&graph(2, &[(0, 1)])), vec![0.0, 0.0]);
    }

    #[test]
    fn star_center_and_isolated_node() {
        // Star with center 0 and 4 leaves: center is on all 6 leaf pairs.
        let star = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(betweenness(&star)[0], 1.0);
        // Adding an isolated node only enlarges the pair denominator.
        let mut with_isolated = star.clone();
        with_isolated.push(Vec::new());
        let b = betweenness(&with_isolated);
        assert!((b[0] - 6.0 / 10.0).abs() < 1e-15);
        assert_eq!(b[5], 0.0);
    }

    #[test]
    fn cycle_of_four_splits_paths() {
        // Opposite corners have two shortest paths, one through each neighbor.
        let b = betweenness(&graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]));
        for x in b {
            assert!((x - 0.5 / 3.0).abs() < 1e-15);
        }
    }
}
