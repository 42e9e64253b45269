//! Exhaustive reference solver for small instances, used to validate the
//! heuristic pipeline.

use thiserror::Error;

use crate::graph::Graph;

/// Largest graph order the exhaustive search accepts.
pub const ORACLE_MAX_N: usize = 25;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("exhaustive search is limited to {ORACLE_MAX_N} vertices, got {n}")]
    TooLarge { n: usize },
}

struct Search<'g> {
    g: &'g Graph,
    cover: Vec<u32>,
    uncovered: usize,
    chosen: Vec<usize>,
    weight: u64,
    best_weight: u64,
    best_set: Vec<usize>,
    /// Largest id in each vertex's closed neighborhood: once the scan moves
    /// past it, nothing can cover the vertex any more.
    last_coverer: Vec<usize>,
}

impl Search<'_> {
    fn choose(&mut self, v: usize) {
        self.chosen.push(v);
        self.weight += self.g.weight(v);
        for u in self.g.closed_neighborhood(v) {
            self.cover[u] += 1;
            if self.cover[u] == 1 {
                self.uncovered -= 1;
            }
        }
    }

    fn unchoose(&mut self, v: usize) {
        self.chosen.pop();
        self.weight -= self.g.weight(v);
        for u in self.g.closed_neighborhood(v) {
            self.cover[u] -= 1;
            if self.cover[u] == 0 {
                self.uncovered += 1;
            }
        }
    }

    fn dfs(&mut self, v: usize) {
        if self.uncovered == 0 {
            // Strict improvement keeps the first-found optimum, which the
            // include-first order makes the lexicographically smallest.
            if self.weight < self.best_weight {
                self.best_weight = self.weight;
                self.best_set = self.chosen.clone();
            }
            return;
        }
        if v == self.g.n() || self.weight >= self.best_weight {
            return;
        }
        // Dead branch: some vertex is uncovered and every one of its
        // potential coverers is already behind the scan.
        if (0..self.g.n()).any(|u| self.cover[u] == 0 && self.last_coverer[u] < v) {
            return;
        }
        self.choose(v);
        self.dfs(v + 1);
        self.unchoose(v);
        self.dfs(v + 1);
    }
}

/// Provably minimum-weight dominating set of a graph with at most
/// [`ORACLE_MAX_N`] vertices, found by depth-first enumeration. Returns the
/// optimal weight and the lexicographically smallest optimal member list
/// (0-based, ascending).
pub fn brute_force_optimum(g: &Graph) -> Result<(u64, Vec<usize>), OracleError> {
    let n = g.n();
    if n > ORACLE_MAX_N {
        return Err(OracleError::TooLarge { n });
    }
    let mut search = Search {
        g,
        cover: vec![0; n],
        uncovered: n,
        chosen: Vec::new(),
        weight: 0,
        // The full vertex set always dominates; it is the answer exactly
        // when no proper subset covers everything for less.
        best_weight: (0..n).map(|v| g.weight(v)).sum(),
        best_set: (0..n).collect(),
        last_coverer: (0..n)
            .map(|u| g.neighbors(u).last().map_or(u, |&x| u.max(x as usize)))
            .collect(),
    };
    search.dfs(0);
    Ok((search.best_weight, search.best_set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_instance, WeightKind};

    #[test]
    fn solves_small_fixed_graphs() {
        let path = Graph::from_edges(vec![3, 2, 4], &[(0, 1), (1, 2)]);
        assert_eq!(brute_force_optimum(&path), Ok((2, vec![1])));

        let k4 = Graph::from_edges(
            vec![4, 3, 2, 1],
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        );
        assert_eq!(brute_force_optimum(&k4), Ok((1, vec![3])));

        let isolated = Graph::from_edges(vec![5, 7], &[]);
        assert_eq!(brute_force_optimum(&isolated), Ok((12, vec![0, 1])));

        let single = Graph::from_edges(vec![9], &[]);
        assert_eq!(brute_force_optimum(&single), Ok((9, vec![0])));

        let empty = Graph::from_edges(vec![], &[]);
        assert_eq!(brute_force_optimum(&empty), Ok((0, vec![])));
    }

    #[test]
    fn ties_resolve_to_the_lexicographically_smallest_set() {
        // Two disjoint unit-weight edges: four optimal sets of weight 2.
        let g = Graph::from_edges(vec![1, 1, 1, 1], &[(0, 1), (2, 3)]);
        assert_eq!(brute_force_optimum(&g), Ok((2, vec![0, 2])));
    }

    #[test]
    fn rejects_graphs_beyond_the_enumeration_limit() {
        let g = Graph::from_edges(vec![1; 26], &[]);
        assert_eq!(brute_force_optimum(&g), Err(OracleError::TooLarge { n: 26 }));
    }

    /// Cover check used by the naive double-check below.
    fn mask_dominates(g: &Graph, mask: u32) -> bool {
        (0..g.n()).all(|u| g.closed_neighborhood(u).any(|v| mask & (1 << v) != 0))
    }

    #[test]
    fn agrees_with_naive_subset_enumeration() {
        for seed in 0..20 {
            let inst = generate_instance(10, 18, WeightKind::T2, seed).unwrap();
            let g = &inst.graph;
            let naive = (0u32..1 << g.n())
                .filter(|&mask| mask_dominates(g, mask))
                .map(|mask| (0..g.n()).filter(|&v| mask & (1 << v) != 0).map(|v| g.weight(v)).sum::<u64>())
                .min()
                .unwrap();
            let (weight, set) = brute_force_optimum(g).unwrap();
            assert_eq!(weight, naive, "seed {seed}");
            let picked: u64 = set.iter().map(|&v| g.weight(v)).sum();
            assert_eq!(picked, weight);
            let mask = set.iter().fold(0u32, |m, &v| m | 1 << v);
            assert!(mask_dominates(g, mask));
        }
    }
}
