//! Candidate dominating sets with incrementally maintained cover counts.
//!
//! A solution tracks, for every vertex `u`, how many chosen vertices lie in
//! the closed neighborhood of `u` (`cover_count`). A vertex with count 0 is
//! *non-dominated*; the solution is feasible when no such vertex exists. All
//! counters are exact integers — the only real-valued quantity derived from
//! them is the penalized cost.

use rand::Rng;

use crate::graph::Graph;

/// One local-search step: add a vertex, delete one, or exchange a non-member
/// for a member.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Add(usize),
    Del(usize),
    Swap { add: usize, del: usize },
}

/// A (possibly infeasible) vertex subset together with exact bookkeeping:
/// per-vertex cover counts, total weight, and the number of non-dominated
/// vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    in_set: Vec<bool>,
    cover_count: Vec<u32>,
    total_weight: u64,
    num_nondominated: usize,
    size: usize,
}

impl Solution {
    /// The empty subset; every vertex of a non-empty graph is non-dominated.
    pub fn empty(g: &Graph) -> Self {
        Solution {
            in_set: vec![false; g.n()],
            cover_count: vec![0; g.n()],
            total_weight: 0,
            num_nondominated: g.n(),
            size: 0,
        }
    }

    /// Builds a solution by definitional recount: `cover_count[u]` is tallied
    /// directly as |N[u] ∩ S|. This is deliberately independent of the
    /// incremental update path so the two can be checked against each other.
    pub fn from_members(g: &Graph, members: impl IntoIterator<Item = usize>) -> Self {
        let mut in_set = vec![false; g.n()];
        for v in members {
            assert!(!in_set[v], "duplicate member {v}");
            in_set[v] = true;
        }
        let mut cover_count = vec![0u32; g.n()];
        let mut num_nondominated = 0;
        for u in 0..g.n() {
            let covers = g.closed_neighborhood(u).filter(|&k| in_set[k]).count();
            cover_count[u] = covers as u32;
            if covers == 0 {
                num_nondominated += 1;
            }
        }
        let total_weight = (0..g.n()).filter(|&v| in_set[v]).map(|v| g.weight(v)).sum();
        let size = in_set.iter().filter(|&&b| b).count();
        Solution {
            in_set,
            cover_count,
            total_weight,
            num_nondominated,
            size,
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.in_set[v]
    }

    /// Number of chosen vertices |S|.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    /// Number of vertices with cover count 0.
    pub fn num_nondominated(&self) -> usize {
        self.num_nondominated
    }

    pub fn cover_count(&self, u: usize) -> u32 {
        self.cover_count[u]
    }

    pub fn is_feasible(&self) -> bool {
        self.num_nondominated == 0
    }

    /// Chosen vertices in ascending order.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.in_set
            .iter()
            .enumerate()
            .filter_map(|(v, &b)| b.then_some(v))
    }

    /// Adds `v` to the set, updating all counters in O(deg v).
    pub fn insert(&mut self, v: usize, g: &Graph) {
        assert!(!self.in_set[v], "insert of member {v}");
        self.in_set[v] = true;
        self.size += 1;
        self.total_weight += g.weight(v);
        for u in g.closed_neighborhood(v) {
            self.cover_count[u] += 1;
            if self.cover_count[u] == 1 {
                self.num_nondominated -= 1;
            }
        }
    }

    /// Removes `v` from the set, updating all counters in O(deg v).
    pub fn remove(&mut self, v: usize, g: &Graph) {
        assert!(self.in_set[v], "removal of non-member {v}");
        self.in_set[v] = false;
        self.size -= 1;
        self.total_weight -= g.weight(v);
        for u in g.closed_neighborhood(v) {
            self.cover_count[u] -= 1;
            if self.cover_count[u] == 0 {
                self.num_nondominated += 1;
            }
        }
    }

    /// Applies a move; membership preconditions are asserted.
    pub fn apply_move(&mut self, mv: Move, g: &Graph) {
        match mv {
            Move::Add(i) => self.insert(i, g),
            Move::Del(j) => self.remove(j, g),
            Move::Swap { add, del } => {
                assert_ne!(add, del, "degenerate swap");
                self.insert(add, g);
                self.remove(del, g);
            }
        }
    }

    /// Penalized cost f(S) = W(S) + alpha · w_max · |non-dominated|.
    pub fn penalized_cost(&self, alpha: f64, w_max: u64) -> f64 {
        self.total_weight as f64 + alpha * w_max as f64 * self.num_nondominated as f64
    }
}

/// Exact effect of adding non-member `i`: (weight delta, non-dominated delta).
pub fn add_delta(sol: &Solution, g: &Graph, i: usize) -> (i64, i64) {
    debug_assert!(!sol.contains(i));
    let newly_covered = g
        .closed_neighborhood(i)
        .filter(|&u| sol.cover_count(u) == 0)
        .count();
    (g.weight(i) as i64, -(newly_covered as i64))
}

/// Exact effect of removing member `j`.
pub fn del_delta(sol: &Solution, g: &Graph, j: usize) -> (i64, i64) {
    debug_assert!(sol.contains(j));
    let newly_uncovered = g
        .closed_neighborhood(j)
        .filter(|&u| sol.cover_count(u) == 1)
        .count();
    (-(g.weight(j) as i64), newly_uncovered as i64)
}

/// Exact joint effect of adding `i` and removing `j`. Not in general the sum
/// of the two singleton deltas: vertices in N[i] ∩ N[j] interact.
pub fn swap_delta(sol: &Solution, g: &Graph, i: usize, j: usize) -> (i64, i64) {
    debug_assert!(!sol.contains(i) && sol.contains(j) && i != j);
    let newly_covered = g
        .closed_neighborhood(i)
        .filter(|&u| sol.cover_count(u) == 0)
        .count() as i64;
    let newly_uncovered = g
        .closed_neighborhood(j)
        .filter(|&u| {
            let after_add = sol.cover_count(u) + u32::from(g.dominates(i, u));
            after_add == 1
        })
        .count() as i64;
    (
        g.weight(i) as i64 - g.weight(j) as i64,
        newly_uncovered - newly_covered,
    )
}

/// Penalized-cost change implied by an exact (dW, dNd) pair.
pub fn penalized_delta(dw: i64, dnd: i64, alpha: f64, w_max: u64) -> f64 {
    dw as f64 + alpha * w_max as f64 * dnd as f64
}

/// Builds a feasible solution by repeatedly inserting a vertex chosen
/// uniformly at random among all vertices that cover at least one currently
/// non-dominated vertex.
pub fn construct_random(g: &Graph, rng: &mut impl Rng) -> Solution {
    let mut sol = Solution::empty(g);
    let mut marked = vec![false; g.n()];
    let mut candidates: Vec<usize> = Vec::new();
    while !sol.is_feasible() {
        candidates.clear();
        for u in 0..g.n() {
            if sol.cover_count(u) == 0 {
                for k in g.closed_neighborhood(u) {
                    if !marked[k] {
                        marked[k] = true;
                        candidates.push(k);
                    }
                }
            }
        }
        let pick = candidates[rng.random_range(0..candidates.len())];
        sol.insert(pick, g);
        for &k in &candidates {
            marked[k] = false;
        }
    }
    sol
}

/// Repeatedly removes the maximum-weight redundant member (ties broken by
/// smallest id) until none remains. A member is redundant when its removal
/// does not increase the number of non-dominated vertices, i.e. when every
/// vertex of its closed neighborhood is covered at least twice.
///
/// Returns the removed vertices in removal order. Works on infeasible
/// solutions too, and never increases weight or the non-dominated count.
pub fn eliminate_redundant(sol: &mut Solution, g: &Graph) -> Vec<usize> {
    let mut removed = Vec::new();
    loop {
        let mut best: Option<usize> = None;
        for j in 0..g.n() {
            if !sol.contains(j) {
                continue;
            }
            let redundant = g
                .closed_neighborhood(j)
                .all(|u| sol.cover_count(u) >= 2);
            if redundant && best.is_none_or(|b| g.weight(j) > g.weight(b)) {
                best = Some(j);
            }
        }
        match best {
            Some(j) => {
                sol.remove(j, g);
                removed.push(j);
            }
            None => return removed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_instance, Graph, WeightKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Path a–b–c with weights 3, 2, 4.
    fn path3() -> Graph {
        Graph::from_edges(vec![3, 2, 4], &[(0, 1), (1, 2)])
    }

    /// Three isolated vertices with weights 5, 7, 9.
    fn isolated3() -> Graph {
        Graph::from_edges(vec![5, 7, 9], &[])
    }

    fn k4() -> Graph {
        Graph::from_edges(
            vec![4, 3, 2, 1],
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        )
    }

    #[test]
    fn empty_solution_counts_every_vertex_non_dominated() {
        let g = path3();
        let sol = Solution::empty(&g);
        assert_eq!(sol.len(), 0);
        assert_eq!(sol.num_nondominated(), 3);
        assert!(!sol.is_feasible());
        assert_eq!(sol.penalized_cost(1.0, g.max_weight()), 12.0);
    }

    #[test]
    fn path_center_alone_is_feasible_with_weight_two() {
        let g = path3();
        let sol = Solution::from_members(&g, [1]);
        assert!(sol.is_feasible());
        assert_eq!(sol.total_weight(), 2);
        assert_eq!(sol.penalized_cost(0.7, g.max_weight()), 2.0);
    }

    #[test]
    fn penalty_term_charges_alpha_wmax_per_uncovered_vertex() {
        let g = path3();
        let sol = Solution::from_members(&g, [0]);
        assert_eq!(sol.num_nondominated(), 1, "c is uncovered");
        assert_eq!(sol.penalized_cost(0.5, g.max_weight()), 5.0);

        let iso = isolated3();
        let sol = Solution::from_members(&iso, [0]);
        assert_eq!(sol.num_nondominated(), 2);
        assert_eq!(sol.penalized_cost(0.5, iso.max_weight()), 14.0);
    }

    #[test]
    fn moves_update_counters_exactly() {
        let g = path3();
        let mut sol = Solution::empty(&g);
        sol.apply_move(Move::Add(1), &g);
        assert_eq!(
            (sol.cover_count(0), sol.cover_count(1), sol.cover_count(2)),
            (1, 1, 1)
        );
        assert_eq!((sol.total_weight(), sol.num_nondominated()), (2, 0));

        sol.apply_move(Move::Swap { add: 0, del: 1 }, &g);
        assert_eq!(sol.members().collect::<Vec<_>>(), vec![0]);
        assert_eq!(sol.num_nondominated(), 1);

        sol.apply_move(Move::Del(0), &g);
        assert_eq!(sol, Solution::empty(&g), "add/del round-trips exactly");
    }

    #[test]
    #[should_panic(expected = "insert of member")]
    fn inserting_a_member_is_a_logic_error() {
        let g = path3();
        let mut sol = Solution::from_members(&g, [1]);
        sol.insert(1, &g);
    }

    #[test]
    fn singleton_deltas_match_definition() {
        let g = path3();
        let empty = Solution::empty(&g);
        // Adding b covers all three vertices; a covers two; c covers two.
        assert_eq!(add_delta(&empty, &g, 1), (2, -3));
        assert_eq!(add_delta(&empty, &g, 0), (3, -2));
        assert_eq!(add_delta(&empty, &g, 2), (4, -2));
        assert_eq!(
            penalized_delta(2, -3, 1.0, g.max_weight()),
            -10.0,
            "ADD(b) from the empty set at alpha = 1"
        );

        let center = Solution::from_members(&g, [1]);
        assert_eq!(del_delta(&center, &g, 1), (-2, 3));
        assert_eq!(penalized_delta(-2, 3, 1.0, g.max_weight()), 10.0);
    }

    #[test]
    fn swap_delta_accounts_for_neighborhood_overlap() {
        let g = path3();
        let sol = Solution::from_members(&g, [0]);
        // Swapping in b for a keeps everything covered and saves weight 1.
        let (dw, dnd) = swap_delta(&sol, &g, 1, 0);
        assert_eq!((dw, dnd), (-1, -1));
        let mut check = sol.clone();
        check.apply_move(Move::Swap { add: 1, del: 0 }, &g);
        assert_eq!(check.total_weight() as i64 - sol.total_weight() as i64, dw);
        assert_eq!(
            check.num_nondominated() as i64 - sol.num_nondominated() as i64,
            dnd
        );
    }

    #[test]
    fn eliminate_redundant_removes_heaviest_first() {
        let g = path3();
        let mut sol = Solution::from_members(&g, [0, 1, 2]);
        let removed = eliminate_redundant(&mut sol, &g);
        assert_eq!(removed, vec![2, 0], "c (weight 4) falls before a (3)");
        assert_eq!(sol.members().collect::<Vec<_>>(), vec![1]);
        assert!(sol.is_feasible());
    }

    #[test]
    fn eliminate_redundant_is_a_fixed_point() {
        let g = path3();
        let mut sol = Solution::from_members(&g, [1]);
        assert!(eliminate_redundant(&mut sol, &g).is_empty());
        assert_eq!(sol.members().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn construct_random_covers_forced_structures() {
        let g = isolated3();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sol = construct_random(&g, &mut rng);
        assert_eq!(sol.len(), 3, "isolated vertices are all forced");

        let k = k4();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sol = construct_random(&k, &mut rng);
            assert!(sol.is_feasible());
            assert_eq!(sol.len(), 1, "any single vertex dominates K4");
        }
    }

    #[test]
    fn construct_random_reaches_every_candidate() {
        // On K3 the first (only) insertion is uniform over all vertices.
        let g = Graph::from_edges(vec![1, 2, 3], &[(0, 1), (0, 2), (1, 2)]);
        let mut seen = [false; 3];
        for seed in 0..60 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sol = construct_random(&g, &mut rng);
            seen[sol.members().next().unwrap()] = true;
        }
        assert_eq!(seen, [true, true, true]);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph() -> impl Strategy<Value = Graph> {
            (2usize..16, 0.0f64..1.0, any::<u64>(), any::<bool>()).prop_map(
                |(n, density, seed, t2)| {
                    let total = n * (n - 1) / 2;
                    let m = (density * total as f64) as usize;
                    let kind = if t2 { WeightKind::T2 } else { WeightKind::T1 };
                    generate_instance(n, m, kind, seed).unwrap().graph
                },
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]

            /// Random move sequences: the incremental counters must agree
            /// with a definitional recount after every single application,
            /// and each move's predicted delta must match the realized one.
            #[test]
            fn incremental_state_matches_recount(
                g in arb_graph(),
                ops in proptest::collection::vec((any::<u8>(), any::<u16>(), any::<u16>()), 1..60),
            ) {
                let mut sol = Solution::empty(&g);
                for (kind, p1, p2) in ops {
                    let outside: Vec<usize> = (0..g.n()).filter(|&v| !sol.contains(v)).collect();
                    let inside: Vec<usize> = sol.members().collect();
                    let mv = match kind % 3 {
                        0 if !outside.is_empty() => {
                            Move::Add(outside[p1 as usize % outside.len()])
                        }
                        1 if !inside.is_empty() => {
                            Move::Del(inside[p1 as usize % inside.len()])
                        }
                        2 if !outside.is_empty() && !inside.is_empty() => {
                            Move::Swap {
                                add: outside[p1 as usize % outside.len()],
                                del: inside[p2 as usize % inside.len()],
                            }
                        }
                        _ => continue,
                    };
                    let (dw, dnd) = match mv {
                        Move::Add(i) => add_delta(&sol, &g, i),
                        Move::Del(j) => del_delta(&sol, &g, j),
                        Move::Swap { add, del } => swap_delta(&sol, &g, add, del),
                    };
                    let (w0, nd0) = (sol.total_weight() as i64, sol.num_nondominated() as i64);
                    sol.apply_move(mv, &g);
                    prop_assert_eq!(sol.total_weight() as i64 - w0, dw);
                    prop_assert_eq!(sol.num_nondominated() as i64 - nd0, dnd);
                    let recount = Solution::from_members(&g, sol.members().collect::<Vec<_>>());
                    prop_assert_eq!(&sol, &recount);
                }
            }

            /// After elimination no member is redundant, feasibility is
            /// preserved, and neither weight nor the non-dominated count
            /// ever increases.
            #[test]
            fn eliminate_redundant_postconditions(
                g in arb_graph(),
                mask in any::<u32>(),
            ) {
                let members: Vec<usize> =
                    (0..g.n()).filter(|&v| mask & (1 << v) != 0).collect();
                let mut sol = Solution::from_members(&g, members);
                let (w0, nd0) = (sol.total_weight(), sol.num_nondominated());
                eliminate_redundant(&mut sol, &g);
                prop_assert!(sol.total_weight() <= w0);
                prop_assert!(sol.num_nondominated() <= nd0);
                for j in sol.members() {
                    let redundant = g
                        .closed_neighborhood(j)
                        .all(|u| sol.cover_count(u) >= 2);
                    prop_assert!(!redundant, "vertex {} survived elimination", j);
                }
            }

            /// The penalty term is monotone in alpha on infeasible solutions
            /// and vanishes on feasible ones.
            #[test]
            fn penalized_cost_monotone_in_alpha(
                g in arb_graph(),
                mask in any::<u32>(),
                a1 in 0.0f64..2.0,
                a2 in 0.0f64..2.0,
            ) {
                let members: Vec<usize> =
                    (0..g.n()).filter(|&v| mask & (1 << v) != 0).collect();
                let sol = Solution::from_members(&g, members);
                let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
                prop_assert!(
                    sol.penalized_cost(lo, g.max_weight())
                        <= sol.penalized_cost(hi, g.max_weight())
                );
                if sol.is_feasible() {
                    prop_assert_eq!(
                        sol.penalized_cost(hi, g.max_weight()),
                        sol.total_weight() as f64
                    );
                }
            }

            #[test]
            fn construct_random_is_feasible_and_deterministic(
                g in arb_graph(),
                seed in any::<u64>(),
            ) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let sol = construct_random(&g, &mut rng);
                prop_assert!(sol.is_feasible());
                let mut rng2 = ChaCha8Rng::seed_from_u64(seed);
                let sol2 = construct_random(&g, &mut rng2);
                prop_assert_eq!(sol, sol2);
            }
        }
    }
}
