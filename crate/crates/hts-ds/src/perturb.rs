//! Ruin-and-recreate perturbation.
//!
//! A copy of the best solution loses a fixed fraction of its members
//! (uniformly, without replacement) and is then rebuilt by a randomized
//! greedy that scores each vertex by how much uncovered material its closed
//! neighborhood would absorb, relative to its own weight.

use rand::seq::SliceRandom;
use rand::Rng;
use std::cmp::Ordering;

use crate::graph::Graph;
use crate::solution::{eliminate_redundant, Solution};

/// Greedy reconstruction criteria. "Cover" ranks by the number of currently
/// non-dominated vertices in N[v] per unit weight, "gain" by their total
/// weight per unit weight; each comes in a best and a second-best flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Criterion {
    CoverRatioBest,
    CoverRatioSecond,
    GainRatioBest,
    GainRatioSecond,
}

impl Criterion {
    fn draw(rng: &mut impl Rng) -> Self {
        match rng.random_range(0..4u8) {
            0 => Criterion::CoverRatioBest,
            1 => Criterion::CoverRatioSecond,
            2 => Criterion::GainRatioBest,
            _ => Criterion::GainRatioSecond,
        }
    }
}

/// Compares a/b against c/d exactly via cross-multiplication.
fn ratio_cmp(a: u64, b: u64, c: u64, d: u64) -> Ordering {
    (a as u128 * d as u128).cmp(&(c as u128 * b as u128))
}

/// Chooses the vertex ranked first (or second) under `criterion` among all
/// vertices covering at least one non-dominated vertex. Exact ties are
/// broken uniformly at random by shuffling before a stable sort; "second"
/// means the second distinct rank position of that shuffled order and falls
/// back to the single candidate when only one exists. Returns `None` when
/// the solution is already feasible.
fn pick_vertex(
    g: &Graph,
    sol: &Solution,
    criterion: Criterion,
    rng: &mut impl Rng,
) -> Option<usize> {
    let n = g.n();
    let mut cover_gain = vec![0u64; n];
    let mut weight_gain = vec![0u64; n];
    for u in 0..n {
        if sol.cover_count(u) == 0 {
            for k in g.closed_neighborhood(u) {
                cover_gain[k] += 1;
                weight_gain[k] += g.weight(u);
            }
        }
    }
    let mut candidates: Vec<usize> = (0..n).filter(|&v| cover_gain[v] > 0).collect();
    if candidates.is_empty() {
        return None;
    }
    candidates.shuffle(rng);
    let score = |v: usize| match criterion {
        Criterion::CoverRatioBest | Criterion::CoverRatioSecond => cover_gain[v],
        Criterion::GainRatioBest | Criterion::GainRatioSecond => weight_gain[v],
    };
    candidates.sort_by(|&a, &b| ratio_cmp(score(b), g.weight(b), score(a), g.weight(a)));
    let index = match criterion {
        Criterion::CoverRatioBest | Criterion::GainRatioBest => 0,
        Criterion::CoverRatioSecond | Criterion::GainRatioSecond => 1.min(candidates.len() - 1),
    };
    Some(candidates[index])
}

/// Removes ⌊rho · |S|⌋ members chosen uniformly without replacement.
pub fn ruin(sol: &mut Solution, g: &Graph, rho: f64, rng: &mut impl Rng) {
    let count = ((rho * sol.len() as f64).floor() as usize).min(sol.len());
    if count == 0 {
        return;
    }
    let members: Vec<usize> = sol.members().collect();
    for idx in rand::seq::index::sample(rng, members.len(), count) {
        sol.remove(members[idx], g);
    }
}

/// Rebuilds feasibility by repeatedly drawing one of the four criteria
/// uniformly and inserting the vertex it selects.
pub fn greedy_reconstruct(sol: &mut Solution, g: &Graph, rng: &mut impl Rng) {
    while !sol.is_feasible() {
        let criterion = Criterion::draw(rng);
        let v = pick_vertex(g, sol, criterion, rng)
            .expect("an infeasible solution always has insertion candidates");
        sol.insert(v, g);
    }
}

/// Ruins and rebuilds a copy of `s_best`, then strips redundant members.
/// The input is never mutated; the result is always feasible.
pub fn perturb(s_best: &Solution, g: &Graph, rho: f64, rng: &mut impl Rng) -> Solution {
    let mut sol = s_best.clone();
    ruin(&mut sol, g, rho, rng);
    greedy_reconstruct(&mut sol, g, rng);
    eliminate_redundant(&mut sol, g);
    sol
}
