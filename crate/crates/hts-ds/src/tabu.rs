//! Penalty-driven tabu search over ADD / DEL / SWAP moves.
//!
//! Each iteration advances the penalty sawtooth, evaluates every singleton
//! move plus a restricted swap neighborhood exactly, applies the best
//! non-tabu (or aspirating) candidate, strips redundant members, and tracks
//! the best feasible solution seen. Periodically the working solution is
//! replaced by a perturbation of the best one.

use std::cmp::Ordering;
use std::collections::VecDeque;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::ip::FrequencyCounter;
use crate::penalty::PenaltySchedule;
use crate::perturb::perturb;
use crate::solution::{
    add_delta, del_delta, eliminate_redundant, penalized_delta, Move, Solution,
};

/// Full parameter set of the solver. `Default` gives the tuned values used
/// throughout benchmarking; [`SearchParams::dimacs_preset`] shrinks the
/// iteration budgets for the large clique-derived instances.
#[derive(Debug, Clone)]
pub struct SearchParams {
    /// Number of restarts in a full run.
    pub n_restart: usize,
    /// Hard iteration cap per tabu phase.
    pub i_max: u64,
    /// Stop a tabu phase after this many iterations without a new best.
    pub i_ni: u64,
    /// Perturbation period, in iterations.
    pub i_pert: u64,
    /// Fraction of the best solution ruined by a perturbation.
    pub rho: f64,
    /// Tabu list capacity.
    pub n_tabu: usize,
    /// Wall-clock budget, in seconds, for each exact reduced solve.
    pub t_max_ip: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Penalty ramp length factor: a ramp takes about beta·|V| iterations.
    pub beta: f64,
    /// Initial free-set size for the reduced problems.
    pub n_free_init: usize,
    /// Disable to skip the exact reduced solves entirely.
    pub use_ip: bool,
    /// Disable to search with ADD/DEL moves only.
    pub use_swap: bool,
    /// Retain per-iteration trace rows in the run report.
    pub record_trace: bool,
    /// Worker threads for concurrent restarts (results are identical to a
    /// single-threaded run).
    pub threads: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            n_restart: 10,
            i_max: 20_000,
            i_ni: 10_000,
            i_pert: 100,
            rho: 0.2,
            n_tabu: 12,
            t_max_ip: 1.0,
            alpha_min: 0.1,
            alpha_max: 1.1,
            beta: 1.3,
            n_free_init: 50,
            use_ip: true,
            use_swap: true,
            record_trace: false,
            threads: 1,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("{what} must be at least 1")]
    NotPositive { what: &'static str },
    #[error("rho must lie in [0, 1], got {value}")]
    RhoOutOfRange { value: f64 },
    #[error("alpha range is empty or not finite: [{min}, {max}]")]
    BadAlphaRange { min: f64, max: f64 },
    #[error("beta must be positive and finite, got {value}")]
    BadBeta { value: f64 },
    #[error("the exact-solve time limit must be finite, got {value}")]
    BadTimeLimit { value: f64 },
}

impl SearchParams {
    /// Reduced iteration budget for the large DIMACS-derived instances.
    pub fn dimacs_preset(mut self) -> Self {
        self.i_max = 2000;
        self.i_ni = 1000;
        self
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        for (value, what) in [
            (self.n_restart, "n_restart"),
            (self.i_pert as usize, "i_pert"),
            (self.n_tabu, "n_tabu"),
            (self.n_free_init, "n_free_init"),
            (self.threads, "threads"),
        ] {
            if value == 0 {
                return Err(ParamError::NotPositive { what });
            }
        }
        if !self.rho.is_finite() || !(0.0..=1.0).contains(&self.rho) {
            return Err(ParamError::RhoOutOfRange { value: self.rho });
        }
        if !self.alpha_min.is_finite()
            || !self.alpha_max.is_finite()
            || self.alpha_max <= self.alpha_min
        {
            return Err(ParamError::BadAlphaRange {
                min: self.alpha_min,
                max: self.alpha_max,
            });
        }
        if !self.beta.is_finite() || self.beta <= 0.0 {
            return Err(ParamError::BadBeta { value: self.beta });
        }
        if !self.t_max_ip.is_finite() {
            return Err(ParamError::BadTimeLimit { value: self.t_max_ip });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TabuLabel {
    /// Bars moves that would insert this vertex.
    ForbidInsert(usize),
    /// Bars moves that would remove this vertex.
    ForbidRemove(usize),
}

/// Bounded FIFO of move prohibitions: at capacity, recording a new label
/// evicts the oldest one.
#[derive(Debug, Clone)]
pub struct TabuList {
    queue: VecDeque<TabuLabel>,
    capacity: usize,
}

impl TabuList {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "tabu capacity must be positive");
        TabuList {
            queue: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn push(&mut self, label: TabuLabel) {
        if self.queue.len() == self.capacity {
            self.queue.pop_front();
        }
        self.queue.push_back(label);
    }

    pub fn contains(&self, label: TabuLabel) -> bool {
        self.queue.contains(&label)
    }

    /// Queue position of the newest copy of `label` (0 is oldest).
    pub fn position(&self, label: TabuLabel) -> Option<usize> {
        self.queue.iter().rposition(|&l| l == label)
    }

    /// Records the labels a just-applied move leaves behind: adding a vertex
    /// bars its removal; deleting one bars its reinsertion; a swap bars only
    /// the reinsertion of the removed vertex.
    pub fn record(&mut self, mv: Move) {
        match mv {
            Move::Add(i) => self.push(TabuLabel::ForbidRemove(i)),
            Move::Del(j) | Move::Swap { del: j, .. } => self.push(TabuLabel::ForbidInsert(j)),
        }
    }

    pub fn forbids(&self, mv: Move) -> bool {
        match mv {
            Move::Add(i) => self.contains(TabuLabel::ForbidInsert(i)),
            Move::Del(j) => self.contains(TabuLabel::ForbidRemove(j)),
            Move::Swap { add, del } => {
                self.contains(TabuLabel::ForbidInsert(add))
                    || self.contains(TabuLabel::ForbidRemove(del))
            }
        }
    }

    /// Position of the label that keeps `mv` blocked longest; a move blocked
    /// by two labels is bound by the newer one.
    fn binding_position(&self, mv: Move) -> Option<usize> {
        match mv {
            Move::Add(i) => self.position(TabuLabel::ForbidInsert(i)),
            Move::Del(j) => self.position(TabuLabel::ForbidRemove(j)),
            Move::Swap { add, del } => {
                let a = self.position(TabuLabel::ForbidInsert(add));
                let b = self.position(TabuLabel::ForbidRemove(del));
                match (a, b) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }
}

/// A candidate move together with its exact evaluation at the current
/// penalty level. Deltas are computed from integer state at evaluation time
/// and never cached across iterations.
#[derive(Debug, Clone, Copy)]
pub struct ScoredMove {
    pub mv: Move,
    /// Penalized-cost change the move would cause.
    pub delta: f64,
    /// Solution weight after the move.
    pub w_after: u64,
    /// Non-dominated count after the move.
    pub nd_after: usize,
}

fn kind_rank(mv: Move) -> u8 {
    match mv {
        Move::Add(_) => 0,
        Move::Del(_) => 1,
        Move::Swap { .. } => 2,
    }
}

fn move_ids(mv: Move) -> (usize, usize) {
    match mv {
        Move::Add(i) => (i, 0),
        Move::Del(j) => (j, 0),
        Move::Swap { add, del } => (add, del),
    }
}

/// Strict selection order: smaller delta, then ADD < DEL < SWAP, then
/// smaller vertex ids.
fn precedes(a: &ScoredMove, b: &ScoredMove) -> bool {
    match a.delta.partial_cmp(&b.delta).expect("move deltas are never NaN") {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => {
            (kind_rank(a.mv), move_ids(a.mv)) < (kind_rank(b.mv), move_ids(b.mv))
        }
    }
}

fn scored(mv: Move, dw: i64, dnd: i64, sol: &Solution, alpha: f64, w_max: u64) -> ScoredMove {
    ScoredMove {
        mv,
        delta: penalized_delta(dw, dnd, alpha, w_max),
        w_after: (sol.total_weight() as i64 + dw) as u64,
        nd_after: (sol.num_nondominated() as i64 + dnd) as usize,
    }
}

fn push_singletons(
    sol: &Solution,
    g: &Graph,
    alpha: f64,
    w_max: u64,
    adds: &mut Vec<ScoredMove>,
    dels: &mut Vec<ScoredMove>,
) {
    adds.clear();
    dels.clear();
    for v in 0..g.n() {
        if sol.contains(v) {
            let (dw, dnd) = del_delta(sol, g, v);
            dels.push(scored(Move::Del(v), dw, dnd, sol, alpha, w_max));
        } else {
            let (dw, dnd) = add_delta(sol, g, v);
            adds.push(scored(Move::Add(v), dw, dnd, sol, alpha, w_max));
        }
    }
    let by_delta_then_id = |a: &ScoredMove, b: &ScoredMove| {
        a.delta
            .partial_cmp(&b.delta)
            .expect("move deltas are never NaN")
            .then_with(|| move_ids(a.mv).cmp(&move_ids(b.mv)))
    };
    adds.sort_by(by_delta_then_id);
    dels.sort_by(by_delta_then_id);
}

/// Evaluates every ADD (one per non-member) and DEL (one per member) move,
/// each returned list sorted by ascending delta with ties by vertex id.
pub fn evaluate_singletons(
    sol: &Solution,
    g: &Graph,
    alpha: f64,
    w_max: u64,
) -> (Vec<ScoredMove>, Vec<ScoredMove>) {
    let mut adds = Vec::new();
    let mut dels = Vec::new();
    push_singletons(sol, g, alpha, w_max, &mut adds, &mut dels);
    (adds, dels)
}

fn push_restricted_swaps(
    sol: &Solution,
    g: &Graph,
    alpha: f64,
    w_max: u64,
    adds: &[ScoredMove],
    dels: &[ScoredMove],
    k: usize,
    out: &mut Vec<ScoredMove>,
    stamp: &mut [u64],
    stamp_gen: &mut u64,
) -> usize {
    out.clear();
    let mut evaluations = 0;
    for a in &adds[..k.min(adds.len())] {
        let Move::Add(i) = a.mv else { unreachable!() };
        *stamp_gen += 1;
        let gen = *stamp_gen;
        let mut newly_covered = 0i64;
        for u in g.closed_neighborhood(i) {
            stamp[u] = gen;
            if sol.cover_count(u) == 0 {
                newly_covered += 1;
            }
        }
        let w_add = g.weight(i) as i64;
        for d in &dels[..k.min(dels.len())] {
            let Move::Del(j) = d.mv else { unreachable!() };
            evaluations += 1;
            // A vertex of N[j] ends up uncovered exactly when its count
            // after the insertion of i (stamped) is 1.
            let mut newly_uncovered = 0i64;
            for u in g.closed_neighborhood(j) {
                if sol.cover_count(u) + u32::from(stamp[u] == gen) == 1 {
                    newly_uncovered += 1;
                }
            }
            let dw = w_add - g.weight(j) as i64;
            let dnd = newly_uncovered - newly_covered;
            out.push(scored(Move::Swap { add: i, del: j }, dw, dnd, sol, alpha, w_max));
        }
    }
    evaluations
}

/// Builds the restricted swap neighborhood: the cross product of the `k`
/// best ADD candidates and the `k` best DEL candidates, each pair
/// re-evaluated exactly (singleton deltas are not additive when the closed
/// neighborhoods overlap). At most k² candidates.
pub fn restricted_swaps(
    sol: &Solution,
    g: &Graph,
    alpha: f64,
    w_max: u64,
    adds: &[ScoredMove],
    dels: &[ScoredMove],
    k: usize,
) -> Vec<ScoredMove> {
    let mut out = Vec::new();
    let mut stamp = vec![0u64; g.n()];
    let mut stamp_gen = 0;
    push_restricted_swaps(
        sol, g, alpha, w_max, adds, dels, k, &mut out, &mut stamp, &mut stamp_gen,
    );
    out
}

/// Picks the minimum-delta candidate that is either not tabu or aspirates
/// (its resulting solution is feasible and strictly better than the best
/// feasible weight seen). Ties prefer ADD over DEL over SWAP, then smaller
/// vertex ids. If every candidate is blocked and none aspirates, the one
/// whose binding tabu label is oldest is released instead.
pub fn select_best_non_tabu(
    adds: &[ScoredMove],
    dels: &[ScoredMove],
    swaps: &[ScoredMove],
    tabu: &TabuList,
    best_weight: u64,
) -> Option<ScoredMove> {
    let mut best: Option<&ScoredMove> = None;
    for c in adds.iter().chain(dels).chain(swaps) {
        let aspirates = c.nd_after == 0 && c.w_after < best_weight;
        if tabu.forbids(c.mv) && !aspirates {
            continue;
        }
        if best.is_none_or(|b| precedes(c, b)) {
            best = Some(c);
        }
    }
    if let Some(c) = best {
        return Some(*c);
    }
    let mut fallback: Option<(usize, &ScoredMove)> = None;
    for c in adds.iter().chain(dels).chain(swaps) {
        let pos = tabu
            .binding_position(c.mv)
            .expect("unblocked candidates were handled above");
        let better = match fallback {
            None => true,
            Some((best_pos, best_c)) => pos < best_pos || (pos == best_pos && precedes(c, best_c)),
        };
        if better {
            fallback = Some((pos, c));
        }
    }
    fallback.map(|(_, c)| *c)
}

/// One per-iteration snapshot of the working solution, taken after the move
/// and redundancy elimination but before any perturbation.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub iteration: u64,
    pub alpha: f64,
    pub penalized_cost: f64,
    pub weight: u64,
    pub nondominated: usize,
    pub feasible: bool,
    pub new_best: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    /// 1-based iteration index.
    pub iteration: u64,
    pub alpha: f64,
    /// Number of SWAP pairs evaluated this iteration (≤ ⌈√n⌉²).
    pub swap_evaluations: usize,
    pub new_best: bool,
    pub perturbed: bool,
}

#[derive(Debug)]
pub struct TabuOutcome {
    pub best: Solution,
    pub trace: Vec<TraceRow>,
    pub iterations: u64,
}

/// Smallest r with r·r ≥ n.
fn ceil_sqrt(n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 1 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

/// A tabu phase driven one iteration at a time. [`TabuSearch::run`] loops
/// [`TabuSearch::step`] until an iteration budget is exhausted; the stepper
/// form exists so callers can instrument the state between iterations.
pub struct TabuSearch<'a, R: Rng> {
    graph: &'a Graph,
    params: &'a SearchParams,
    rng: &'a mut R,
    freq: &'a mut FrequencyCounter,
    current: Solution,
    best: Solution,
    best_weight: u64,
    schedule: PenaltySchedule,
    tabu: TabuList,
    k_swap: usize,
    w_max: u64,
    non_improving: u64,
    iterations: u64,
    adds: Vec<ScoredMove>,
    dels: Vec<ScoredMove>,
    swaps: Vec<ScoredMove>,
    stamp: Vec<u64>,
    stamp_gen: u64,
    trace: Vec<TraceRow>,
}

impl<'a, R: Rng> TabuSearch<'a, R> {
    /// Starts from a feasible solution; redundant members are stripped
    /// before the first iteration. `freq` must have no open spans — the
    /// members of the starting solution are entered at time 0.
    pub fn new(
        graph: &'a Graph,
        s0: Solution,
        params: &'a SearchParams,
        rng: &'a mut R,
        freq: &'a mut FrequencyCounter,
    ) -> Self {
        assert!(s0.is_feasible(), "tabu search requires a feasible start");
        assert_eq!(freq.n(), graph.n(), "frequency counter size mismatch");
        assert!(!freq.has_open_span(), "frequency counter must start closed");
        let mut current = s0;
        eliminate_redundant(&mut current, graph);
        for v in current.members() {
            freq.include(v, 0);
        }
        let best = current.clone();
        let best_weight = best.total_weight();
        let n = graph.n();
        TabuSearch {
            schedule: PenaltySchedule::new(params.alpha_min, params.alpha_max, params.beta, n.max(1)),
            tabu: TabuList::new(params.n_tabu),
            k_swap: ceil_sqrt(n),
            w_max: graph.max_weight(),
            graph,
            params,
            rng,
            freq,
            current,
            best,
            best_weight,
            non_improving: 0,
            iterations: 0,
            adds: Vec::new(),
            dels: Vec::new(),
            swaps: Vec::new(),
            stamp: vec![0; n],
            stamp_gen: 0,
            trace: Vec::new(),
        }
    }

    pub fn current(&self) -> &Solution {
        &self.current
    }

    pub fn best(&self) -> &Solution {
        &self.best
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    /// Runs one iteration, or returns `None` once an iteration budget is
    /// exhausted (the hard cap or the non-improving cap).
    pub fn step(&mut self) -> Option<StepInfo> {
        if self.non_improving >= self.params.i_ni
            || self.iterations >= self.params.i_max
            || self.graph.n() == 0
        {
            return None;
        }
        let t = self.iterations + 1;
        let alpha = self.schedule.advance();

        push_singletons(
            &self.current,
            self.graph,
            alpha,
            self.w_max,
            &mut self.adds,
            &mut self.dels,
        );
        let mut swap_evaluations = 0;
        self.swaps.clear();
        if self.params.use_swap {
            swap_evaluations = push_restricted_swaps(
                &self.current,
                self.graph,
                alpha,
                self.w_max,
                &self.adds,
                &self.dels,
                self.k_swap,
                &mut self.swaps,
                &mut self.stamp,
                &mut self.stamp_gen,
            );
        }
        let chosen = select_best_non_tabu(
            &self.adds,
            &self.dels,
            &self.swaps,
            &self.tabu,
            self.best_weight,
        )
        .expect("a nonempty graph always offers at least one move");

        self.current.apply_move(chosen.mv, self.graph);
        match chosen.mv {
            Move::Add(i) => self.freq.include(i, t),
            Move::Del(j) => self.freq.remove(j, t),
            Move::Swap { add, del } => {
                self.freq.include(add, t);
                self.freq.remove(del, t);
            }
        }
        self.tabu.record(chosen.mv);
        for v in eliminate_redundant(&mut self.current, self.graph) {
            self.freq.remove(v, t);
        }

        let mut new_best = false;
        if self.current.is_feasible() && self.current.total_weight() < self.best_weight {
            self.best.clone_from(&self.current);
            self.best_weight = self.current.total_weight();
            self.non_improving = 0;
            new_best = true;
        }

        self.trace.push(TraceRow {
            iteration: t,
            alpha,
            penalized_cost: self.current.penalized_cost(alpha, self.w_max),
            weight: self.current.total_weight(),
            nondominated: self.current.num_nondominated(),
            feasible: self.current.is_feasible(),
            new_best,
        });

        // The perturbation fires when the pre-increment iteration counter is
        // a positive multiple of the period, and replaces the working
        // solution with a perturbed copy of the best one.
        let mut perturbed = false;
        if self.iterations > 0 && self.iterations % self.params.i_pert == 0 {
            let next = perturb(&self.best, self.graph, self.params.rho, self.rng);
            for v in 0..self.graph.n() {
                if self.current.contains(v) {
                    self.freq.remove(v, t);
                }
                if next.contains(v) {
                    self.freq.include(v, t);
                }
            }
            self.current = next;
            perturbed = true;
        }

        self.non_improving += 1;
        self.iterations += 1;
        Some(StepInfo {
            iteration: t,
            alpha,
            swap_evaluations,
            new_best,
            perturbed,
        })
    }

    /// Closes all frequency spans and hands back the results.
    pub fn finish(self) -> TabuOutcome {
        let t = self.iterations;
        for v in self.current.members() {
            self.freq.remove(v, t);
        }
        TabuOutcome {
            best: self.best,
            trace: self.trace,
            iterations: self.iterations,
        }
    }

    pub fn run(mut self) -> TabuOutcome {
        while self.step().is_some() {}
        self.finish()
    }
}

/// One full tabu phase; see [`TabuSearch`] for the step-level API.
pub fn tabu_search(
    graph: &Graph,
    s0: Solution,
    params: &SearchParams,
    rng: &mut impl Rng,
    freq: &mut FrequencyCounter,
) -> TabuOutcome {
    TabuSearch::new(graph, s0, params, rng, freq).run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_instance, WeightKind};
    use crate::solution::{construct_random, swap_delta};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path3() -> Graph {
        Graph::from_edges(vec![3, 2, 4], &[(0, 1), (1, 2)])
    }

    /// Star: heavy center (weight 10), four unit leaves.
    fn star5() -> Graph {
        Graph::from_edges(vec![10, 1, 1, 1, 1], &[(0, 1), (0, 2), (0, 3), (0, 4)])
    }

    #[test]
    fn defaults_match_the_tuned_configuration() {
        let p = SearchParams::default();
        assert_eq!(
            (p.n_restart, p.i_max, p.i_ni, p.i_pert),
            (10, 20_000, 10_000, 100)
        );
        assert_eq!((p.rho, p.n_tabu, p.t_max_ip), (0.2, 12, 1.0));
        assert_eq!((p.alpha_min, p.alpha_max, p.beta), (0.1, 1.1, 1.3));
        assert_eq!(p.n_free_init, 50);
        assert!(p.use_ip && p.use_swap);
        assert!(p.validate().is_ok());

        let d = SearchParams::default().dimacs_preset();
        assert_eq!((d.i_max, d.i_ni), (2000, 1000));
        assert_eq!(d.i_pert, 100, "preset leaves the rest untouched");
    }

    #[test]
    fn validate_rejects_bad_parameters() {
        let mut p = SearchParams::default();
        p.rho = 1.5;
        assert_eq!(p.validate(), Err(ParamError::RhoOutOfRange { value: 1.5 }));
        let mut p = SearchParams::default();
        p.n_tabu = 0;
        assert_eq!(p.validate(), Err(ParamError::NotPositive { what: "n_tabu" }));
        let mut p = SearchParams::default();
        p.alpha_max = p.alpha_min;
        assert!(matches!(p.validate(), Err(ParamError::BadAlphaRange { .. })));
    }

    #[test]
    fn tabu_list_is_a_bounded_fifo() {
        let mut tabu = TabuList::new(3);
        for v in 0..4 {
            tabu.push(TabuLabel::ForbidInsert(v));
        }
        assert_eq!(tabu.len(), 3);
        assert!(!tabu.contains(TabuLabel::ForbidInsert(0)), "oldest evicted");
        assert_eq!(tabu.position(TabuLabel::ForbidInsert(1)), Some(0));
        assert_eq!(tabu.position(TabuLabel::ForbidInsert(3)), Some(2));
    }

    #[test]
    fn recording_moves_leaves_the_documented_labels() {
        let mut tabu = TabuList::new(12);
        tabu.record(Move::Add(5));
        assert!(tabu.contains(TabuLabel::ForbidRemove(5)));
        assert!(tabu.forbids(Move::Del(5)));
        assert!(!tabu.forbids(Move::Add(5)));

        tabu.record(Move::Del(2));
        assert!(tabu.forbids(Move::Add(2)));

        tabu.record(Move::Swap { add: 7, del: 8 });
        assert!(
            tabu.contains(TabuLabel::ForbidInsert(8)),
            "swap bars reinsertion of the removed vertex"
        );
        assert!(
            !tabu.contains(TabuLabel::ForbidRemove(7)),
            "swap leaves the inserted vertex unprotected"
        );
        assert!(tabu.forbids(Move::Swap { add: 8, del: 0 }));
        assert!(tabu.forbids(Move::Swap { add: 0, del: 5 }));
    }

    #[test]
    fn singleton_evaluation_ranks_by_delta_then_id() {
        let g = path3();
        let empty = Solution::empty(&g);
        let (adds, dels) = evaluate_singletons(&empty, &g, 1.0, g.max_weight());
        assert!(dels.is_empty());
        let order: Vec<(Move, f64)> = adds.iter().map(|c| (c.mv, c.delta)).collect();
        assert_eq!(
            order,
            vec![
                (Move::Add(1), -10.0),
                (Move::Add(0), -5.0),
                (Move::Add(2), -4.0)
            ]
        );
        assert_eq!(adds[0].nd_after, 0, "adding the center dominates the path");
        assert_eq!(adds[0].w_after, 2);

        let center = Solution::from_members(&g, [1]);
        let (adds, dels) = evaluate_singletons(&center, &g, 1.0, g.max_weight());
        assert_eq!(dels.len(), 1);
        assert_eq!((dels[0].mv, dels[0].delta), (Move::Del(1), 10.0));
        assert_eq!(adds.len(), 2, "one ADD entry per non-member");
    }

    #[test]
    fn restricted_swaps_cross_top_candidates_exactly() {
        let g = generate_instance(30, 120, WeightKind::T1, 5).unwrap().graph;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sol = construct_random(&g, &mut rng);
        let k = ceil_sqrt(g.n());
        let (adds, dels) = evaluate_singletons(&sol, &g, 0.3, g.max_weight());
        let swaps = restricted_swaps(&sol, &g, 0.3, g.max_weight(), &adds, &dels, k);
        assert!(swaps.len() <= k * k);
        assert_eq!(swaps.len(), k.min(adds.len()) * k.min(dels.len()));
        for c in &swaps {
            let Move::Swap { add, del } = c.mv else { panic!() };
            let (dw, dnd) = swap_delta(&sol, &g, add, del);
            assert_eq!(
                c.delta,
                penalized_delta(dw, dnd, 0.3, g.max_weight()),
                "stamped evaluation must equal the standalone joint delta"
            );
            assert_eq!(c.w_after as i64, sol.total_weight() as i64 + dw);
        }
    }

    #[test]
    fn swap_neighborhood_is_empty_at_the_extremes() {
        let g = path3();
        let full = Solution::from_members(&g, [0, 1, 2]);
        let (adds, dels) = evaluate_singletons(&full, &g, 0.5, g.max_weight());
        assert!(adds.is_empty());
        assert!(restricted_swaps(&full, &g, 0.5, g.max_weight(), &adds, &dels, 2).is_empty());
    }

    fn cand(mv: Move, delta: f64) -> ScoredMove {
        ScoredMove {
            mv,
            delta,
            w_after: 100,
            nd_after: 5,
        }
    }

    #[test]
    fn selection_prefers_small_delta_then_kind_then_id() {
        let tabu = TabuList::new(4);
        let adds = [cand(Move::Add(3), 1.0), cand(Move::Add(7), 2.0)];
        let dels = [cand(Move::Del(1), 1.0)];
        let swaps = [cand(Move::Swap { add: 2, del: 4 }, 1.0)];
        let chosen = select_best_non_tabu(&adds, &dels, &swaps, &tabu, 0).unwrap();
        assert_eq!(chosen.mv, Move::Add(3), "ADD wins ties against DEL and SWAP");

        let chosen = select_best_non_tabu(&[], &dels, &swaps, &tabu, 0).unwrap();
        assert_eq!(chosen.mv, Move::Del(1), "DEL wins ties against SWAP");

        let adds = [cand(Move::Add(9), 1.0), cand(Move::Add(4), 1.0)];
        let chosen = select_best_non_tabu(&adds, &[], &[], &tabu, 0).unwrap();
        assert_eq!(chosen.mv, Move::Add(4), "smaller id wins");
    }

    #[test]
    fn selection_skips_tabu_unless_aspiration_applies() {
        let mut tabu = TabuList::new(4);
        tabu.push(TabuLabel::ForbidInsert(3));
        let adds = [cand(Move::Add(3), -5.0), cand(Move::Add(8), -1.0)];
        let chosen = select_best_non_tabu(&adds, &[], &[], &tabu, 50).unwrap();
        assert_eq!(chosen.mv, Move::Add(8), "blocked candidate is passed over");

        // The same blocked move aspirates once its result is feasible and
        // strictly better than the best feasible weight.
        let mut better = cand(Move::Add(3), -5.0);
        better.nd_after = 0;
        better.w_after = 40;
        let chosen = select_best_non_tabu(&[better, adds[1]], &[], &[], &tabu, 50).unwrap();
        assert_eq!(chosen.mv, Move::Add(3));
        let chosen = select_best_non_tabu(&[better, adds[1]], &[], &[], &tabu, 40).unwrap();
        assert_eq!(chosen.mv, Move::Add(8), "equal weight does not aspirate");
    }

    #[test]
    fn deadlock_releases_the_oldest_binding_label() {
        let mut tabu = TabuList::new(4);
        tabu.push(TabuLabel::ForbidInsert(2));
        tabu.push(TabuLabel::ForbidInsert(4));
        tabu.push(TabuLabel::ForbidRemove(5));
        let adds = [cand(Move::Add(4), -9.0), cand(Move::Add(2), -1.0)];
        let chosen = select_best_non_tabu(&adds, &[], &[], &tabu, 0).unwrap();
        assert_eq!(
            chosen.mv,
            Move::Add(2),
            "oldest label outranks better delta in the deadlock case"
        );

        // A swap blocked by two labels is bound by the newer of the two.
        let swaps = [cand(Move::Swap { add: 2, del: 5 }, -9.0)];
        let chosen = select_best_non_tabu(&adds, &[], &swaps, &tabu, 0).unwrap();
        assert_eq!(chosen.mv, Move::Add(2), "swap is bound by ForbidRemove(5)");
    }

    fn run_search(g: &Graph, s0: Solution, params: &SearchParams, seed: u64) -> TabuOutcome {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut freq = FrequencyCounter::new(g.n());
        let out = tabu_search(g, s0, params, &mut rng, &mut freq);
        assert!(!freq.has_open_span(), "all spans closed at exit");
        out
    }

    #[test]
    fn search_finds_the_path_and_star_optima() {
        let g = path3();
        let s0 = Solution::from_members(&g, [0, 1, 2]);
        let params = SearchParams {
            i_max: 300,
            i_ni: 300,
            ..SearchParams::default()
        };
        let out = run_search(&g, s0, &params, 1);
        assert_eq!(out.best.total_weight(), 2);
        assert_eq!(out.best.members().collect::<Vec<_>>(), vec![1]);

        let star = star5();
        let s0 = Solution::from_members(&star, [0]);
        let out = run_search(&star, s0, &params, 2);
        assert_eq!(out.best.total_weight(), 4, "four unit leaves beat the center");
    }

    #[test]
    fn zero_iteration_budget_returns_the_eliminated_start() {
        let star = star5();
        let s0 = Solution::from_members(&star, 0..5);
        let params = SearchParams {
            i_max: 0,
            ..SearchParams::default()
        };
        let out = run_search(&star, s0, &params, 3);
        assert_eq!(out.iterations, 0);
        assert!(out.trace.is_empty());
        assert_eq!(
            out.best.members().collect::<Vec<_>>(),
            vec![1, 2, 3, 4],
            "entry elimination drops the heavy redundant center"
        );
    }

    #[test]
    fn trace_covers_every_iteration_and_best_updates_are_feasible_descents() {
        let g = generate_instance(20, 60, WeightKind::T1, 77).unwrap().graph;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s0 = construct_random(&g, &mut rng);
        let params = SearchParams {
            i_max: 400,
            i_ni: 400,
            ..SearchParams::default()
        };
        let out = run_search(&g, s0, &params, 5);
        assert_eq!(out.trace.len(), out.iterations as usize);
        assert!(out.iterations > 0);
        let bests: Vec<&TraceRow> = out.trace.iter().filter(|r| r.new_best).collect();
        for row in &bests {
            assert!(row.feasible);
        }
        for pair in bests.windows(2) {
            assert!(pair[1].weight < pair[0].weight, "best weights strictly fall");
        }
        for row in &out.trace {
            assert!(row.alpha > 0.0 && row.alpha < params.alpha_max + 0.1);
            if row.feasible {
                assert_eq!(row.penalized_cost, row.weight as f64);
            } else {
                assert!(row.penalized_cost > row.weight as f64);
            }
        }
    }

    #[test]
    fn perturbation_fires_on_positive_multiples_of_the_period() {
        let g = generate_instance(12, 20, WeightKind::T1, 8).unwrap().graph;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s0 = construct_random(&g, &mut rng);
        let params = SearchParams {
            i_max: 12,
            i_ni: 12,
            i_pert: 5,
            ..SearchParams::default()
        };
        let mut freq = FrequencyCounter::new(g.n());
        let mut search = TabuSearch::new(&g, s0, &params, &mut rng, &mut freq);
        let mut perturbed_at = Vec::new();
        while let Some(info) = search.step() {
            assert!(
                info.swap_evaluations <= ceil_sqrt(g.n()).pow(2),
                "swap work stays within the restricted budget"
            );
            if info.perturbed {
                perturbed_at.push(info.iteration);
            }
        }
        assert_eq!(
            perturbed_at,
            vec![6, 11],
            "pre-increment counters 5 and 10 trigger the perturbation"
        );
    }

    #[test]
    fn pure_descent_composition_terminates_at_a_local_optimum() {
        // With a high fixed alpha, no tabu, and no aspiration, repeatedly
        // applying the best candidate is a strict descent.
        let g = generate_instance(14, 30, WeightKind::T2, 21).unwrap().graph;
        let w_max = g.max_weight();
        let alpha = 2.0;
        let mut sol = Solution::empty(&g);
        let empty_tabu = TabuList::new(1);
        let mut steps = 0;
        loop {
            let (adds, dels) = evaluate_singletons(&sol, &g, alpha, w_max);
            let swaps = restricted_swaps(&sol, &g, alpha, w_max, &adds, &dels, ceil_sqrt(g.n()));
            let c = select_best_non_tabu(&adds, &dels, &swaps, &empty_tabu, 0).unwrap();
            if c.delta >= 0.0 {
                break;
            }
            let before = sol.penalized_cost(alpha, w_max);
            sol.apply_move(c.mv, &g);
            assert!(sol.penalized_cost(alpha, w_max) < before);
            steps += 1;
            assert!(steps <= 10_000, "descent must terminate");
        }
        assert!(sol.is_feasible(), "high alpha forces feasibility first");
    }

    #[test]
    fn ceil_sqrt_is_exact() {
        assert_eq!(ceil_sqrt(0), 0);
        assert_eq!(ceil_sqrt(1), 1);
        assert_eq!(ceil_sqrt(12), 4);
        assert_eq!(ceil_sqrt(100), 10);
        assert_eq!(ceil_sqrt(101), 11);
        assert_eq!(ceil_sqrt(400), 20);
    }
}
