//! Reduced integer subproblems and their exact solution.
//!
//! After each tabu phase the solver freezes most vertices out of the model
//! and re-optimizes over a small *free* set: the members of the incumbent
//! plus the historically most-used non-members. The reduced covering model
//! is solved exactly by a depth-first branch-and-bound under a wall-clock
//! budget; the free-set size then adapts to the verdict.

use std::io::{self, Write};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::graph::Graph;
use crate::solution::Solution;

const OPEN: u64 = u64::MAX;

/// Tracks, per vertex, the total number of iterations spent inside the
/// current solution. Membership is recorded as lazy spans: `include` opens a
/// span, `remove` closes it and banks its length, `flush` banks all open
/// spans without closing them.
#[derive(Debug, Clone)]
pub struct FrequencyCounter {
    total: Vec<u64>,
    entered: Vec<u64>,
}

impl FrequencyCounter {
    pub fn new(n: usize) -> Self {
        FrequencyCounter {
            total: vec![0; n],
            entered: vec![OPEN; n],
        }
    }

    pub fn n(&self) -> usize {
        self.total.len()
    }

    /// Opens a span for `v` at time `t`. `v` must not already be inside.
    pub fn include(&mut self, v: usize, t: u64) {
        assert_eq!(self.entered[v], OPEN, "vertex {v} is already included");
        self.entered[v] = t;
    }

    /// Closes the open span of `v` at time `t`, banking `t - entry`.
    pub fn remove(&mut self, v: usize, t: u64) {
        let entry = self.entered[v];
        assert_ne!(entry, OPEN, "vertex {v} is not included");
        assert!(t >= entry, "time ran backwards for vertex {v}");
        self.total[v] += t - entry;
        self.entered[v] = OPEN;
    }

    /// Banks every open span up to time `t` and restarts it there, so totals
    /// can be read mid-run without disturbing membership.
    pub fn flush(&mut self, t: u64) {
        for v in 0..self.entered.len() {
            if self.entered[v] != OPEN {
                assert!(t >= self.entered[v], "time ran backwards for vertex {v}");
                self.total[v] += t - self.entered[v];
                self.entered[v] = t;
            }
        }
    }

    /// Total banked usage of `v` (any still-open span is not counted; call
    /// [`FrequencyCounter::flush`] first for an up-to-date reading).
    pub fn total(&self, v: usize) -> u64 {
        self.total[v]
    }

    pub fn has_open_span(&self) -> bool {
        self.entered.iter().any(|&e| e != OPEN)
    }

    /// Adds another counter's banked totals into this one. Usage histories
    /// from independently clocked runs combine by plain addition, so merging
    /// is associative and order-independent. Both sides must be fully
    /// closed.
    pub fn merge(&mut self, other: &FrequencyCounter) {
        assert_eq!(self.n(), other.n(), "counter size mismatch");
        assert!(
            !self.has_open_span() && !other.has_open_span(),
            "merge requires fully closed counters"
        );
        for v in 0..self.total.len() {
            self.total[v] += other.total[v];
        }
    }
}

/// The frozen/free split of one reduced subproblem. Every vertex of the
/// underlying graph must still be dominated, but only free vertices may be
/// chosen.
#[derive(Debug)]
pub struct ReducedProblem<'g> {
    graph: &'g Graph,
    free: Vec<usize>,
    in_free: Vec<bool>,
}

impl<'g> ReducedProblem<'g> {
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// Free vertices in ascending order.
    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn is_free(&self, v: usize) -> bool {
        self.in_free[v]
    }

    pub fn covers_whole_graph(&self) -> bool {
        self.free.len() == self.graph.n()
    }

    /// Writes the model in LP format (binary covering program over the free
    /// variables only).
    pub fn write_lp(&self, out: &mut impl Write) -> io::Result<()> {
        let g = self.graph;
        writeln!(out, "Minimize")?;
        let obj: Vec<String> = self
            .free
            .iter()
            .map(|&v| format!("{} x{}", g.weight(v), v + 1))
            .collect();
        writeln!(out, " obj: {}", obj.join(" + "))?;
        writeln!(out, "Subject To")?;
        for u in 0..g.n() {
            let cover: Vec<String> = g
                .closed_neighborhood(u)
                .filter(|&k| self.in_free[k])
                .map(|k| format!("x{}", k + 1))
                .collect();
            writeln!(out, " c{}: {} >= 1", u + 1, cover.join(" + "))?;
        }
        writeln!(out, "Binary")?;
        let names: Vec<String> = self.free.iter().map(|&v| format!("x{}", v + 1)).collect();
        writeln!(out, " {}", names.join(" "))?;
        writeln!(out, "End")
    }
}

/// Selects the free set: all members of `s_best`, plus the most-used
/// non-members by banked frequency (ties by smaller id) up to a total of
/// `n_free` vertices.
pub fn build_reduced<'g>(
    g: &'g Graph,
    s_best: &Solution,
    freq: &FrequencyCounter,
    n_free: usize,
) -> ReducedProblem<'g> {
    let mut in_free = vec![false; g.n()];
    for v in s_best.members() {
        in_free[v] = true;
    }
    let n_freq = n_free.saturating_sub(s_best.len());
    let mut outsiders: Vec<usize> = (0..g.n()).filter(|&v| !in_free[v]).collect();
    outsiders.sort_by_key(|&v| (std::cmp::Reverse(freq.total(v)), v));
    for &v in outsiders.iter().take(n_freq) {
        in_free[v] = true;
    }
    let free: Vec<usize> = (0..g.n()).filter(|&v| in_free[v]).collect();
    ReducedProblem { graph: g, free, in_free }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IpVerdict {
    /// The search tree was exhausted within the time budget.
    Optimal,
    /// A feasible incumbent exists but optimality was not proven in time.
    FeasibleOnly,
    /// No feasible assignment exists (unreachable when the warm start is
    /// contained in the free set).
    NoSolution,
}

#[derive(Debug, Clone)]
pub struct IpOutcome {
    pub verdict: IpVerdict,
    pub incumbent: Option<Solution>,
    /// True when an exhausted search ran over the entire vertex set, i.e.
    /// the incumbent is a proven optimum of the whole problem.
    pub proved_whole_problem: bool,
}

/// Admissible completion bound: greedily walks the uncovered vertices in
/// ascending order, keeps those whose usable cover sets are pairwise
/// disjoint, and charges each the cheapest usable vertex that could cover
/// it. Any feasible completion must pay at least this much, because the
/// selected vertices require distinct coverers. Uncovered vertices with no
/// usable cover contribute nothing (the caller prunes those branches).
pub fn disjoint_cover_bound(g: &Graph, usable: &[bool], uncovered: &[usize]) -> u64 {
    let mut used = vec![false; g.n()];
    let mut bound = 0u64;
    for &u in uncovered {
        let mut cheapest = u64::MAX;
        let mut disjoint = true;
        let mut any = false;
        for k in g.closed_neighborhood(u) {
            if usable[k] {
                any = true;
                if used[k] {
                    disjoint = false;
                    break;
                }
                cheapest = cheapest.min(g.weight(k));
            }
        }
        if any && disjoint {
            bound += cheapest;
            for k in g.closed_neighborhood(u) {
                if usable[k] {
                    used[k] = true;
                }
            }
        }
    }
    bound
}

struct BranchBound<'a> {
    g: &'a Graph,
    rp: &'a ReducedProblem<'a>,
    deadline: Instant,
    timed_out: bool,
    /// Free, not yet excluded, not yet chosen.
    usable: Vec<bool>,
    chosen: Vec<usize>,
    cover: Vec<u32>,
    uncovered_count: usize,
    /// Remaining usable coverers per vertex; 0 on an uncovered vertex kills
    /// the branch.
    avail: Vec<u32>,
    current_weight: u64,
    best_weight: u64,
    best_set: Vec<usize>,
    improved: bool,
}

impl BranchBound<'_> {
    fn uncovered(&self) -> Vec<usize> {
        (0..self.g.n())
            .filter(|&u| self.cover[u] == 0)
            .collect()
    }

    /// Free vertex covering the most uncovered vertices; ties prefer larger
    /// weight, then smaller id.
    fn branch_vertex(&self) -> Option<usize> {
        let mut best: Option<(usize, u64, usize)> = None; // (gain, weight, v)
        for &v in self.rp.free() {
            if !self.usable[v] {
                continue;
            }
            let gain = self
                .g
                .closed_neighborhood(v)
                .filter(|&u| self.cover[u] == 0)
                .count();
            if gain == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bg, bw, bv)) => {
                    gain > bg
                        || (gain == bg
                            && (self.g.weight(v) > bw || (self.g.weight(v) == bw && v < bv)))
                }
            };
            if better {
                best = Some((gain, self.g.weight(v), v));
            }
        }
        best.map(|(_, _, v)| v)
    }

    fn choose(&mut self, v: usize) {
        self.usable[v] = false;
        self.chosen.push(v);
        self.current_weight += self.g.weight(v);
        for u in self.g.closed_neighborhood(v) {
            self.cover[u] += 1;
            if self.cover[u] == 1 {
                self.uncovered_count -= 1;
            }
        }
    }

    fn unchoose(&mut self, v: usize) {
        self.usable[v] = true;
        self.chosen.pop();
        self.current_weight -= self.g.weight(v);
        for u in self.g.closed_neighborhood(v) {
            self.cover[u] -= 1;
            if self.cover[u] == 0 {
                self.uncovered_count += 1;
            }
        }
    }

    fn dfs(&mut self) {
        if self.timed_out || Instant::now() >= self.deadline {
            self.timed_out = true;
            return;
        }
        if self.uncovered_count == 0 {
            if self.current_weight < self.best_weight {
                self.best_weight = self.current_weight;
                self.best_set = self.chosen.clone();
                self.improved = true;
            }
            return;
        }
        let uncovered = self.uncovered();
        let bound =
            self.current_weight + disjoint_cover_bound(self.g, &self.usable, &uncovered);
        if bound >= self.best_weight {
            return;
        }
        let Some(v) = self.branch_vertex() else {
            return; // uncovered vertices remain but nothing usable covers them
        };

        // Include branch first.
        self.choose(v);
        self.dfs();
        self.unchoose(v);
        if self.timed_out {
            return;
        }

        // Exclude branch: drop v from every cover set; a vertex left with no
        // potential coverer makes the branch infeasible.
        self.usable[v] = false;
        let mut dead = false;
        for u in self.g.closed_neighborhood(v) {
            self.avail[u] -= 1;
            if self.avail[u] == 0 && self.cover[u] == 0 {
                dead = true;
            }
        }
        if !dead {
            self.dfs();
        }
        for u in self.g.closed_neighborhood(v) {
            self.avail[u] += 1;
        }
        self.usable[v] = true;
    }
}

/// Exact depth-first branch-and-bound over the free vertices of `rp`,
/// warm-started from a feasible solution contained in the free set. Checks
/// the wall-clock deadline at every node expansion; the verdict is
/// [`IpVerdict::Optimal`] only if the tree was exhausted in time. A
/// non-positive `time_limit_secs` skips the search entirely.
pub fn solve_branch_bound(
    rp: &ReducedProblem,
    warm: &Solution,
    time_limit_secs: f64,
) -> IpOutcome {
    let g = rp.graph();
    assert!(warm.is_feasible(), "warm start must be feasible");
    debug_assert!(
        warm.members().all(|v| rp.is_free(v)),
        "warm start must be contained in the free set"
    );
    if time_limit_secs <= 0.0 {
        return IpOutcome {
            verdict: IpVerdict::FeasibleOnly,
            incumbent: Some(warm.clone()),
            proved_whole_problem: false,
        };
    }

    let mut avail = vec![0u32; g.n()];
    for &v in rp.free() {
        for u in g.closed_neighborhood(v) {
            avail[u] += 1;
        }
    }
    if (0..g.n()).any(|u| avail[u] == 0) {
        // Unreachable through the solver pipeline (the warm start covers
        // everything), but the model itself can be infeasible.
        return IpOutcome {
            verdict: IpVerdict::NoSolution,
            incumbent: None,
            proved_whole_problem: false,
        };
    }

    let mut usable = vec![false; g.n()];
    for &v in rp.free() {
        usable[v] = true;
    }
    let mut bb = BranchBound {
        g,
        rp,
        deadline: Instant::now() + Duration::from_secs_f64(time_limit_secs),
        timed_out: false,
        usable,
        chosen: Vec::new(),
        cover: vec![0; g.n()],
        uncovered_count: g.n(),
        avail,
        current_weight: 0,
        best_weight: warm.total_weight(),
        best_set: warm.members().collect(),
        improved: false,
    };
    bb.dfs();

    let verdict = if bb.timed_out {
        IpVerdict::FeasibleOnly
    } else {
        IpVerdict::Optimal
    };
    let incumbent = Solution::from_members(g, bb.best_set.iter().copied());
    debug_assert!(incumbent.is_feasible());
    IpOutcome {
        verdict,
        proved_whole_problem: verdict == IpVerdict::Optimal && rp.covers_whole_graph(),
        incumbent: Some(incumbent),
    }
}

/// Adapts the free-set size to the last verdict: a proven optimum over the
/// whole vertex set terminates the run; a proven optimum over a strict
/// subset doubles the free set (capped at n); anything else halves it
/// (floored at 1).
pub fn adapt_n_free(outcome: &IpOutcome, n_free: usize, n: usize) -> (usize, bool) {
    match outcome.verdict {
        IpVerdict::Optimal if n_free >= n => (n_free, true),
        IpVerdict::Optimal => ((2 * n_free).min(n), false),
        _ => ((n_free / 2).max(1), false),
    }
}
