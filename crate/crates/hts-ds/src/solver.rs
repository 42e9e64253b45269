//! Restart driver: each restart builds a random feasible solution, improves
//! it with a tabu phase, then (unless disabled) solves a frequency-guided
//! reduced problem exactly and adapts the free-set size for the next
//! restart. Results are deterministic in (instance, parameters, seed),
//! including when restarts run on worker threads.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::graph::{Graph, Instance};
use crate::ip::{adapt_n_free, build_reduced, solve_branch_bound, FrequencyCounter, IpVerdict};
use crate::solution::{construct_random, Solution};
use crate::tabu::{tabu_search, ParamError, SearchParams, TraceRow};

/// Splitmix64 mix of the master seed and the restart index, so restart
/// random streams are independent and stable regardless of thread count.
pub fn derive_seed(master: u64, restart: u64) -> u64 {
    let mut z = master.wrapping_add((restart + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Everything one tabu phase produces. Phases only read the graph and the
/// parameters, so they can run concurrently; the driver folds them back in
/// restart order.
struct TabuPhase {
    best: Solution,
    trace: Vec<TraceRow>,
    iterations: u64,
    freq: FrequencyCounter,
    seconds: f64,
}

fn run_tabu_phase(g: &Graph, params: &SearchParams, seed: u64) -> TabuPhase {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut freq = FrequencyCounter::new(g.n());
    let s0 = construct_random(g, &mut rng);
    let out = tabu_search(g, s0, params, &mut rng, &mut freq);
    TabuPhase {
        best: out.best,
        trace: out.trace,
        iterations: out.iterations,
        freq,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Per-restart summary retained in the run report.
#[derive(Debug, Clone, Serialize)]
pub struct RestartRecord {
    pub restart: usize,
    pub seed: u64,
    /// Best feasible weight found by the tabu phase alone.
    pub tabu_best_weight: u64,
    /// Best weight after the exact pass over the reduced problem.
    pub best_weight: u64,
    pub iterations: u64,
    /// Free-set size used for this restart's reduced problem.
    pub n_free: usize,
    pub ip_verdict: Option<IpVerdict>,
    pub tabu_time_secs: f64,
    pub ip_time_secs: f64,
}

/// Final result of a full solver run. `best_vertices` uses the 1-based ids
/// of the input format.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub master_seed: u64,
    pub best_weight: u64,
    pub best_vertices: Vec<usize>,
    /// True when some restart's exact pass proved its answer optimal for
    /// the whole problem, not just the reduced one.
    pub proven_optimal: bool,
    pub restarts: Vec<RestartRecord>,
    pub total_time_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
}

struct Fold<'g> {
    graph: &'g Graph,
    params: &'g SearchParams,
    n_free: usize,
    freq: FrequencyCounter,
    best: Option<Solution>,
    records: Vec<RestartRecord>,
    trace: Option<Vec<TraceRow>>,
    trace_offset: u64,
    proven: bool,
}

impl Fold<'_> {
    /// Absorbs one tabu phase: merges its frequencies, runs the exact
    /// reduced pass, adapts the free-set size, and updates the overall
    /// best. Returns true once optimality is proven for the whole problem.
    fn absorb(&mut self, restart: usize, seed: u64, phase: TabuPhase) -> bool {
        let TabuPhase {
            best: mut restart_best,
            trace,
            iterations,
            freq,
            seconds,
        } = phase;
        self.freq.merge(&freq);
        if let Some(rows) = &mut self.trace {
            let offset = self.trace_offset;
            rows.extend(trace.into_iter().map(|mut row| {
                row.iteration += offset;
                row
            }));
        }
        self.trace_offset += iterations;

        let tabu_best_weight = restart_best.total_weight();
        let n_free_used = self.n_free;
        let mut ip_verdict = None;
        let mut ip_secs = 0.0;
        if self.params.use_ip {
            let ip_start = Instant::now();
            let reduced = build_reduced(self.graph, &restart_best, &self.freq, self.n_free);
            let outcome = solve_branch_bound(&reduced, &restart_best, self.params.t_max_ip);
            ip_secs = ip_start.elapsed().as_secs_f64();
            if let Some(incumbent) = &outcome.incumbent {
                if incumbent.total_weight() < restart_best.total_weight() {
                    restart_best = incumbent.clone();
                }
            }
            ip_verdict = Some(outcome.verdict);
            self.proven |= outcome.proved_whole_problem;
            let (next, _) = adapt_n_free(&outcome, self.n_free, self.graph.n());
            self.n_free = next;
        }

        if self
            .best
            .as_ref()
            .is_none_or(|b| restart_best.total_weight() < b.total_weight())
        {
            self.best = Some(restart_best.clone());
        }
        self.records.push(RestartRecord {
            restart,
            seed,
            tabu_best_weight,
            best_weight: restart_best.total_weight(),
            iterations,
            n_free: n_free_used,
            ip_verdict,
            tabu_time_secs: seconds,
            ip_time_secs: ip_secs,
        });
        self.proven
    }
}

/// Runs the full solver on an instance. Restarts stop early once a reduced
/// solve proves whole-problem optimality. With `params.threads > 1` the
/// tabu phases are precomputed concurrently; the fold still happens in
/// restart order, so the report is identical to a single-threaded run
/// (timing fields aside).
pub fn hts_ds(inst: &Instance, params: &SearchParams, master_seed: u64) -> Result<RunReport, ParamError> {
    params.validate()?;
    let start = Instant::now();
    let g = &inst.graph;
    let n = g.n();
    let mut fold = Fold {
        graph: g,
        params,
        n_free: params.n_free_init.min(n),
        freq: FrequencyCounter::new(n),
        best: None,
        records: Vec::new(),
        trace: params.record_trace.then(Vec::new),
        trace_offset: 0,
        proven: false,
    };

    if params.threads > 1 && params.n_restart > 1 {
        let mut slots: Vec<Option<TabuPhase>> = (0..params.n_restart).map(|_| None).collect();
        let next = AtomicUsize::new(0);
        let workers = params.threads.min(params.n_restart);
        std::thread::scope(|scope| {
            let (tx, rx) = mpsc::channel();
            for _ in 0..workers {
                let tx = tx.clone();
                let next = &next;
                scope.spawn(move || loop {
                    let r = next.fetch_add(1, Ordering::Relaxed);
                    if r >= params.n_restart {
                        break;
                    }
                    let phase = run_tabu_phase(g, params, derive_seed(master_seed, r as u64));
                    if tx.send((r, phase)).is_err() {
                        break;
                    }
                });
            }
            drop(tx);
            for (r, phase) in rx {
                slots[r] = Some(phase);
            }
        });
        for (r, slot) in slots.into_iter().enumerate() {
            let seed = derive_seed(master_seed, r as u64);
            let phase = slot.expect("every restart slot was filled");
            if fold.absorb(r, seed, phase) {
                break;
            }
        }
    } else {
        for r in 0..params.n_restart {
            let seed = derive_seed(master_seed, r as u64);
            let phase = run_tabu_phase(g, params, seed);
            if fold.absorb(r, seed, phase) {
                break;
            }
        }
    }

    let best = fold.best.expect("at least one restart always runs");
    // Recount the winner from scratch: the reported set must dominate the
    // graph no matter what path produced it.
    let verified = Solution::from_members(g, best.members());
    assert!(verified.is_feasible(), "driver produced a non-dominating set");
    assert_eq!(verified.total_weight(), best.total_weight());

    Ok(RunReport {
        instance: inst.name.clone(),
        n,
        m: g.m(),
        master_seed,
        best_weight: verified.total_weight(),
        best_vertices: verified.members().map(|v| v + 1).collect(),
        proven_optimal: fold.proven,
        restarts: fold.records,
        total_time_secs: start.elapsed().as_secs_f64(),
        trace: fold.trace,
    })
}
