//! Hybrid tabu-search matheuristic for the minimum-weight dominating set
//! (MWDS) problem on vertex-weighted undirected graphs.
//!
//! The solver combines a penalty-driven tabu search (oscillating between
//! feasible and infeasible regions), a ruin-and-recreate perturbation, and an
//! exact branch-and-bound pass over an adaptively sized reduced subproblem
//! seeded by vertex-usage frequencies.

pub mod graph;
pub mod ip;
pub mod oracle;
pub mod penalty;
pub mod perturb;
pub mod report;
pub mod solution;
pub mod solver;
pub mod tabu;

pub use graph::{
    generate_instance, parse_auto, parse_dimacs, parse_instance, to_native, GenerateError, Graph,
    Instance, ParseError, WeightKind,
};
pub use ip::{
    adapt_n_free, build_reduced, solve_branch_bound, FrequencyCounter, IpOutcome, IpVerdict,
    ReducedProblem,
};
pub use oracle::{brute_force_optimum, OracleError};
pub use penalty::PenaltySchedule;
pub use perturb::perturb;
pub use report::{aggregate_groups, fit_power_law, gap_percent, GroupRow, InstanceRuns, ReportError};
pub use solution::{construct_random, eliminate_redundant, Move, Solution};
pub use solver::{derive_seed, hts_ds, RestartRecord, RunReport};
pub use tabu::{
    tabu_search, ParamError, ScoredMove, SearchParams, StepInfo, TabuLabel, TabuList, TabuOutcome,
    TabuSearch, TraceRow,
};
