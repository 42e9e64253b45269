//! Command-line front end: solve instances, generate benchmark families,
//! aggregate repeated runs into size tables, and check small instances
//! against the exhaustive reference solver.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hts_ds::graph::{generate_instance, parse_auto, to_native, Instance, WeightKind};
use hts_ds::oracle::brute_force_optimum;
use hts_ds::report::{aggregate_groups, fit_power_law, GroupRow, InstanceRuns};
use hts_ds::solver::{derive_seed, hts_ds, RunReport};
use hts_ds::tabu::{SearchParams, TraceRow};

#[derive(Parser)]
#[command(
    name = "hts-ds",
    version,
    about = "Hybrid tabu-search matheuristic for minimum-weight dominating sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the best dominating set found.
    Solve {
        /// Instance file; the native and DIMACS formats are auto-detected.
        file: PathBuf,
        #[command(flatten)]
        flags: ParamFlags,
        /// Write the full run report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Write the per-iteration search trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Generate a random instance in the native format.
    Generate {
        /// Number of vertices.
        #[arg(long)]
        n: usize,
        /// Number of edges.
        #[arg(long)]
        m: usize,
        /// Weight model: uniform 20..=70 (t1) or degree-based (t2).
        #[arg(long = "type", value_enum, default_value = "t1")]
        weight_type: WeightType,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve every instance in a directory repeatedly and aggregate the
    /// results by instance size.
    Bench {
        /// Directory of instance files.
        #[arg(long)]
        dir: PathBuf,
        /// Independent runs per instance.
        #[arg(long, default_value_t = 3)]
        runs: usize,
        /// JSON map from instance name (file stem) to best-known weight.
        #[arg(long)]
        bks: Option<PathBuf>,
        /// Write the aggregated table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        flags: ParamFlags,
    },
    /// Solve a small instance (at most 25 vertices) exactly by exhaustive
    /// search.
    Oracle {
        /// Instance file; the native and DIMACS formats are auto-detected.
        file: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum WeightType {
    T1,
    T2,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Preset {
    /// Shorter iteration budgets for the large DIMACS-derived instances.
    Dimacs,
}

/// Solver parameters shared by `solve` and `bench`. Unset flags fall back
/// to the preset (when given), then to the tuned defaults.
#[derive(Debug, Args)]
struct ParamFlags {
    /// Master random seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of restarts.
    #[arg(long)]
    restarts: Option<usize>,
    /// Hard iteration cap per tabu phase.
    #[arg(long)]
    imax: Option<u64>,
    /// Non-improving iteration cap per tabu phase.
    #[arg(long)]
    ini: Option<u64>,
    /// Perturbation period in iterations.
    #[arg(long)]
    ipert: Option<u64>,
    /// Fraction of the best solution ruined by a perturbation.
    #[arg(long)]
    rho: Option<f64>,
    /// Tabu list capacity.
    #[arg(long)]
    tabu: Option<usize>,
    /// Time limit in seconds for each exact reduced solve.
    #[arg(long = "tmax-ip")]
    tmax_ip: Option<f64>,
    /// Lower bound of the penalty sawtooth.
    #[arg(long)]
    alpha_min: Option<f64>,
    /// Upper bound of the penalty sawtooth.
    #[arg(long)]
    alpha_max: Option<f64>,
    /// Penalty ramp length factor.
    #[arg(long)]
    beta: Option<f64>,
    /// Initial free-set size for the reduced problems.
    #[arg(long)]
    nfree: Option<usize>,
    /// Parameter preset applied before explicit flags.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Skip the exact reduced solves.
    #[arg(long)]
    no_ip: bool,
    /// Search with ADD/DEL moves only.
    #[arg(long)]
    no_swap: bool,
    /// Worker threads for restarts; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

impl ParamFlags {
    fn to_params(&self) -> SearchParams {
        let mut p = SearchParams::default();
        if let Some(Preset::Dimacs) = self.preset {
            p = p.dimacs_preset();
        }
        if let Some(v) = self.restarts {
            p.n_restart = v;
        }
        if let Some(v) = self.imax {
            p.i_max = v;
        }
        if let Some(v) = self.ini {
            p.i_ni = v;
        }
        if let Some(v) = self.ipert {
            p.i_pert = v;
        }
        if let Some(v) = self.rho {
            p.rho = v;
        }
        if let Some(v) = self.tabu {
            p.n_tabu = v;
        }
        if let Some(v) = self.tmax_ip {
            p.t_max_ip = v;
        }
        if let Some(v) = self.alpha_min {
            p.alpha_min = v;
        }
        if let Some(v) = self.alpha_max {
            p.alpha_max = v;
        }
        if let Some(v) = self.beta {
            p.beta = v;
        }
        if let Some(v) = self.nfree {
            p.n_free_init = v;
        }
        p.use_ip = !self.no_ip;
        p.use_swap = !self.no_swap;
        p.threads = self.threads;
        p
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Solve {
            file,
            flags,
            json,
            trace,
        } => run_solve(&file, &flags, json.as_deref(), trace.as_deref()),
        Command::Generate {
            n,
            m,
            weight_type,
            seed,
            output,
        } => run_generate(n, m, weight_type, seed, output.as_deref()),
        Command::Bench {
            dir,
            runs,
            bks,
            csv,
            flags,
        } => run_bench(&dir, runs, bks.as_deref(), csv.as_deref(), &flags),
        Command::Oracle { file } => run_oracle(&file),
    }
}

/// Reads and parses an instance, naming it after the file stem.
fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut inst = parse_auto(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        inst.name = stem.to_string();
    }
    Ok(inst)
}

fn run_solve(
    file: &Path,
    flags: &ParamFlags,
    json: Option<&Path>,
    trace: Option<&Path>,
) -> Result<()> {
    let inst = load_instance(file)?;
    let mut params = flags.to_params();
    params.record_trace = trace.is_some();
    let mut report = hts_ds(&inst, &params, flags.seed)?;
    if let Some(path) = trace {
        let rows = report.trace.take().unwrap_or_default();
        write_trace_csv(path, &rows)?;
    }
    print_solve_summary(&report);
    if let Some(path) = json {
        fs::write(path, serde_json::to_string_pretty(&report)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn print_solve_summary(report: &RunReport) {
    println!(
        "instance {} ({} vertices, {} edges)",
        report.instance, report.n, report.m
    );
    let proof = if report.proven_optimal {
        " (proven optimal)"
    } else {
        ""
    };
    println!("best weight {}{}", report.best_weight, proof);
    let ids: Vec<String> = report.best_vertices.iter().map(usize::to_string).collect();
    println!("vertices ({}): {}", ids.len(), ids.join(" "));
    println!(
        "{} restarts in {:.3}s",
        report.restarts.len(),
        report.total_time_secs
    );
}

fn write_trace_csv(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let mut out = String::from("iteration,alpha,f,W,Nd,feasible,new_best\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.iteration,
            r.alpha,
            r.penalized_cost,
            r.weight,
            r.nondominated,
            u8::from(r.feasible),
            u8::from(r.new_best)
        )
        .expect("writing to a String cannot fail");
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

fn run_generate(
    n: usize,
    m: usize,
    weight_type: WeightType,
    seed: u64,
    output: Option<&Path>,
) -> Result<()> {
    let kind = match weight_type {
        WeightType::T1 => WeightKind::T1,
        WeightType::T2 => WeightKind::T2,
    };
    let inst = generate_instance(n, m, kind, seed)?;
    let text = to_native(&inst);
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {} ({} vertices, {} edges)", path.display(), n, m);
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run_oracle(file: &Path) -> Result<()> {
    let inst = load_instance(file)?;
    let (weight, members) = brute_force_optimum(&inst.graph)?;
    println!("optimal weight {weight}");
    let ids: Vec<String> = members.iter().map(|v| (v + 1).to_string()).collect();
    println!("vertices ({}): {}", ids.len(), ids.join(" "));
    Ok(())
}

fn fnv1a(s: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn run_bench(
    dir: &Path,
    runs: usize,
    bks: Option<&Path>,
    csv: Option<&Path>,
    flags: &ParamFlags,
) -> Result<()> {
    anyhow::ensure!(runs >= 1, "at least one run per instance is required");
    let bks_map: std::collections::HashMap<String, u64> = match bks {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => Default::default(),
    };
    let params = flags.to_params();

    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    anyhow::ensure!(!files.is_empty(), "no instance files in {}", dir.display());

    let mut results = Vec::new();
    for path in &files {
        let inst = match load_instance(path) {
            Ok(inst) => inst,
            Err(err) => {
                eprintln!("warning: skipping {}: {err:#}", path.display());
                continue;
            }
        };
        let instance_stream = derive_seed(flags.seed, fnv1a(&inst.name));
        let mut weights = Vec::with_capacity(runs);
        let mut time_sum = 0.0;
        for run in 0..runs {
            let report = hts_ds(&inst, &params, derive_seed(instance_stream, run as u64))?;
            weights.push(report.best_weight);
            time_sum += report.total_time_secs;
        }
        println!(
            "{}: n={} m={} best={} runs={}",
            inst.name,
            inst.graph.n(),
            inst.graph.m(),
            weights.iter().min().unwrap(),
            runs
        );
        results.push(InstanceRuns {
            bks: bks_map.get(&inst.name).copied(),
            name: inst.name,
            n: inst.graph.n(),
            m: inst.graph.m(),
            run_weights: weights,
            time_secs: time_sum / runs as f64,
        });
    }

    let (rows, warnings) = aggregate_groups(&results);
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    print_group_table(&rows);
    if let Some(path) = csv {
        fs::write(path, group_csv(&rows)).with_context(|| format!("writing {}", path.display()))?;
    }

    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.n as f64, r.time_secs))
        .filter(|&(x, y)| x > 0.0 && y > 0.0)
        .collect();
    if let Ok((c, e)) = fit_power_law(&points) {
        println!("time scaling: t ≈ {c:.3e} · n^{e:.2}");
    }
    Ok(())
}

fn format_gap(gap: Option<f64>) -> String {
    gap.map_or_else(|| "-".to_string(), |g| format!("{g:.3}"))
}

fn print_group_table(rows: &[GroupRow]) {
    println!(
        "{:>6} {:>8} {:>5} {:>12} {:>12} {:>9} {:>9} {:>9}",
        "n", "m", "inst", "best", "avg", "time(s)", "gapB%", "gapA%"
    );
    for r in rows {
        println!(
            "{:>6} {:>8} {:>5} {:>12.2} {:>12.2} {:>9.3} {:>9} {:>9}",
            r.n,
            r.m,
            r.instances,
            r.best,
            r.avg,
            r.time_secs,
            format_gap(r.gap_best),
            format_gap(r.gap_avg)
        );
    }
}

fn group_csv(rows: &[GroupRow]) -> String {
    let mut out = String::from("n,m,instances,best,avg,time_secs,gap_best,gap_avg\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n,
            r.m,
            r.instances,
            r.best,
            r.avg,
            r.time_secs,
            format_gap(r.gap_best),
            format_gap(r.gap_avg)
        )
        .expect("writing to a String cannot fail");
    }
    out
}
