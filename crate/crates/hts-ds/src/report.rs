//! Benchmark reporting: optimality gaps against reference values,
//! aggregation of runs into per-size rows, and power-law scaling fits.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("the reference weight must be positive, got {value}")]
    NonPositiveReference { value: f64 },
    #[error("a power-law fit needs at least two points, got {count}")]
    TooFewPoints { count: usize },
    #[error("power-law fits need positive coordinates, got ({x}, {y})")]
    NonPositivePoint { x: f64, y: f64 },
    #[error("all x values coincide; the fit is degenerate")]
    DegenerateFit,
}

/// Percentage gap of a solution value against a best-known value:
/// `100 · (z − z_bks) / z_bks`. Negative when `z` improves on the
/// reference.
pub fn gap_percent(z: f64, z_bks: f64) -> Result<f64, ReportError> {
    if !(z_bks > 0.0) {
        return Err(ReportError::NonPositiveReference { value: z_bks });
    }
    Ok(100.0 * (z - z_bks) / z_bks)
}

/// One benchmark instance with the weights its independent runs returned.
#[derive(Debug, Clone)]
pub struct InstanceRuns {
    pub name: String,
    pub n: usize,
    pub m: usize,
    /// Best weight found by each run.
    pub run_weights: Vec<u64>,
    /// Mean wall-clock seconds per run.
    pub time_secs: f64,
    /// Best-known weight, when one exists.
    pub bks: Option<u64>,
}

/// Aggregated results for all instances sharing an (n, m) size.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRow {
    pub n: usize,
    pub m: usize,
    pub instances: usize,
    /// Mean over instances of the best weight across runs.
    pub best: f64,
    /// Mean over instances of the mean weight across runs.
    pub avg: f64,
    /// Mean over instances of the mean run time.
    pub time_secs: f64,
    /// Mean gap of `best` against the references; present only when every
    /// instance in the group has one.
    pub gap_best: Option<f64>,
    /// Mean gap of `avg` against the references, same availability.
    pub gap_avg: Option<f64>,
}

/// Groups instances by (n, m) and averages their results. Returns the rows
/// in ascending size order plus human-readable warnings for data that had
/// to be skipped (instances without runs, groups with partial references).
pub fn aggregate_groups(runs: &[InstanceRuns]) -> (Vec<GroupRow>, Vec<String>) {
    let mut groups: BTreeMap<(usize, usize), Vec<&InstanceRuns>> = BTreeMap::new();
    for r in runs {
        groups.entry((r.n, r.m)).or_default().push(r);
    }
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for ((n, m), members) in groups {
        let mut count = 0usize;
        let mut with_bks = 0usize;
        let (mut best_sum, mut avg_sum, mut time_sum) = (0.0, 0.0, 0.0);
        let (mut gap_best_sum, mut gap_avg_sum) = (0.0, 0.0);
        for inst in &members {
            if inst.run_weights.is_empty() {
                warnings.push(format!("{}: no runs recorded, skipped", inst.name));
                continue;
            }
            count += 1;
            let best = *inst.run_weights.iter().min().unwrap() as f64;
            let avg = inst.run_weights.iter().sum::<u64>() as f64
                / inst.run_weights.len() as f64;
            best_sum += best;
            avg_sum += avg;
            time_sum += inst.time_secs;
            match inst.bks {
                Some(b) if b > 0 => {
                    with_bks += 1;
                    gap_best_sum += gap_percent(best, b as f64).unwrap();
                    gap_avg_sum += gap_percent(avg, b as f64).unwrap();
                }
                Some(b) => {
                    warnings.push(format!("{}: nonpositive reference {b} ignored", inst.name));
                }
                None => {}
            }
        }
        if count == 0 {
            continue;
        }
        let complete = with_bks == count;
        if !complete && with_bks > 0 {
            warnings.push(format!(
                "group ({n}, {m}): references cover {with_bks} of {count} instances; gaps omitted"
            ));
        }
        let scale = count as f64;
        rows.push(GroupRow {
            n,
            m,
            instances: count,
            best: best_sum / scale,
            avg: avg_sum / scale,
            time_secs: time_sum / scale,
            gap_best: complete.then(|| gap_best_sum / scale),
            gap_avg: complete.then(|| gap_avg_sum / scale),
        });
    }
    (rows, warnings)
}

/// Least-squares fit of `y = c·x^e` on ln–ln axes; returns `(c, e)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<(f64, f64), ReportError> {
    if points.len() < 2 {
        return Err(ReportError::TooFewPoints { count: points.len() });
    }
    for &(x, y) in points {
        if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(ReportError::NonPositivePoint { x, y });
        }
    }
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let denom = n * sxx - sx * sx;
    if denom.abs() <= 1e-9 * (n * sxx.abs()).max(1.0) {
        return Err(ReportError::DegenerateFit);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    Ok((intercept.exp(), slope))
}
