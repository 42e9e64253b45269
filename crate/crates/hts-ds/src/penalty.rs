//! Oscillating infeasibility penalty.
//!
//! The penalty factor ramps linearly from `alpha_min` toward `alpha_max` and
//! resets once it has reached or passed the ceiling, producing a sawtooth
//! that alternately favors feasible and infeasible regions of the search
//! space.

/// Step size (alpha_max − alpha_min) / (beta · n).
///
/// Panics when the range is empty or `beta`/`n` are non-positive.
pub fn step_size(alpha_min: f64, alpha_max: f64, beta: f64, n: usize) -> f64 {
    assert!(
        alpha_max > alpha_min,
        "penalty range is empty: [{alpha_min}, {alpha_max}]"
    );
    assert!(beta > 0.0, "beta must be positive");
    assert!(n >= 1, "graph order must be positive");
    (alpha_max - alpha_min) / (beta * n as f64)
}

#[derive(Debug, Clone)]
pub struct PenaltySchedule {
    alpha: f64,
    alpha_min: f64,
    alpha_max: f64,
    step: f64,
}

impl PenaltySchedule {
    /// Starts at `alpha_min` with a step derived from `beta` and the graph
    /// order `n`.
    pub fn new(alpha_min: f64, alpha_max: f64, beta: f64, n: usize) -> Self {
        let step = step_size(alpha_min, alpha_max, beta, n);
        PenaltySchedule {
            alpha: alpha_min,
            alpha_min,
            alpha_max,
            step,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// One sawtooth update, returning the new value: while alpha is still
    /// below `alpha_max` it grows by one step (a single overshoot past the
    /// ceiling is deliberate — there is no clamping); once it has reached or
    /// passed the ceiling it resets to exactly `alpha_min`.
    pub fn advance(&mut self) -> f64 {
        if self.alpha < self.alpha_max {
            self.alpha += self.step;
        } else {
            self.alpha = self.alpha_min;
        }
        self.alpha
    }
}
