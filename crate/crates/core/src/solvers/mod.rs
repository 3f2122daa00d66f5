//! Optimizers over the HUBO objective and the grid-search baselines.

mod bsb;
mod compiled;
mod exhaustive;
mod greedy;
mod sa;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bsb::{auto_c0, solve_bsb, solve_bsb_compiled, BsbConfig, BsbStepper, C0};
pub use compiled::CompiledPolynomial;
pub use exhaustive::{brute_force, brute_force_with_cap, exhaustive_hubo, DEFAULT_BRUTE_CAP};
pub use greedy::{betweenness_order, greedy_geodock};
pub use sa::{calibrate_t0, run_sa, solve_sa, solve_sa_compiled, MoveRecord, SaConfig, SaRun};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("bSB needs a spin-domain objective")]
    NotSpin,
    #[error("invalid one-hot registry: {0}")]
    InvalidRegistry(String),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("bSB diverged at step {step} (dt = {dt}, a0 = {a0}, c0 = {c0})")]
    Diverged { step: usize, dt: f64, a0: f64, c0: f64 },
    #[error("search space {size} exceeds the cap {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("molecule has no rotatable bonds")]
    NoTorsions,
}

/// Outcome of one solver run. Volumes are in Å²; the objective is `−volume`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub solver: String,
    /// Binary variables, empty for the geometric solvers.
    pub best_assignment: Vec<i8>,
    /// Grid index per torsion, when known.
    pub best_grid: Vec<usize>,
    pub best_volume: f64,
    /// Best-so-far volume after each step.
    pub trace: Vec<f64>,
    /// Cumulative seconds at the end of each step.
    pub step_times: Vec<f64>,
    pub wall_time: f64,
    pub seed: u64,
}

impl SolveResult {
    /// Volume at step `w` (1-based), clamped to the last step.
    pub fn volume_at(&self, w: usize) -> f64 {
        if self.trace.is_empty() {
            return self.best_volume;
        }
        self.trace[w.clamp(1, self.trace.len()) - 1]
    }

    /// Seconds spent through step `w` (1-based), clamped.
    pub fn time_at(&self, w: usize) -> f64 {
        if self.step_times.is_empty() {
            return self.wall_time;
        }
        self.step_times[w.clamp(1, self.step_times.len()) - 1]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn trace_csv(&self) -> String {
        let mut out = String::from("step,best_volume,seconds\n");
        for (i, v) in self.trace.iter().enumerate() {
            let t = self.step_times.get(i).copied().unwrap_or(f64::NAN);
            let _ = writeln!(out, "{},{v},{t}", i + 1);
        }
        out
    }
}

fn check_steps(steps: usize) -> Result<(), SolverError> {
    if steps == 0 {
        return Err(SolverError::BadConfig("steps must be at least 1".into()));
    }
    Ok(())
}
