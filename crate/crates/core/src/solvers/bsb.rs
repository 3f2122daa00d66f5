//! Ballistic simulated bifurcation on the spin relaxation of a HUBO.
//!
//! `ẏ = −(a0 − a(t)) x − c0 ∂E/∂x`, `ẋ = a0 y`, integrated by symplectic
//! Euler with inelastic walls at `|x| = 1`; `a(t)` ramps linearly from 0 to
//! `a0` over the run.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_steps, CompiledPolynomial, SolveResult, SolverError};
use crate::hubo::{Domain, Polynomial};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum C0 {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BsbConfig {
    pub a0: f64,
    pub c0: C0,
    pub dt: f64,
    pub steps: usize,
}

impl Default for BsbConfig {
    fn default() -> Self {
        Self { a0: 1.0, c0: C0::Auto, dt: 0.5, steps: 100 }
    }
}

impl BsbConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        check_steps(self.steps)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SolverError::BadConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.a0 > 0.0 && self.a0.is_finite()) {
            return Err(SolverError::BadConfig(format!("a0 must be positive, got {}", self.a0)));
        }
        if let C0::Fixed(c) = self.c0 {
            if !(c > 0.0 && c.is_finite()) {
                return Err(SolverError::BadConfig(format!("c0 must be positive, got {c}")));
            }
        }
        Ok(())
    }

    /// `a(t)` at the start of step `k`.
    pub fn ramp(&self, k: usize) -> f64 {
        if self.steps <= 1 {
            return self.a0;
        }
        self.a0 * k.min(self.steps - 1) as f64 / (self.steps - 1) as f64
    }
}

/// `a0 / RMS(‖∇E‖∞)` over 64 uniform points in `[−1, 1]^N`.
pub fn auto_c0(poly: &CompiledPolynomial, a0: f64) -> f64 {
    let n = poly.num_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5b5b);
    let mut x = vec![0.0; n];
    let mut g = vec![0.0; n];
    let mut sum = 0.0;
    for _ in 0..64 {
        x.iter_mut().for_each(|v| *v = rng.gen_range(-1.0..=1.0));
        poly.gradient(&x, &mut g);
        let inf = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        sum += inf * inf;
    }
    let rms = (sum / 64.0).sqrt();
    if rms > 0.0 {
        a0 / rms
    } else {
        a0
    }
}

/// Integrator state, exposed step by step.
#[derive(Debug, Clone)]
pub struct BsbStepper<'a> {
    poly: &'a CompiledPolynomial,
    cfg: BsbConfig,
    c0: f64,
    x: Vec<f64>,
    y: Vec<f64>,
    grad: Vec<f64>,
    clamped: Vec<bool>,
    step: usize,
}

impl<'a> BsbStepper<'a> {
    pub fn new(poly: &'a CompiledPolynomial, cfg: BsbConfig, rng: &mut impl Rng) -> Result<Self, SolverError> {
        if poly.domain() != Domain::Spin {
            return Err(SolverError::NotSpin);
        }
        cfg.validate()?;
        let c0 = match cfg.c0 {
            C0::Auto => auto_c0(poly, cfg.a0),
            C0::Fixed(c) => c,
        };
        let n = poly.num_vars();
        let x = (0..n).map(|_| rng.gen_range(-0.1..0.1)).collect();
        let y = (0..n).map(|_| rng.gen_range(-0.1..0.1)).collect();
        Ok(Self { poly, cfg, c0, x, y, grad: vec![0.0; n], clamped: vec![false; n], step: 0 })
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn positions(&self) -> &[f64] {
        &self.x
    }

    pub fn momenta(&self) -> &[f64] {
        &self.y
    }

    /// Walls hit during the last step.
    pub fn clamped(&self) -> &[bool] {
        &self.clamped
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn step(&mut self) -> Result<(), SolverError> {
        let a = self.cfg.ramp(self.step);
        let (a0, dt, c0) = (self.cfg.a0, self.cfg.dt, self.c0);
        self.poly.gradient(&self.x, &mut self.grad);
        for i in 0..self.x.len() {
            self.y[i] += dt * (-(a0 - a) * self.x[i] - c0 * self.grad[i]);
            self.x[i] += dt * a0 * self.y[i];
            self.clamped[i] = self.x[i].abs() > 1.0;
            if self.clamped[i] {
                self.x[i] = self.x[i].signum();
                self.y[i] = 0.0;
            }
        }
        self.step += 1;
        if self.x.iter().chain(&self.y).any(|v| !v.is_finite()) {
            return Err(SolverError::Diverged { step: self.step, dt, a0, c0 });
        }
        Ok(())
    }

    /// `sign(x)` with ties to +1.
    pub fn readout(&self) -> Vec<i8> {
        self.x.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect()
    }
}

pub fn solve_bsb(objective: &Polynomial, cfg: &BsbConfig, seed: u64) -> Result<SolveResult, SolverError> {
    if objective.domain() != Domain::Spin {
        return Err(SolverError::NotSpin);
    }
    solve_bsb_compiled(&CompiledPolynomial::new(objective), cfg, seed)
}

pub fn solve_bsb_compiled(poly: &CompiledPolynomial, cfg: &BsbConfig, seed: u64) -> Result<SolveResult, SolverError> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stepper = BsbStepper::new(poly, *cfg, &mut rng)?;
    let mut best_energy = f64::INFINITY;
    let mut best = Vec::new();
    let mut trace = Vec::with_capacity(cfg.steps);
    let mut step_times = Vec::with_capacity(cfg.steps);
    for _ in 0..cfg.steps {
        stepper.step()?;
        let s = stepper.readout();
        let e = poly.evaluate_discrete(&s);
        if e < best_energy {
            best_energy = e;
            best = s;
        }
        trace.push(-best_energy);
        step_times.push(start.elapsed().as_secs_f64());
    }
    Ok(SolveResult {
        solver: "bsb".into(),
        best_assignment: best,
        best_grid: Vec::new(),
        best_volume: -best_energy,
        trace,
        step_times,
        wall_time: start.elapsed().as_secs_f64(),
        seed,
    })
}
