//! Simulated annealing over valid one-hot states.
//!
//! A move reassigns one torsion's hot bit, so every visited state satisfies
//! the constraint and the penalty never contributes. One step is a sweep of
//! `moves_per_step` proposals (default: one per torsion).

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_steps, CompiledPolynomial, SolveResult, SolverError};
use crate::encoding::EncodingKind;
use crate::hubo::{Domain, Polynomial, VariableRegistry};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaConfig {
    pub initial_acceptance: f64,
    pub cooling_factor: f64,
    pub steps: usize,
    pub moves_per_step: Option<usize>,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self { initial_acceptance: 0.8, cooling_factor: 0.95, steps: 100, moves_per_step: None }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        check_steps(self.steps)?;
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return Err(SolverError::BadConfig(format!(
                "cooling factor must be in (0, 1), got {}",
                self.cooling_factor
            )));
        }
        if !(self.initial_acceptance > 0.0 && self.initial_acceptance < 1.0) {
            return Err(SolverError::BadConfig(format!(
                "initial acceptance must be in (0, 1), got {}",
                self.initial_acceptance
            )));
        }
        if self.moves_per_step == Some(0) {
            return Err(SolverError::BadConfig("moves per step must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoveRecord {
    pub step: usize,
    pub torsion: usize,
    pub from: usize,
    pub to: usize,
    pub delta: f64,
    pub temperature: f64,
    pub accepted: bool,
}

/// A run with its per-move log and the current (not best) energy per step.
#[derive(Debug, Clone)]
pub struct SaRun {
    pub result: SolveResult,
    pub moves: Vec<MoveRecord>,
    pub energies: Vec<f64>,
    pub t0: f64,
}

struct State<'a> {
    poly: &'a CompiledPolynomial,
    d: usize,
    hot: Vec<usize>,
}

impl State<'_> {
    fn is_hot(&self, v: u32) -> bool {
        let v = v as usize;
        self.hot[v / self.d] == v % self.d
    }

    fn active_sum(&self, var: usize) -> f64 {
        self.poly
            .terms_with(var)
            .iter()
            .filter(|&&t| self.poly.term_vars(t as usize).iter().all(|&w| self.is_hot(w)))
            .map(|&t| self.poly.coefficient_of(t as usize))
            .sum()
    }

    /// Applies the move and returns `ΔE`.
    fn apply(&mut self, torsion: usize, to: usize) -> f64 {
        let from = self.hot[torsion];
        let removed = self.active_sum(torsion * self.d + from);
        self.hot[torsion] = to;
        self.active_sum(torsion * self.d + to) - removed
    }

    fn bits(&self) -> Vec<i8> {
        let mut b = vec![0; self.hot.len() * self.d];
        for (i, &k) in self.hot.iter().enumerate() {
            b[i * self.d + k] = 1;
        }
        b
    }

    fn random_move(&self, rng: &mut impl Rng) -> (usize, usize) {
        let i = rng.gen_range(0..self.hot.len());
        let mut k = rng.gen_range(0..self.d - 1);
        if k >= self.hot[i] {
            k += 1;
        }
        (i, k)
    }
}

fn check_registry(poly: &CompiledPolynomial, registry: &VariableRegistry) -> Result<(), SolverError> {
    if registry.encoding != EncodingKind::OneHot || poly.domain() != Domain::Boolean {
        return Err(SolverError::InvalidRegistry("simulated annealing needs a one-hot objective".into()));
    }
    if registry.torsions == 0 {
        return Err(SolverError::NoTorsions);
    }
    if registry.num_vars() != poly.num_vars() {
        return Err(SolverError::InvalidRegistry(format!(
            "registry has {} variables, objective has {}",
            registry.num_vars(),
            poly.num_vars()
        )));
    }
    Ok(())
}

/// `mean(ΔE⁺) / ln(1/p0)` over 100 sampled uphill moves.
pub fn calibrate_t0(
    poly: &CompiledPolynomial,
    registry: &VariableRegistry,
    initial_acceptance: f64,
    rng: &mut impl Rng,
) -> Result<f64, SolverError> {
    check_registry(poly, registry)?;
    let d = registry.bits_per_torsion;
    let m = registry.torsions;
    let mut st = State { poly, d, hot: vec![0; m] };
    let mut uphill = Vec::with_capacity(100);
    for _ in 0..100 * 50 {
        if uphill.len() == 100 {
            break;
        }
        st.hot.iter_mut().for_each(|h| *h = rng.gen_range(0..d));
        let (i, k) = st.random_move(rng);
        let delta = st.apply(i, k);
        if delta > 0.0 {
            uphill.push(delta);
        }
    }
    if uphill.is_empty() {
        return Ok(1.0);
    }
    let mean = uphill.iter().sum::<f64>() / uphill.len() as f64;
    Ok(mean / (1.0 / initial_acceptance).ln())
}

pub fn solve_sa(
    objective: &Polynomial,
    registry: &VariableRegistry,
    cfg: &SaConfig,
    seed: u64,
) -> Result<SolveResult, SolverError> {
    Ok(run_sa(&CompiledPolynomial::new(objective), registry, cfg, seed, false)?.result)
}

pub fn solve_sa_compiled(
    poly: &CompiledPolynomial,
    registry: &VariableRegistry,
    cfg: &SaConfig,
    seed: u64,
) -> Result<SolveResult, SolverError> {
    Ok(run_sa(poly, registry, cfg, seed, false)?.result)
}

/// Full run; `record` keeps every proposal in [`SaRun::moves`].
pub fn run_sa(
    poly: &CompiledPolynomial,
    registry: &VariableRegistry,
    cfg: &SaConfig,
    seed: u64,
    record: bool,
) -> Result<SaRun, SolverError> {
    cfg.validate()?;
    check_registry(poly, registry)?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t0 = calibrate_t0(poly, registry, cfg.initial_acceptance, &mut rng)?;
    let d = registry.bits_per_torsion;
    let m = registry.torsions;
    let mut st = State { poly, d, hot: (0..m).map(|_| rng.gen_range(0..d)).collect() };
    let mut energy = poly.evaluate_discrete(&st.bits());
    let mut best_energy = energy;
    let mut best_hot = st.hot.clone();
    let moves_per_step = cfg.moves_per_step.unwrap_or(m);
    let mut temperature = t0;
    let mut trace = Vec::with_capacity(cfg.steps);
    let mut step_times = Vec::with_capacity(cfg.steps);
    let mut energies = Vec::with_capacity(cfg.steps);
    let mut moves = Vec::new();
    for step in 0..cfg.steps {
        for _ in 0..moves_per_step {
            let (i, to) = st.random_move(&mut rng);
            let from = st.hot[i];
            let delta = st.apply(i, to);
            let accepted = delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp();
            if accepted {
                energy += delta;
                if energy < best_energy {
                    best_energy = energy;
                    best_hot.clone_from(&st.hot);
                }
            } else {
                st.hot[i] = from;
            }
            if record {
                moves.push(MoveRecord { step, torsion: i, from, to, delta, temperature, accepted });
            }
        }
        trace.push(-best_energy);
        energies.push(energy);
        step_times.push(start.elapsed().as_secs_f64());
        temperature *= cfg.cooling_factor;
    }
    st.hot = best_hot;
    let best_assignment = st.bits();
    // re-evaluate to shed accumulated rounding from the running sum
    let best_volume = -poly.evaluate_discrete(&best_assignment);
    Ok(SaRun {
        result: SolveResult {
            solver: "sa".into(),
            best_assignment,
            best_grid: st.hot,
            best_volume,
            trace,
            step_times,
            wall_time: start.elapsed().as_secs_f64(),
            seed,
        },
        moves,
        energies,
        t0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::penalty_polynomial;

    fn toy() -> (Polynomial, VariableRegistry) {
        // two torsions, d = 4; energy favours (2, 1)
        let reg = VariableRegistry::new(EncodingKind::OneHot, 2, 4).unwrap();
        let mut p =
            Polynomial::from_terms(Domain::Boolean, 8, [(vec![2u32, 5], -3.0), (vec![0], -1.0), (vec![7], 0.5)]);
        p = p.add(&penalty_polynomial(4, 2, 10.0).unwrap()).unwrap();
        (p, reg)
    }

    #[test]
    fn finds_toy_optimum_and_stays_valid() {
        let (p, reg) = toy();
        let c = CompiledPolynomial::new(&p);
        let run = run_sa(&c, &reg, &SaConfig::default(), 7, true).unwrap();
        assert_eq!(run.result.best_grid, vec![2, 1]);
        assert_eq!(run.result.best_volume, 3.0);
        for mv in &run.moves {
            assert_ne!(mv.from, mv.to);
            if mv.delta <= 0.0 {
                assert!(mv.accepted);
            }
        }
        assert!(run.result.trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn rejects_phase_registry() {
        let (p, _) = toy();
        let reg = VariableRegistry::new(EncodingKind::Phase, 2, 16).unwrap();
        assert!(matches!(solve_sa(&p, &reg, &SaConfig::default(), 0), Err(SolverError::InvalidRegistry(_))));
    }

    #[test]
    fn config_checks() {
        assert!(SaConfig { cooling_factor: 1.0, ..SaConfig::default() }.validate().is_err());
        assert!(SaConfig { steps: 0, ..SaConfig::default() }.validate().is_err());
    }
}
