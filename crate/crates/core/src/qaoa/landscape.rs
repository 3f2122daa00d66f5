use std::f64::consts::TAU;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::{expectation, run_qaoa, DiagonalHamiltonian, QaoaError, QaoaParams};

/// Expectation on an inclusive `[0, 2π]²` grid, `values[g·res + b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Landscape {
    pub resolution: usize,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub values: Vec<f64>,
}

impl Landscape {
    pub fn get(&self, g: usize, b: usize) -> f64 {
        self.values[g * self.resolution + b]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// First cell (row-major) holding the minimum.
    pub fn argmin(&self) -> QaoaParams {
        let min = self.min();
        let i = self.values.iter().position(|&v| v == min).unwrap_or(0);
        QaoaParams { gamma: self.gammas[i / self.resolution], beta: self.betas[i % self.resolution] }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("gamma,beta,expectation\n");
        for (g, &gamma) in self.gammas.iter().enumerate() {
            for (b, &beta) in self.betas.iter().enumerate() {
                let _ = writeln!(out, "{gamma},{beta},{}", self.get(g, b));
            }
        }
        out
    }
}

pub fn landscape(h: &DiagonalHamiltonian, resolution: usize) -> Result<Landscape, QaoaError> {
    if resolution < 2 {
        return Err(QaoaError::BadResolution(resolution));
    }
    let axis: Vec<f64> = (0..resolution).map(|i| TAU * i as f64 / (resolution - 1) as f64).collect();
    let values: Vec<f64> = axis
        .par_iter()
        .flat_map_iter(|&gamma| {
            axis.iter().map(move |&beta| expectation(h, &run_qaoa(h, QaoaParams { gamma, beta })).expect("same dims"))
        })
        .collect();
    Ok(Landscape { resolution, gammas: axis.clone(), betas: axis, values })
}

/// Share of grid cells with `(E − min)/(max − min) ≤ frac`.
pub fn basin_fraction(l: &Landscape, frac: f64) -> f64 {
    let (lo, hi) = (l.min(), l.max());
    if hi <= lo {
        return 1.0;
    }
    let n = l.values.iter().filter(|&&v| (v - lo) / (hi - lo) <= frac).count();
    n as f64 / l.values.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub params: QaoaParams,
    pub expectation: f64,
    /// Expectation at the start and after every accepted move.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

const MIN_STEP: f64 = 1e-4;
const MAX_EVALS: usize = 100_000;

/// Coordinate search over `(γ, β)`: try `±step` on each axis, take strict
/// improvements, halve the step when neither axis improves.
pub fn optimize(h: &DiagonalHamiltonian, start: QaoaParams, initial_step: f64) -> OptimizeResult {
    let f = |p: QaoaParams| expectation(h, &run_qaoa(h, p)).expect("same dims");
    let mut p = start;
    let mut best = f(p);
    let mut evaluations = 1;
    let mut trace = vec![best];
    let mut step = initial_step.abs().max(MIN_STEP);
    while step >= MIN_STEP && evaluations < MAX_EVALS {
        let mut improved = false;
        for axis in 0..2 {
            for dir in [1.0, -1.0] {
                let mut q = p;
                if axis == 0 {
                    q.gamma += dir * step;
                } else {
                    q.beta += dir * step;
                }
                let v = f(q);
                evaluations += 1;
                if v < best {
                    best = v;
                    p = q;
                    trace.push(v);
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    OptimizeResult { params: p, expectation: best, trace, evaluations }
}

/// Grid scan, then [`optimize`] from the best cell with the grid spacing as
/// the first step.
pub fn optimize_from_grid(
    h: &DiagonalHamiltonian,
    resolution: usize,
) -> Result<(Landscape, OptimizeResult), QaoaError> {
    let l = landscape(h, resolution)?;
    let spacing = TAU / (resolution - 1) as f64;
    let opt = optimize(h, l.argmin(), spacing);
    Ok((l, opt))
}
