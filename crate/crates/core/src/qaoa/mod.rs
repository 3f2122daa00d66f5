//! Single-layer QAOA on a statevector, for spin-domain objectives that fit
//! in memory (≤ 24 qubits).
//!
//! Basis state `z` has qubit `j` at bit `j`; bit 0 is spin +1.

mod circuit;
mod landscape;
mod sample;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

pub use circuit::{
    apply_gate, apply_gates, cost_layer_circuit, decompose_term, parse_gate_list, write_gate_list, Gate, GateList,
};
pub use landscape::{basin_fraction, landscape, optimize, optimize_from_grid, Landscape, OptimizeResult};
pub use sample::{sample, Histogram};

use crate::hubo::{Domain, Monomial, Polynomial};

pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QaoaError {
    #[error("{0} qubits exceeds the simulator limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("QAOA needs a spin-domain polynomial")]
    NotSpin,
    #[error("cannot rescale an all-zero polynomial")]
    ZeroPolynomial,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("landscape resolution must be at least 2, got {0}")]
    BadResolution(usize),
    #[error("shots must be at least 1")]
    NoShots,
    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("CNOT control and target are both {0}")]
    SameQubit(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// In-place Walsh–Hadamard butterfly.
fn walsh_hadamard(v: &mut [f64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

fn mask_of(m: &Monomial) -> usize {
    m.vars().iter().fold(0, |acc, &v| acc | 1 << v)
}

/// Energy of every basis state.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalHamiltonian {
    n_qubits: usize,
    energies: Vec<f64>,
}

impl DiagonalHamiltonian {
    pub fn from_energies(energies: Vec<f64>) -> Result<Self, QaoaError> {
        let len = energies.len();
        if !len.is_power_of_two() {
            return Err(QaoaError::DimensionMismatch(len, len.next_power_of_two()));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(QaoaError::TooManyQubits(n_qubits));
        }
        Ok(Self { n_qubits, energies })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Lowest-index basis state of minimum energy.
    pub fn ground_state(&self) -> usize {
        let min = self.ground_energy();
        self.energies.iter().position(|&e| e == min).unwrap_or(0)
    }

    /// Spin polynomial coefficients recovered by the inverse transform.
    pub fn to_polynomial(&self) -> Polynomial {
        let mut c = self.energies.clone();
        walsh_hadamard(&mut c);
        let scale = 1.0 / c.len() as f64;
        let mut p = Polynomial::zero(Domain::Spin, self.n_qubits);
        for (mask, v) in c.into_iter().enumerate() {
            let vars = (0..self.n_qubits as u32).filter(|j| mask >> j & 1 == 1);
            p.add_term(Monomial::from_vars(Domain::Spin, vars), v * scale);
        }
        p
    }
}

pub fn build_diagonal(p: &Polynomial) -> Result<DiagonalHamiltonian, QaoaError> {
    if p.domain() != Domain::Spin {
        return Err(QaoaError::NotSpin);
    }
    let n = p.num_vars();
    if n > MAX_QUBITS {
        return Err(QaoaError::TooManyQubits(n));
    }
    let mut energies = vec![0.0; 1 << n];
    for (m, c) in p.terms() {
        energies[mask_of(m)] += c;
    }
    walsh_hadamard(&mut energies);
    Ok(DiagonalHamiltonian { n_qubits: n, energies })
}

fn nonconstant_rms(p: &Polynomial) -> Result<f64, QaoaError> {
    let cs: Vec<f64> = p.terms().filter(|(m, _)| !m.is_constant()).map(|(_, c)| c).collect();
    if cs.is_empty() {
        return Err(QaoaError::ZeroPolynomial);
    }
    Ok((cs.iter().map(|c| c * c).sum::<f64>() / cs.len() as f64).sqrt())
}

/// Divides every coefficient by the RMS of the non-constant ones.
pub fn rescale(p: &Polynomial) -> Result<Polynomial, QaoaError> {
    Ok(p.scale(1.0 / nonconstant_rms(p)?))
}

/// [`rescale`] on the Hamiltonian's recovered polynomial; coefficients below
/// `1e-12 · max|c|` count as absent.
pub fn rescale_hamiltonian(h: &DiagonalHamiltonian) -> Result<DiagonalHamiltonian, QaoaError> {
    let mut p = h.to_polynomial();
    p.cleanup_relative(1e-12);
    let rms = nonconstant_rms(&p)?;
    let energies = h.energies.iter().map(|e| e / rms).collect();
    Ok(DiagonalHamiltonian { n_qubits: h.n_qubits, energies })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QaoaParams {
    pub gamma: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    amps: Vec<Complex64>,
}

impl Statevector {
    pub fn uniform(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self { amps: vec![Complex64::new(1.0 / (dim as f64).sqrt(), 0.0); dim] }
    }

    pub fn basis(n_qubits: usize, z: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[z] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(mut amps: Vec<Complex64>) -> Result<Self, QaoaError> {
        if !amps.len().is_power_of_two() {
            return Err(QaoaError::DimensionMismatch(amps.len(), amps.len().next_power_of_two()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `e^{−iγE(z)}` on every amplitude.
    pub fn apply_cost(&mut self, h: &DiagonalHamiltonian, gamma: f64) {
        self.amps
            .par_iter_mut()
            .with_min_len(4096)
            .zip(h.energies.par_iter().with_min_len(4096))
            .for_each(|(a, &e)| *a *= Complex64::from_polar(1.0, -gamma * e));
    }

    /// `RX(2β)` on every qubit.
    pub fn apply_mixer(&mut self, beta: f64) {
        let (c, s) = (beta.cos(), beta.sin());
        let ms = Complex64::new(0.0, -s);
        for q in 0..self.n_qubits() {
            let bit = 1usize << q;
            for block in self.amps.chunks_mut(2 * bit) {
                let (lo, hi) = block.split_at_mut(bit);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x * c + y * ms;
                    *b = x * ms + y * c;
                }
            }
        }
    }
}

/// Uniform superposition, cost layer, mixer layer.
pub fn run_qaoa(h: &DiagonalHamiltonian, params: QaoaParams) -> Statevector {
    let mut sv = Statevector::uniform(h.n_qubits);
    sv.apply_cost(h, params.gamma);
    sv.apply_mixer(params.beta);
    sv
}

pub fn expectation(h: &DiagonalHamiltonian, sv: &Statevector) -> Result<f64, QaoaError> {
    if sv.amps.len() != h.energies.len() {
        return Err(QaoaError::DimensionMismatch(sv.amps.len(), h.energies.len()));
    }
    Ok(sv.amps.iter().zip(&h.energies).map(|(a, e)| a.norm_sqr() * e).sum())
}
