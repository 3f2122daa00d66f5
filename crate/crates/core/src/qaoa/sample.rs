use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{QaoaError, Statevector};

/// Measurement counts keyed by basis state.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub n_qubits: usize,
    pub shots: u64,
    pub counts: BTreeMap<usize, u64>,
}

impl Histogram {
    /// Most frequent outcome, lowest index on ties.
    pub fn mode(&self) -> Option<usize> {
        let max = *self.counts.values().max()?;
        self.counts.iter().find(|(_, &c)| c == max).map(|(&z, _)| z)
    }

    pub fn probability(&self, z: usize) -> f64 {
        self.counts.get(&z).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    /// Qubit 0 first.
    pub fn bitstring(&self, z: usize) -> String {
        (0..self.n_qubits).map(|q| if z >> q & 1 == 1 { '1' } else { '0' }).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bitstring,probability,counts\n");
        for (&z, &c) in &self.counts {
            let _ = writeln!(out, "{},{},{c}", self.bitstring(z), c as f64 / self.shots as f64);
        }
        out
    }
}

/// Multinomial draw from `|amp|²` by inverse-CDF lookup.
pub fn sample(sv: &Statevector, shots: u64, seed: u64) -> Result<Histogram, QaoaError> {
    if shots == 0 {
        return Err(QaoaError::NoShots);
    }
    let mut cdf = Vec::with_capacity(sv.amplitudes().len());
    let mut acc = 0.0;
    for a in sv.amplitudes() {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    let last = cdf.len() - 1;
    for _ in 0..shots {
        let u = rng.gen::<f64>() * acc;
        let z = cdf.partition_point(|&c| c <= u).min(last);
        *counts.entry(z).or_insert(0) += 1;
    }
    Ok(Histogram { n_qubits: sv.n_qubits(), shots, counts })
}
