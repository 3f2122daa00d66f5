//! Benchmark metrics (volume ratio, TTT/TTS, quantiles) and the experiment
//! driver that writes plot-ready CSVs.

mod run;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

pub use run::{
    derive_seed, load_dataset, run_benchmark, write_report, BenchConfig, BenchInput, BenchReport, MoleculeSummary,
    RatioSeries, RmsdGroup, RunRecord, SolverSpec, TttRow,
};

use crate::geom::{rmsd, Conformation, GeomError};
use crate::hubo::HuboError;
use crate::molgraph::MolError;
use crate::solvers::SolverError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("reference volume must be positive, got {0}")]
    NonPositiveReference(f64),
    #[error("success probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("total time must be positive and finite, got {0}")]
    InvalidTime(f64),
    #[error("need at least one sample")]
    NoSamples,
    #[error("no usable molecules in the dataset")]
    EmptyDataset,
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{name}: {source}")]
    Mol { name: String, source: MolError },
    #[error("{name}: {source}")]
    Hubo { name: String, source: HuboError },
    #[error("{name}: {source}")]
    Solver { name: String, source: SolverError },
    #[error("invalid benchmark configuration: {0}")]
    Config(String),
}

/// `α = O / O_max`.
pub fn volume_ratio(volume: f64, reference: f64) -> Result<f64, BenchError> {
    if !(reference > 0.0) {
        return Err(BenchError::NonPositiveReference(reference));
    }
    Ok(volume / reference)
}

/// Expected time to reach the target with 99% confidence,
/// `(T/N) · ln(0.01) / ln(1 − p)`; `None` when `p = 0`.
pub fn ttt(total_time: f64, samples: usize, p: f64) -> Result<Option<f64>, BenchError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(BenchError::InvalidProbability(p));
    }
    if !(total_time > 0.0 && total_time.is_finite()) {
        return Err(BenchError::InvalidTime(total_time));
    }
    if samples == 0 {
        return Err(BenchError::NoSamples);
    }
    let per_sample = total_time / samples as f64;
    if p == 0.0 {
        return Ok(None);
    }
    if p == 1.0 {
        return Ok(Some(per_sample));
    }
    Ok(Some(per_sample * (1.0f64 - 0.99).ln() / (1.0 - p).ln()))
}

/// [`ttt`] with `p` the probability of hitting the exact optimum.
pub fn tts(total_time: f64, samples: usize, p_opt: f64) -> Result<Option<f64>, BenchError> {
    ttt(total_time, samples, p_opt)
}

/// Fraction of `volumes` at or above `target − 1e-9`.
pub fn success_probability(volumes: &[f64], target: f64) -> f64 {
    if volumes.is_empty() {
        return 0.0;
    }
    volumes.iter().filter(|&&v| v >= target - 1e-9).count() as f64 / volumes.len() as f64
}

/// Inclusive linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(quantile_sorted(&v, 0.5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxplotStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl BoxplotStats {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Self {
            min: v[0],
            q1: quantile_sorted(&v, 0.25),
            median: quantile_sorted(&v, 0.5),
            q3: quantile_sorted(&v, 0.75),
            max: v[v.len() - 1],
        })
    }
}

/// Boxplot statistics of `rmsd(a, b)` per group key.
pub fn rmsd_report<K: Ord + Clone>(
    pairs: &[(K, Conformation, Conformation)],
) -> Result<BTreeMap<K, BoxplotStats>, GeomError> {
    let mut groups: BTreeMap<K, Vec<f64>> = BTreeMap::new();
    for (k, a, b) in pairs {
        groups.entry(k.clone()).or_default().push(rmsd(a, b)?);
    }
    Ok(groups.into_iter().map(|(k, v)| (k, BoxplotStats::from_values(&v).expect("group is nonempty"))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::approx_constant)]
    fn ttt_examples() {
        assert_eq!(ttt(10.0, 20, 1.0).unwrap(), Some(0.5));
        let half = ttt(10.0, 20, 0.5).unwrap().unwrap();
        assert!((half - 0.5 * 0.01f64.ln() / 0.5f64.ln()).abs() < 1e-12);
        assert!((half - 3.3219).abs() < 1e-3);
        assert_eq!(ttt(10.0, 20, 0.0).unwrap(), None);
        assert!(ttt(10.0, 20, 1.5).is_err());
        assert!(ttt(0.0, 20, 0.5).is_err());
        assert!(ttt(1.0, 0, 0.5).is_err());
        assert_eq!(tts(10.0, 20, 1.0).unwrap(), Some(0.5));
    }

    #[test]
    fn ratio_and_success() {
        assert_eq!(volume_ratio(3.0, 3.0).unwrap(), 1.0);
        assert!(volume_ratio(1.0, 0.0).is_err());
        let v: Vec<f64> = (0..20).map(|i| if i < 7 { 1.0 } else { 0.5 }).collect();
        assert_eq!(success_probability(&v, 1.0), 0.35);
        assert_eq!(success_probability(&[1.0, 2.0], 0.5), 1.0);
        assert_eq!(success_probability(&[1.0, 2.0], 5.0), 0.0);
    }

    #[test]
    fn boxplot_hand_case() {
        let s = BoxplotStats::from_values(&[5.0, 1.0, 4.0, 2.0, 3.0]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max), (1.0, 2.0, 3.0, 4.0, 5.0));
        assert_eq!(BoxplotStats::from_values(&[0.0; 4]).unwrap().max, 0.0);
        assert!(BoxplotStats::from_values(&[]).is_none());
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), Some(2.5));
    }

    #[test]
    fn rmsd_groups() {
        use crate::geom::Vec3;
        let a = Conformation::new(vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)]);
        let b = Conformation::new(vec![Vec3::new(0.0, 3.0, 4.0), Vec3::new(1.0, 3.0, 4.0)]);
        let rep = rmsd_report(&[(1, a.clone(), a.clone()), (2, a.clone(), b), (2, a.clone(), a.clone())]).unwrap();
        assert_eq!(rep[&1].max, 0.0);
        assert_eq!((rep[&2].min, rep[&2].median, rep[&2].max), (0.0, 2.5, 5.0));
        let short = Conformation::new(vec![Vec3::zeros()]);
        assert!(rmsd_report(&[(0, a, short)]).is_err());
    }
}
