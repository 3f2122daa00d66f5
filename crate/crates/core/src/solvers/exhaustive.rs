use std::time::Instant;

use rayon::prelude::*;

use super::{CompiledPolynomial, SolveResult, SolverError};
use crate::encoding::AngleGrid;
use crate::geom::VolumeEvaluator;
use crate::hubo::{Domain, Polynomial};
use crate::molgraph::{FragmentDecomposition, Molecule};

pub const DEFAULT_BRUTE_CAP: u128 = 1 << 20;

const CHUNK: usize = 4096;

fn digits(mut idx: usize, d: usize, m: usize) -> Vec<usize> {
    (0..m)
        .map(|_| {
            let k = idx % d;
            idx /= d;
            k
        })
        .collect()
}

/// Exact grid maximizer of the molecular volume. Torsion 0 is the least
/// significant mixed-radix digit; ties go to the lowest index.
pub fn brute_force(mol: &Molecule, fd: &FragmentDecomposition, grid: AngleGrid) -> Result<SolveResult, SolverError> {
    brute_force_with_cap(mol, fd, grid, DEFAULT_BRUTE_CAP)
}

pub fn brute_force_with_cap(
    mol: &Molecule,
    fd: &FragmentDecomposition,
    grid: AngleGrid,
    cap: u128,
) -> Result<SolveResult, SolverError> {
    let start = Instant::now();
    let (d, m) = (grid.size(), fd.torsion_count());
    let size = (d as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(SolverError::CapExceeded { size, cap });
    }
    let eval = VolumeEvaluator::new(mol, fd);
    let total = size as usize;
    let chunk_best = |c: usize| -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for idx in c * CHUNK..((c + 1) * CHUNK).min(total) {
            let angles: Vec<f64> = digits(idx, d, m).into_iter().map(|k| grid.value(k)).collect();
            let v = eval.volume(&angles);
            if v > best.0 {
                best = (v, idx);
            }
        }
        best
    };
    let chunks = total.div_ceil(CHUNK);
    let (best_volume, best_idx) = (0..chunks).into_par_iter().map(chunk_best).collect::<Vec<_>>().into_iter().fold(
        (f64::NEG_INFINITY, usize::MAX),
        |acc, b| {
            if b.0 > acc.0 {
                b
            } else {
                acc
            }
        },
    );
    let wall = start.elapsed().as_secs_f64();
    Ok(SolveResult {
        solver: "brute".into(),
        best_assignment: Vec::new(),
        best_grid: digits(best_idx, d, m),
        best_volume,
        trace: vec![best_volume],
        step_times: vec![wall],
        wall_time: wall,
        seed: 0,
    })
}

/// Minimum of a polynomial over its whole domain, `(energy, assignment)`.
/// Ties go to the lowest mask (bit `j` set ⇔ variable `j` is −1 / 1).
pub fn exhaustive_hubo(p: &Polynomial) -> Result<(f64, Vec<i8>), SolverError> {
    let n = p.num_vars();
    if n > 26 {
        return Err(SolverError::CapExceeded { size: 1u128 << n, cap: 1 << 26 });
    }
    let c = CompiledPolynomial::new(p);
    let set = if p.domain() == Domain::Spin { -1 } else { 1 };
    let unset = if p.domain() == Domain::Spin { 1 } else { 0 };
    let assign = |mask: usize| -> Vec<i8> { (0..n).map(|j| if mask >> j & 1 == 1 { set } else { unset }).collect() };
    let chunks = (1usize << n).div_ceil(CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .map(|ch| {
            let mut best = (f64::INFINITY, usize::MAX);
            for mask in ch * CHUNK..((ch + 1) * CHUNK).min(1 << n) {
                let e = c.evaluate_discrete(&assign(mask));
                if e < best.0 {
                    best = (e, mask);
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((f64::INFINITY, usize::MAX), |acc, b| if b.0 < acc.0 { b } else { acc });
    Ok((best.0, assign(best.1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_small() {
        let p = Polynomial::from_terms(Domain::Spin, 3, [(vec![0, 1], 1.0), (vec![2], 0.5)]);
        let (e, s) = exhaustive_hubo(&p).unwrap();
        assert_eq!(e, -1.5);
        assert_eq!(s, vec![-1, 1, -1]);
    }

    #[test]
    fn digits_mixed_radix() {
        assert_eq!(digits(0, 4, 3), vec![0, 0, 0]);
        assert_eq!(digits(6, 4, 2), vec![2, 1]);
    }
}
