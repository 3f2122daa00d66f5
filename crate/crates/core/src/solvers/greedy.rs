use std::time::Instant;

use super::{SolveResult, SolverError};
use crate::encoding::AngleGrid;
use crate::geom::VolumeEvaluator;
use crate::molgraph::{edge_betweenness, FragmentDecomposition, Molecule};

/// Torsions by descending edge betweenness of their bond, ties by index.
pub fn betweenness_order(mol: &Molecule, fd: &FragmentDecomposition) -> Vec<usize> {
    let score = edge_betweenness(mol);
    let mut order: Vec<usize> = (0..fd.torsion_count()).collect();
    order.sort_by(|&a, &b| {
        let (sa, sb) = (score[fd.torsions()[a].bond_index], score[fd.torsions()[b].bond_index]);
        sb.total_cmp(&sa).then(a.cmp(&b))
    });
    order
}

/// Coordinate ascent from all-zero torsions; one trace entry per torsion
/// update.
pub fn greedy_geodock(
    mol: &Molecule,
    fd: &FragmentDecomposition,
    grid: AngleGrid,
    rounds: usize,
) -> Result<SolveResult, SolverError> {
    if fd.torsion_count() == 0 {
        return Err(SolverError::NoTorsions);
    }
    if rounds == 0 {
        return Err(SolverError::BadConfig("rounds must be at least 1".into()));
    }
    let start = Instant::now();
    let eval = VolumeEvaluator::new(mol, fd);
    let order = betweenness_order(mol, fd);
    let mut ks = vec![0usize; fd.torsion_count()];
    let angles = |ks: &[usize]| -> Vec<f64> { ks.iter().map(|&k| grid.value(k)).collect() };
    let mut best = eval.volume(&angles(&ks));
    let mut trace = Vec::new();
    let mut step_times = Vec::new();
    for _ in 0..rounds {
        for &t in &order {
            let current = ks[t];
            let mut choice = (best, current);
            for k in 0..grid.size() {
                if k == current {
                    continue;
                }
                ks[t] = k;
                let v = eval.volume(&angles(&ks));
                if v > choice.0 {
                    choice = (v, k);
                }
            }
            ks[t] = choice.1;
            best = choice.0;
            trace.push(best);
            step_times.push(start.elapsed().as_secs_f64());
        }
    }
    Ok(SolveResult {
        solver: "greedy".into(),
        best_assignment: Vec::new(),
        best_grid: ks,
        best_volume: best,
        trace,
        step_times,
        wall_time: start.elapsed().as_secs_f64(),
        seed: 0,
    })
}
