use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use molunfold::bench::{self, BenchConfig, BenchInput, SolverSpec};
use molunfold::encoding::{Encoding, EncodingKind};
use molunfold::geom::{conformation_volume, realize_conformation, rmsd};
use molunfold::hubo::{self, build_objective, term_stats, term_stats_csv, VariableRegistry};
use molunfold::molgraph::{
    decompose_fragments, detect_rotatable_bonds, read_molecule, write_mol_v2000, write_xyz_bonds,
};
use molunfold::qaoa::{self, Histogram};
use molunfold::solvers::{self, BsbConfig, SaConfig, SolveResult, C0};
use molunfold::{FragmentDecomposition, Molecule};
use serde_json::json;

use crate::config::{resolve, Allowed, C0Setting, FileConfig, Settings};
use crate::output::Outputs;
use crate::{Command, SolverKind, UsageError};

pub fn run(cmd: Command, config: Option<&Path>) -> Result<()> {
    let file = FileConfig::load(config)?;
    match cmd {
        Command::Inspect { path, knobs } => inspect(&path, &resolve("inspect", &knobs, &file, Allowed(&["h"]))?),
        Command::Hubo { path, knobs } => {
            hubo_cmd(&path, &resolve("hubo", &knobs, &file, Allowed(&["encoding", "d", "prune", "h", "out"]))?)
        }
        Command::Solve { path, knobs } => {
            const ALLOWED: &[&str] =
                &["encoding", "d", "solver", "steps", "dt", "a0", "c0", "samples", "seed", "h", "out"];
            solve(&path, &resolve("solve", &knobs, &file, Allowed(ALLOWED))?)
        }
        Command::Bench { dir, knobs } => {
            const ALLOWED: &[&str] =
                &["d", "solver", "steps", "dt", "a0", "c0", "samples", "seed", "jobs", "windows", "h", "out"];
            bench_cmd(&dir, &resolve("bench", &knobs, &file, Allowed(ALLOWED))?)
        }
        Command::Qaoa { hubo, knobs } => {
            const ALLOWED: &[&str] = &["prune", "rescale", "grid", "shots", "seed", "out"];
            qaoa_cmd(&hubo, &resolve("qaoa", &knobs, &file, Allowed(ALLOWED))?)
        }
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn load(path: &Path, s: &Settings) -> Result<(Molecule, FragmentDecomposition)> {
    let mol = read_molecule(path)?;
    let mol = if s.include_h { mol } else { mol.without_hydrogens()? };
    let rbs = detect_rotatable_bonds(&mol);
    let fd = decompose_fragments(&mol, &rbs)?;
    Ok((mol, fd))
}

fn require_torsions(path: &Path, fd: &FragmentDecomposition) -> Result<()> {
    if fd.torsion_count() == 0 {
        bail!("{}: molecule has no rotatable bonds", path.display());
    }
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "molecule".into(), |s| s.to_string_lossy().into_owned())
}

fn inspect(path: &Path, s: &Settings) -> Result<()> {
    let (mol, fd) = load(path, s)?;
    let mut out = String::new();
    let _ = writeln!(out, "name: {}", if mol.name.is_empty() { stem(path) } else { mol.name.clone() });
    let _ = writeln!(out, "atoms: {}", mol.atom_count());
    let _ = writeln!(out, "bonds: {}", mol.bonds().len());
    let _ = writeln!(out, "rotatable bonds: {}", fd.torsion_count());
    let _ = writeln!(out, "fragments: {}", fd.fragment_count());
    let sizes: Vec<String> = fd.fragment_sizes().iter().map(usize::to_string).collect();
    let _ = writeln!(out, "fragment sizes: {}", sizes.join(" "));
    for t in fd.torsions() {
        let (a, b) = (&mol.atoms()[t.static_end], &mol.atoms()[t.mobile_end]);
        let _ = writeln!(
            out,
            "torsion {}: bond {} ({}{} -> {}{})",
            t.torsion_index, t.bond_index, a.element, t.static_end, b.element, t.mobile_end
        );
    }
    print!("{out}");
    Ok(())
}

fn objective(
    mol: &Molecule,
    fd: &FragmentDecomposition,
    kind: EncodingKind,
    d: usize,
) -> Result<(Encoding, VariableRegistry, molunfold::Polynomial)> {
    let enc = Encoding::new(kind, d).map_err(|e| usage(format!("--d {d}: {e}")))?;
    let reg = VariableRegistry::for_encoding(&enc, fd.torsion_count());
    let poly = build_objective(mol, fd, &enc, &reg)?;
    Ok((enc, reg, poly))
}

fn check_prune(tau: Option<f64>) -> Result<()> {
    if let Some(t) = tau {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(usage(format!("--prune must be a nonnegative number, got {t}")));
        }
    }
    Ok(())
}

fn hubo_cmd(path: &Path, s: &Settings) -> Result<()> {
    check_prune(s.prune)?;
    let kind = s.encoding.unwrap_or(EncodingKind::Phase);
    let (mol, fd) = load(path, s)?;
    require_torsions(path, &fd)?;
    let (_, reg, mut poly) = objective(&mol, &fd, kind, s.d)?;
    if let Some(t) = s.prune {
        poly = poly.prune_threshold(t);
    }
    let out = s.out.clone().unwrap_or_else(|| PathBuf::from(format!("{}.hubo.json", stem(path))));
    let base = out.to_string_lossy();
    let base = base.strip_suffix(".json").unwrap_or(&base);
    let sidecar = PathBuf::from(format!("{base}.term_stats.csv"));
    let stats = term_stats(&poly);
    let mut files = Outputs::default();
    files.add(&out, hubo::to_json(&poly, Some(&reg)) + "\n");
    files.add(&sidecar, term_stats_csv(&[(stem(path), stats.clone())]));
    files.commit()?;
    println!("encoding: {kind}");
    println!("num_vars: {}", reg.num_vars());
    println!("terms: {}", stats.num_terms);
    println!("max degree: {}", stats.max_degree);
    println!("wrote {} and {}", out.display(), sidecar.display());
    Ok(())
}

fn bsb_config(s: &Settings) -> BsbConfig {
    let def = BsbConfig::default();
    BsbConfig {
        a0: s.a0.unwrap_or(def.a0),
        c0: match s.c0 {
            Some(C0Setting::Fixed(c)) => C0::Fixed(c),
            Some(C0Setting::Auto) | None => C0::Auto,
        },
        dt: s.dt.unwrap_or(def.dt),
        steps: s.steps.unwrap_or(def.steps),
    }
}

fn sa_config(s: &Settings) -> SaConfig {
    let def = SaConfig::default();
    SaConfig {
        initial_acceptance: s.initial_acceptance.unwrap_or(def.initial_acceptance),
        cooling_factor: s.cooling_factor.unwrap_or(def.cooling_factor),
        steps: s.steps.unwrap_or(def.steps),
        moves_per_step: None,
    }
}

fn check_solver_flags(solver: SolverKind, s: &Settings) -> Result<()> {
    let name = format!("{solver:?}").to_lowercase();
    if solver != SolverKind::Bsb && (s.dt.is_some() || s.a0.is_some() || s.c0.is_some()) {
        return Err(usage(format!("--dt/--a0/--c0 apply to bsb only, not {name}")));
    }
    if matches!(solver, SolverKind::Brute | SolverKind::Greedy) && s.steps.is_some() {
        return Err(usage(format!("--steps does not apply to {name}")));
    }
    Ok(())
}

fn solve(path: &Path, s: &Settings) -> Result<()> {
    let solver = match s.solvers.as_slice() {
        [] => SolverKind::Bsb,
        [one] => *one,
        _ => return Err(usage("solve takes a single --solver")),
    };
    check_solver_flags(solver, s)?;
    let kind = match (solver, s.encoding) {
        (SolverKind::Bsb, None | Some(EncodingKind::Phase)) => Some(EncodingKind::Phase),
        (SolverKind::Bsb, Some(EncodingKind::OneHot)) => {
            return Err(usage("bsb needs --encoding phase (spin variables)"))
        }
        (SolverKind::Sa, None | Some(EncodingKind::OneHot)) => Some(EncodingKind::OneHot),
        (SolverKind::Sa, Some(EncodingKind::Phase)) => return Err(usage("sa needs --encoding onehot")),
        (_, Some(_)) => return Err(usage("--encoding does not apply to brute or greedy")),
        (_, None) => None,
    };
    let samples = s.samples.unwrap_or(1);
    if samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let bsb = bsb_config(s);
    let sa = sa_config(s);
    match solver {
        SolverKind::Bsb => bsb.validate().map_err(|e| usage(e.to_string()))?,
        SolverKind::Sa => sa.validate().map_err(|e| usage(e.to_string()))?,
        _ => {}
    }
    let grid = molunfold::AngleGrid::new(s.d).map_err(|e| usage(format!("--d {}: {e}", s.d)))?;

    let (mol, fd) = load(path, s)?;
    require_torsions(path, &fd)?;
    let name = stem(path);
    let mut runs: Vec<SolveResult> = Vec::new();
    let mut encoding = None;
    let mut hubo_terms = None;
    match kind {
        Some(k) => {
            let (enc, reg, poly) = objective(&mol, &fd, k, s.d)?;
            hubo_terms = Some(poly.len());
            let compiled = solvers::CompiledPolynomial::new(&poly);
            for sample in 0..samples {
                let seed = bench::derive_seed(s.seed, sample as u64);
                let mut r = match solver {
                    SolverKind::Bsb => solvers::solve_bsb_compiled(&compiled, &bsb, seed)?,
                    _ => solvers::solve_sa_compiled(&compiled, &reg, &sa, seed)?,
                };
                r.best_grid = enc.decode_indices(&r.best_assignment)?;
                runs.push(r);
            }
            encoding = Some(enc);
        }
        None => {
            let r = match solver {
                SolverKind::Brute => solvers::brute_force(&mol, &fd, grid)?,
                _ => solvers::greedy_geodock(&mol, &fd, grid, s.greedy_rounds)?,
            };
            runs.push(r);
        }
    }
    // highest volume wins, earliest sample on ties
    let best_idx = (0..runs.len()).fold(0, |b, i| if runs[i].best_volume > runs[b].best_volume { i } else { b });
    let best = runs.swap_remove(best_idx);
    let theta = grid.assignment(&best.best_grid);
    let conf = realize_conformation(&mol, &fd, &theta)?;
    let unfolded = mol.with_conformation(&conf);
    let realized_volume = conformation_volume(&fd, &conf);
    let input_volume = conformation_volume(&fd, &mol.conformation());
    let summary = json!({
        "molecule": name,
        "solver": best.solver,
        "encoding": encoding.as_ref().map(|e| e.kind().to_string()),
        "d": s.d,
        "seed": s.seed,
        "samples": samples,
        "best_sample": best_idx,
        "hubo_terms": hubo_terms,
        "torsions": fd.torsion_count(),
        "angles_deg": theta.angles().iter().map(|a| a.to_degrees()).collect::<Vec<_>>(),
        "best_volume": best.best_volume,
        "realized_volume": realized_volume,
        "input_volume": input_volume,
        "rmsd_to_input": rmsd(&mol.conformation(), &conf)?,
        "result": best,
    });
    let out = s.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let is_xyz = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("xyz"));
    let (ext, text) = if is_xyz { ("xyz", write_xyz_bonds(&unfolded)) } else { ("mol", write_mol_v2000(&unfolded)) };
    let mut files = Outputs::default();
    files.add(out.join(format!("{name}.result.json")), serde_json::to_string_pretty(&summary)? + "\n");
    files.add(out.join(format!("{name}.trace.csv")), best.trace_csv());
    files.add(out.join(format!("{name}.unfolded.{ext}")), text);
    let written = files.commit()?;
    println!("solver: {}", best.solver);
    println!("volume: {realized_volume:.6} (input {input_volume:.6})");
    println!("grid: {:?}", best.best_grid);
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn bench_cmd(dir: &Path, s: &Settings) -> Result<()> {
    let kinds = if s.solvers.is_empty() { vec![SolverKind::Bsb, SolverKind::Sa] } else { s.solvers.clone() };
    if (s.dt.is_some() || s.a0.is_some() || s.c0.is_some()) && !kinds.contains(&SolverKind::Bsb) {
        return Err(usage("--dt/--a0/--c0 apply to bsb only"));
    }
    let solvers = kinds
        .iter()
        .map(|k| match k {
            SolverKind::Bsb => SolverSpec::Bsb(bsb_config(s)),
            SolverKind::Sa => SolverSpec::Sa(sa_config(s)),
            SolverKind::Brute => SolverSpec::Brute,
            SolverKind::Greedy => SolverSpec::Greedy { rounds: s.greedy_rounds },
        })
        .collect();
    let def = BenchConfig::default();
    let cfg = BenchConfig {
        d: s.d,
        samples: s.samples.unwrap_or(def.samples),
        windows: s.windows.clone().unwrap_or(def.windows),
        master_seed: s.seed,
        jobs: s.jobs,
        include_hydrogens: s.include_h,
        solvers,
        ..def
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let inputs: Vec<BenchInput> = bench::load_dataset(dir)?;
    let report = bench::run_benchmark(&inputs, &cfg)?;
    for (name, reason) in &report.skipped {
        eprintln!("warning: skipped {name}: {reason}");
    }
    let out = s.out.clone().unwrap_or_else(|| PathBuf::from("bench-out"));
    let mut files = Outputs::default();
    for (name, text) in report.files() {
        files.add(out.join(name), text);
    }
    files.commit()?;
    println!("molecules: {} (skipped {})", report.molecules.len(), report.skipped.len());
    println!("solver,window,mean_ratio,p_median,median_ttt_s");
    for row in &report.ttt {
        let ttt = row.median_ttt.map_or_else(|| "NA".into(), |t| format!("{t:.6}"));
        println!("{},{},{:.6},{},{ttt}", row.solver, row.window, row.mean_ratio, row.median_p);
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn qaoa_cmd(path: &Path, s: &Settings) -> Result<()> {
    check_prune(s.prune)?;
    if s.grid < 2 {
        return Err(usage(format!("--grid must be at least 2, got {}", s.grid)));
    }
    if s.shots == 0 {
        return Err(usage("--shots must be positive"));
    }
    let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
    let (full, _) = hubo::from_json(&text).with_context(|| path.display().to_string())?;
    let poly = match s.prune {
        Some(t) => full.prune_threshold(t),
        None => full.clone(),
    };
    let h_full = qaoa::build_diagonal(&full)?;
    let h = qaoa::build_diagonal(&poly)?;
    let h_run = if s.rescale { qaoa::rescale_hamiltonian(&h)? } else { h.clone() };
    let (land, opt) = qaoa::optimize_from_grid(&h_run, s.grid)?;
    let state = qaoa::run_qaoa(&h_run, opt.params);
    let hist: Histogram = qaoa::sample(&state, s.shots, s.seed)?;
    let mode = hist.mode().expect("shots > 0");
    let ground = h.ground_state();
    let summary = json!({
        "qubits": h.n_qubits(),
        "terms": full.len(),
        "terms_after_prune": poly.len(),
        "prune": s.prune,
        "rescale": s.rescale,
        "ground_energy": h.ground_energy(),
        "ground_energy_unpruned": h_full.ground_energy(),
        "ground_state": hist.bitstring(ground),
        "gamma": opt.params.gamma,
        "beta": opt.params.beta,
        "expectation": opt.expectation,
        "evaluations": opt.evaluations,
        "grid": s.grid,
        "basin_fraction_5pct": qaoa::basin_fraction(&land, 0.05),
        "shots": s.shots,
        "seed": s.seed,
        "mode": hist.bitstring(mode),
        "mode_probability": hist.probability(mode),
        "mode_is_ground": h.energies()[mode] == h.ground_energy(),
    });
    let out = s.out.clone().unwrap_or_else(|| PathBuf::from("qaoa-out"));
    let mut files = Outputs::default();
    files.add(out.join("landscape.csv"), land.to_csv());
    files.add(out.join("histogram.csv"), hist.to_csv());
    files.add(out.join("qaoa.json"), serde_json::to_string_pretty(&summary)? + "\n");
    let paths: Vec<String> = files.paths().map(|p| p.display().to_string()).collect();
    files.commit()?;
    println!("qubits: {}", h.n_qubits());
    println!("terms: {} -> {}", full.len(), poly.len());
    println!("ground energy: {:.6} ({})", h.ground_energy(), hist.bitstring(ground));
    println!("mode: {} p={:.4} ground={}", hist.bitstring(mode), hist.probability(mode), summary["mode_is_ground"]);
    println!("wrote {}", paths.join(", "));
    Ok(())
}
