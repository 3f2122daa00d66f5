use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{median, success_probability, tts, ttt, volume_ratio, BenchError, BoxplotStats};
use crate::encoding::{AngleGrid, Encoding, EncodingKind};
use crate::geom::{realize_conformation, rmsd};
use crate::hubo::{build_objective, VariableRegistry};
use crate::molgraph::{decompose_fragments, detect_rotatable_bonds, parse_molecule, FragmentDecomposition, Molecule};
use crate::solvers::{
    brute_force_with_cap, greedy_geodock, solve_bsb_compiled, solve_sa_compiled, BsbConfig, CompiledPolynomial,
    SaConfig, SolveResult, SolverError,
};

/// Relative slack for counting a run as having found the optimum.
const OPTIMUM_RTOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "lowercase")]
pub enum SolverSpec {
    Bsb(BsbConfig),
    Sa(SaConfig),
    Greedy { rounds: usize },
    Brute,
}

impl SolverSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SolverSpec::Bsb(_) => "bsb",
            SolverSpec::Sa(_) => "sa",
            SolverSpec::Greedy { .. } => "greedy",
            SolverSpec::Brute => "brute",
        }
    }

    fn encoding(&self) -> Option<EncodingKind> {
        match self {
            SolverSpec::Bsb(_) => Some(EncodingKind::Phase),
            SolverSpec::Sa(_) => Some(EncodingKind::OneHot),
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), SolverError> {
        match self {
            SolverSpec::Bsb(c) => c.validate(),
            SolverSpec::Sa(c) => c.validate(),
            SolverSpec::Greedy { rounds: 0 } => Err(SolverError::BadConfig("rounds must be at least 1".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub d: usize,
    pub samples: usize,
    /// Step windows for TTT/TTS.
    pub windows: Vec<usize>,
    pub master_seed: u64,
    /// Worker threads; `None` uses every core.
    pub jobs: Option<usize>,
    pub include_hydrogens: bool,
    /// Success target as a fraction of the optimum.
    pub target_fraction: f64,
    pub brute_cap: u64,
    pub solvers: Vec<SolverSpec>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            d: 16,
            samples: 20,
            windows: vec![10, 20, 50, 100],
            master_seed: 0,
            jobs: None,
            include_hydrogens: true,
            target_fraction: 0.997,
            brute_cap: 1 << 20,
            solvers: vec![SolverSpec::Bsb(BsbConfig::default()), SolverSpec::Sa(SaConfig::default())],
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.samples == 0 {
            return Err(BenchError::NoSamples);
        }
        if self.solvers.is_empty() {
            return Err(BenchError::Config("no solvers configured".into()));
        }
        if self.windows.contains(&0) {
            return Err(BenchError::Config("windows must be positive".into()));
        }
        if self.jobs == Some(0) {
            return Err(BenchError::Config("jobs must be positive".into()));
        }
        if !(self.target_fraction > 0.0 && self.target_fraction <= 1.0) {
            return Err(BenchError::Config(format!("target fraction {} outside (0, 1]", self.target_fraction)));
        }
        AngleGrid::new(self.d).map_err(|e| BenchError::Config(e.to_string()))?;
        if self.solvers.iter().any(|s| s.encoding() == Some(EncodingKind::Phase)) {
            Encoding::new(EncodingKind::Phase, self.d).map_err(|e| BenchError::Config(e.to_string()))?;
        }
        for s in &self.solvers {
            s.validate().map_err(|e| BenchError::Config(format!("{}: {e}", s.name())))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BenchInput {
    pub name: String,
    pub molecule: Molecule,
    /// Hex digest of the source bytes.
    pub sha256: String,
}

impl BenchInput {
    pub fn from_path(path: &Path) -> Result<Self, BenchError> {
        let bytes =
            std::fs::read(path).map_err(|source| BenchError::Io { path: path.display().to_string(), source })?;
        let name = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        let text = String::from_utf8_lossy(&bytes);
        let molecule = parse_molecule(&text).map_err(|source| BenchError::Mol { name: name.clone(), source })?;
        Ok(Self { name, molecule, sha256: hex_digest(&bytes) })
    }

    /// Hashes the canonical molfile text of an in-memory molecule.
    pub fn from_molecule(name: impl Into<String>, molecule: Molecule) -> Self {
        let sha256 = hex_digest(crate::molgraph::write_mol_v2000(&molecule).as_bytes());
        Self { name: name.into(), molecule, sha256 }
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Every `.mol`, `.sdf` and `.xyz` file in `dir`, sorted by file name.
pub fn load_dataset(dir: &Path) -> Result<Vec<BenchInput>, BenchError> {
    let io = |source| BenchError::Io { path: dir.display().to_string(), source };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "mol" | "sdf" | "xyz"))
        })
        .collect();
    paths.sort();
    let inputs = paths.iter().map(|p| BenchInput::from_path(p)).collect::<Result<Vec<_>, _>>()?;
    if inputs.is_empty() {
        return Err(BenchError::EmptyDataset);
    }
    Ok(inputs)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of job `job_id` under a master seed.
pub fn derive_seed(master: u64, job_id: u64) -> u64 {
    splitmix64(master ^ splitmix64(job_id))
}

#[derive(Debug, Clone, Serialize)]
pub struct MoleculeSummary {
    pub name: String,
    pub sha256: String,
    pub atoms: usize,
    pub torsions: usize,
    pub optimum_volume: f64,
    pub input_volume: f64,
    pub optimum_grid: Vec<usize>,
    /// Input conformer against the realized optimum.
    pub rmsd: f64,
    pub reference_seconds: f64,
    /// HUBO construction time per encoding.
    pub build_seconds: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub molecule: usize,
    pub solver: String,
    pub sample: usize,
    pub result: SolveResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioSeries {
    pub solver: String,
    pub runs: usize,
    pub molecules: usize,
    /// Mean best-so-far ratio after each step.
    pub mean_ratio: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TttRow {
    pub solver: String,
    pub window: usize,
    pub median_ttt: Option<f64>,
    pub median_p: f64,
    pub undefined_ttt: usize,
    pub median_tts: Option<f64>,
    pub median_p_opt: f64,
    pub undefined_tts: usize,
    pub mean_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RmsdGroup {
    pub torsions: usize,
    pub count: usize,
    pub stats: BoxplotStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub molecules: Vec<MoleculeSummary>,
    /// `(name, reason)` for inputs left out.
    pub skipped: Vec<(String, String)>,
    pub runs: Vec<RunRecord>,
    pub ratio_series: Vec<RatioSeries>,
    pub ttt: Vec<TttRow>,
    pub rmsd: Vec<RmsdGroup>,
}

struct Prepared {
    mol: Molecule,
    fd: FragmentDecomposition,
    objectives: BTreeMap<EncodingKind, (CompiledPolynomial, VariableRegistry)>,
}

fn prepare(
    input: &BenchInput,
    cfg: &BenchConfig,
    grid: AngleGrid,
    kinds: &[EncodingKind],
) -> Result<Result<(Prepared, MoleculeSummary), String>, BenchError> {
    let name = &input.name;
    let mol = if cfg.include_hydrogens {
        input.molecule.clone()
    } else {
        input.molecule.without_hydrogens().map_err(|source| BenchError::Mol { name: name.clone(), source })?
    };
    let rbs = detect_rotatable_bonds(&mol);
    if rbs.is_empty() {
        return Ok(Err("no rotatable bonds".into()));
    }
    let fd = decompose_fragments(&mol, &rbs).map_err(|source| BenchError::Mol { name: name.clone(), source })?;
    let reference = match brute_force_with_cap(&mol, &fd, grid, u128::from(cfg.brute_cap)) {
        Ok(r) => r,
        Err(e @ SolverError::CapExceeded { .. }) => return Ok(Err(e.to_string())),
        Err(source) => return Err(BenchError::Solver { name: name.clone(), source }),
    };
    let optimum = grid.assignment(&reference.best_grid);
    let realized = realize_conformation(&mol, &fd, &optimum).expect("grid assignment matches torsion count");
    let rmsd = rmsd(&mol.conformation(), &realized).expect("same atom count");
    let input_volume = crate::geom::conformation_volume(&fd, &mol.conformation());
    let mut objectives = BTreeMap::new();
    let mut build_seconds = BTreeMap::new();
    for &kind in kinds {
        let enc = Encoding::new(kind, cfg.d).map_err(|e| BenchError::Config(e.to_string()))?;
        let reg = VariableRegistry::for_encoding(&enc, fd.torsion_count());
        let start = Instant::now();
        let poly =
            build_objective(&mol, &fd, &enc, &reg).map_err(|source| BenchError::Hubo { name: name.clone(), source })?;
        let compiled = CompiledPolynomial::new(&poly);
        build_seconds.insert(kind.to_string(), start.elapsed().as_secs_f64());
        objectives.insert(kind, (compiled, reg));
    }
    let summary = MoleculeSummary {
        name: name.clone(),
        sha256: input.sha256.clone(),
        atoms: mol.atom_count(),
        torsions: fd.torsion_count(),
        optimum_volume: reference.best_volume,
        input_volume,
        optimum_grid: reference.best_grid,
        rmsd,
        reference_seconds: reference.wall_time,
        build_seconds,
    };
    Ok(Ok((Prepared { mol, fd, objectives }, summary)))
}

fn run_one(spec: &SolverSpec, prep: &Prepared, grid: AngleGrid, seed: u64) -> Result<SolveResult, SolverError> {
    let objective = |kind| prep.objectives.get(&kind).expect("objective prepared for solver");
    let mut r = match spec {
        SolverSpec::Bsb(c) => solve_bsb_compiled(&objective(EncodingKind::Phase).0, c, seed)?,
        SolverSpec::Sa(c) => {
            let (p, reg) = objective(EncodingKind::OneHot);
            solve_sa_compiled(p, reg, c, seed)?
        }
        SolverSpec::Greedy { rounds } => greedy_geodock(&prep.mol, &prep.fd, grid, *rounds)?,
        SolverSpec::Brute => brute_force_with_cap(&prep.mol, &prep.fd, grid, u128::MAX)?,
    };
    r.seed = seed;
    Ok(r)
}

/// Runs every solver `samples` times on every molecule with a computable
/// brute-force reference. Molecules over the cap, or without torsions, are
/// listed in [`BenchReport::skipped`].
pub fn run_benchmark(inputs: &[BenchInput], cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    cfg.validate()?;
    let grid = AngleGrid::new(cfg.d).map_err(|e| BenchError::Config(e.to_string()))?;
    let mut kinds: Vec<EncodingKind> = cfg.solvers.iter().filter_map(SolverSpec::encoding).collect();
    kinds.sort_by_key(|k| k.to_string());
    kinds.dedup();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| BenchError::Config(e.to_string()))?;

    pool.install(|| {
        let mut prepared = Vec::new();
        let mut molecules = Vec::new();
        let mut skipped = Vec::new();
        for input in inputs {
            match prepare(input, cfg, grid, &kinds)? {
                Ok((p, s)) => {
                    prepared.push(p);
                    molecules.push(s);
                }
                Err(reason) => skipped.push((input.name.clone(), reason)),
            }
        }
        if prepared.is_empty() {
            return Err(BenchError::EmptyDataset);
        }

        let n_solvers = cfg.solvers.len();
        let jobs: Vec<(usize, usize, usize)> = (0..prepared.len())
            .flat_map(|m| (0..n_solvers).flat_map(move |s| (0..cfg.samples).map(move |k| (m, s, k))))
            .collect();
        let runs = jobs
            .par_iter()
            .enumerate()
            .map(|(id, &(m, s, k))| {
                let spec = &cfg.solvers[s];
                let seed = derive_seed(cfg.master_seed, id as u64);
                run_one(spec, &prepared[m], grid, seed)
                    .map(|result| RunRecord { molecule: m, solver: spec.name().into(), sample: k, result })
                    .map_err(|source| BenchError::Solver { name: molecules[m].name.clone(), source })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let (ratio_series, ttt_rows) = aggregate(cfg, &molecules, &runs)?;
        let rmsd = rmsd_groups(&molecules);
        Ok(BenchReport { config: cfg.clone(), molecules, skipped, runs, ratio_series, ttt: ttt_rows, rmsd })
    })
}

fn aggregate(
    cfg: &BenchConfig,
    molecules: &[MoleculeSummary],
    runs: &[RunRecord],
) -> Result<(Vec<RatioSeries>, Vec<TttRow>), BenchError> {
    let mut series = Vec::new();
    let mut rows = Vec::new();
    for (s, spec) in cfg.solvers.iter().enumerate() {
        // runs are laid out molecule-major, then solver, then sample
        let per_mol: Vec<&[RunRecord]> = (0..molecules.len())
            .map(|m| {
                let start = (m * cfg.solvers.len() + s) * cfg.samples;
                &runs[start..start + cfg.samples]
            })
            .collect();
        let steps = per_mol.iter().flat_map(|rs| rs.iter()).map(|r| r.result.trace.len()).max().unwrap_or(1).max(1);
        let mut mean_ratio = vec![0.0; steps];
        let mut count = 0usize;
        for (m, rs) in per_mol.iter().enumerate() {
            let opt = molecules[m].optimum_volume;
            for r in rs.iter() {
                count += 1;
                for (w, acc) in mean_ratio.iter_mut().enumerate() {
                    *acc += volume_ratio(r.result.volume_at(w + 1), opt)?;
                }
            }
        }
        mean_ratio.iter_mut().for_each(|a| *a /= count as f64);
        series.push(RatioSeries { solver: spec.name().into(), runs: count, molecules: molecules.len(), mean_ratio });

        for &window in &cfg.windows {
            let mut ttts = Vec::new();
            let mut ttss = Vec::new();
            let mut ps = Vec::new();
            let mut popts = Vec::new();
            let mut ratio_sum = 0.0;
            for (m, rs) in per_mol.iter().enumerate() {
                let opt = molecules[m].optimum_volume;
                let vols: Vec<f64> = rs.iter().map(|r| r.result.volume_at(window)).collect();
                ratio_sum += vols.iter().map(|v| v / opt).sum::<f64>();
                let total: f64 = rs.iter().map(|r| r.result.time_at(window)).sum::<f64>().max(f64::MIN_POSITIVE);
                let p = success_probability(&vols, cfg.target_fraction * opt);
                let p_opt = success_probability(&vols, opt * (1.0 - OPTIMUM_RTOL));
                ps.push(p);
                popts.push(p_opt);
                ttts.extend(ttt(total, cfg.samples, p)?);
                ttss.extend(tts(total, cfg.samples, p_opt)?);
            }
            let n = per_mol.len();
            rows.push(TttRow {
                solver: spec.name().into(),
                window,
                median_ttt: median(&ttts),
                median_p: median(&ps).unwrap_or(0.0),
                undefined_ttt: n - ttts.len(),
                median_tts: median(&ttss),
                median_p_opt: median(&popts).unwrap_or(0.0),
                undefined_tts: n - ttss.len(),
                mean_ratio: ratio_sum / (n * cfg.samples) as f64,
            });
        }
    }
    Ok((series, rows))
}

fn rmsd_groups(molecules: &[MoleculeSummary]) -> Vec<RmsdGroup> {
    let mut by_m: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for m in molecules {
        by_m.entry(m.torsions).or_default().push(m.rmsd);
    }
    by_m.into_iter()
        .map(|(torsions, v)| RmsdGroup {
            torsions,
            count: v.len(),
            stats: BoxplotStats::from_values(&v).expect("group is nonempty"),
        })
        .collect()
}

fn opt_cell(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), |x| x.to_string())
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

impl BenchReport {
    /// `(file name, contents)` of every output. All but `ttt.csv` and
    /// `timings.csv` are timing-free and reproduce byte for byte.
    pub fn files(&self) -> Vec<(&'static str, String)> {
        let ratio = csv_text(
            &["solver", "step", "mean_ratio"],
            self.ratio_series.iter().flat_map(|s| {
                s.mean_ratio.iter().enumerate().map(|(i, r)| vec![s.solver.clone(), (i + 1).to_string(), r.to_string()])
            }),
        );
        let ttt = csv_text(
            &[
                "solver",
                "window",
                "median_ttt_s",
                "p_median",
                "undefined_ttt",
                "median_tts_s",
                "p_opt_median",
                "undefined_tts",
            ],
            self.ttt.iter().map(|t| {
                vec![
                    t.solver.clone(),
                    t.window.to_string(),
                    opt_cell(t.median_ttt),
                    t.median_p.to_string(),
                    t.undefined_ttt.to_string(),
                    opt_cell(t.median_tts),
                    t.median_p_opt.to_string(),
                    t.undefined_tts.to_string(),
                ]
            }),
        );
        let success = csv_text(
            &["solver", "window", "p_median", "p_opt_median", "mean_ratio"],
            self.ttt.iter().map(|t| {
                vec![
                    t.solver.clone(),
                    t.window.to_string(),
                    t.median_p.to_string(),
                    t.median_p_opt.to_string(),
                    t.mean_ratio.to_string(),
                ]
            }),
        );
        let rmsd = csv_text(
            &["group", "count", "min", "q1", "median", "q3", "max"],
            self.rmsd.iter().map(|g| {
                let s = g.stats;
                vec![
                    g.torsions.to_string(),
                    g.count.to_string(),
                    s.min.to_string(),
                    s.q1.to_string(),
                    s.median.to_string(),
                    s.q3.to_string(),
                    s.max.to_string(),
                ]
            }),
        );
        let molecules = csv_text(
            &["name", "atoms", "torsions", "optimum_volume", "input_volume", "rmsd", "optimum_grid"],
            self.molecules.iter().map(|m| {
                vec![
                    m.name.clone(),
                    m.atoms.to_string(),
                    m.torsions.to_string(),
                    m.optimum_volume.to_string(),
                    m.input_volume.to_string(),
                    m.rmsd.to_string(),
                    m.optimum_grid.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
                ]
            }),
        );
        let runs = csv_text(
            &["molecule", "solver", "sample", "seed", "best_volume", "ratio"],
            self.runs.iter().map(|r| {
                let m = &self.molecules[r.molecule];
                vec![
                    m.name.clone(),
                    r.solver.clone(),
                    r.sample.to_string(),
                    r.result.seed.to_string(),
                    r.result.best_volume.to_string(),
                    (r.result.best_volume / m.optimum_volume).to_string(),
                ]
            }),
        );
        let timing_cols: Vec<String> = ["phase", "onehot"].iter().map(|k| format!("{k}_build_s")).collect();
        let mut header = vec!["molecule", "reference_s"];
        header.extend(timing_cols.iter().map(String::as_str));
        let timings = csv_text(
            &header,
            self.molecules.iter().map(|m| {
                let mut row = vec![m.name.clone(), m.reference_seconds.to_string()];
                for k in ["phase", "onehot"] {
                    row.push(opt_cell(m.build_seconds.get(k).copied()));
                }
                row
            }),
        );
        vec![
            ("ratio_trace.csv", ratio),
            ("success.csv", success),
            ("rmsd.csv", rmsd),
            ("molecules.csv", molecules),
            ("runs.csv", runs),
            ("ttt.csv", ttt),
            ("timings.csv", timings),
            ("manifest.json", self.manifest()),
        ]
    }

    pub fn manifest(&self) -> String {
        let inputs: Vec<_> = self
            .molecules
            .iter()
            .map(|m| serde_json::json!({ "name": m.name, "sha256": m.sha256, "torsions": m.torsions }))
            .collect();
        let skipped: Vec<_> = self.skipped.iter().map(|(n, r)| serde_json::json!({ "name": n, "reason": r })).collect();
        let v = serde_json::json!({
            "version": env!("CARGO_PKG_VERSION"),
            "master_seed": self.config.master_seed,
            "seed_rule": "splitmix64(master ^ splitmix64(job_id)), job_id = (molecule * solvers + solver) * samples + sample",
            "config": self.config,
            "inputs": inputs,
            "skipped": skipped,
        });
        serde_json::to_string_pretty(&v).expect("manifest serializes") + "\n"
    }
}

/// Writes [`BenchReport::files`] into `dir`, creating it if needed.
pub fn write_report(report: &BenchReport, dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    std::fs::create_dir_all(dir).map_err(|source| BenchError::Io { path: dir.display().to_string(), source })?;
    let mut written = Vec::new();
    for (name, text) in report.files() {
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|source| BenchError::Io { path: path.display().to_string(), source })?;
        written.push(path);
    }
    Ok(written)
}
