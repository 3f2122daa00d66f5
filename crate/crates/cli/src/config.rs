//! Settings resolution: flags, then the config file, then defaults.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use molunfold::EncodingKind;
use serde::Deserialize;

use crate::{Knobs, SolverKind, UsageError};

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    #[default]
    None,
    One(SolverKind),
    Many(Vec<SolverKind>),
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    encoding: Option<EncodingKind>,
    d: Option<usize>,
    #[serde(default)]
    solver: OneOrMany,
    steps: Option<usize>,
    dt: Option<f64>,
    a0: Option<f64>,
    c0: Option<toml::Value>,
    samples: Option<usize>,
    seed: Option<u64>,
    prune: Option<f64>,
    rescale: Option<bool>,
    grid: Option<usize>,
    shots: Option<u64>,
    jobs: Option<usize>,
    windows: Option<Vec<usize>>,
    include_h: Option<bool>,
    greedy_rounds: Option<usize>,
    cooling_factor: Option<f64>,
    initial_acceptance: Option<f64>,
    out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).map_err(|e| UsageError(format!("config {}: {}", path.display(), e.message())).into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum C0Setting {
    Auto,
    Fixed(f64),
}

/// Fully resolved settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub encoding: Option<EncodingKind>,
    pub d: usize,
    pub solvers: Vec<SolverKind>,
    pub steps: Option<usize>,
    pub dt: Option<f64>,
    pub a0: Option<f64>,
    pub c0: Option<C0Setting>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub prune: Option<f64>,
    pub rescale: bool,
    pub grid: usize,
    pub shots: u64,
    pub jobs: Option<usize>,
    pub windows: Option<Vec<usize>>,
    pub include_h: bool,
    pub greedy_rounds: usize,
    pub cooling_factor: Option<f64>,
    pub initial_acceptance: Option<f64>,
    pub out: Option<PathBuf>,
}

fn parse_c0(text: &str) -> Result<C0Setting, UsageError> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(C0Setting::Auto);
    }
    text.parse::<f64>()
        .map(C0Setting::Fixed)
        .map_err(|_| UsageError(format!("--c0 must be a number or auto, got {text:?}")))
}

/// Flags a subcommand accepts.
#[derive(Clone, Copy)]
pub struct Allowed(pub &'static [&'static str]);

fn set_flags(k: &Knobs) -> Vec<&'static str> {
    let mut v = Vec::new();
    let mut mark = |cond: bool, name: &'static str| {
        if cond {
            v.push(name);
        }
    };
    mark(k.encoding.is_some(), "encoding");
    mark(k.d.is_some(), "d");
    mark(!k.solver.is_empty(), "solver");
    mark(k.steps.is_some(), "steps");
    mark(k.dt.is_some(), "dt");
    mark(k.a0.is_some(), "a0");
    mark(k.c0.is_some(), "c0");
    mark(k.samples.is_some(), "samples");
    mark(k.seed.is_some(), "seed");
    mark(k.prune.is_some(), "prune");
    mark(k.rescale, "rescale");
    mark(k.grid.is_some(), "grid");
    mark(k.shots.is_some(), "shots");
    mark(k.jobs.is_some(), "jobs");
    mark(!k.windows.is_empty(), "windows");
    mark(k.include_h, "include-h");
    mark(k.exclude_h, "exclude-h");
    mark(k.out.is_some(), "out");
    v
}

pub fn resolve(cmd: &str, k: &Knobs, file: &FileConfig, allowed: Allowed) -> Result<Settings> {
    for flag in set_flags(k) {
        let base = flag.trim_end_matches("-h");
        let ok = allowed.0.iter().any(|a| *a == flag || (base == "include" || base == "exclude") && *a == "h");
        if !ok {
            return Err(UsageError(format!("--{flag} is not used by {cmd}")).into());
        }
    }
    let encoding = match &k.encoding {
        Some(e) => Some(e.parse::<EncodingKind>().map_err(|e| UsageError(format!("--encoding: {e}")))?),
        None => file.encoding,
    };
    let solvers = if !k.solver.is_empty() {
        k.solver.clone()
    } else {
        match &file.solver {
            OneOrMany::None => Vec::new(),
            OneOrMany::One(s) => vec![*s],
            OneOrMany::Many(v) => v.clone(),
        }
    };
    let c0 = match (&k.c0, &file.c0) {
        (Some(t), _) => Some(parse_c0(t)?),
        (None, Some(toml::Value::String(t))) => Some(parse_c0(t)?),
        (None, Some(toml::Value::Float(f))) => Some(C0Setting::Fixed(*f)),
        (None, Some(toml::Value::Integer(i))) => Some(C0Setting::Fixed(*i as f64)),
        (None, Some(other)) => {
            return Err(UsageError(format!("config c0 must be a number or \"auto\", got {other}")).into())
        }
        (None, None) => None,
    };
    let include_h = if k.include_h {
        true
    } else if k.exclude_h {
        false
    } else {
        file.include_h.unwrap_or(true)
    };
    let windows = if k.windows.is_empty() { file.windows.clone() } else { Some(k.windows.clone()) };
    Ok(Settings {
        encoding,
        d: k.d.or(file.d).unwrap_or(16),
        solvers,
        steps: k.steps.or(file.steps),
        dt: k.dt.or(file.dt),
        a0: k.a0.or(file.a0),
        c0,
        samples: k.samples.or(file.samples),
        seed: k.seed.or(file.seed).unwrap_or(0),
        prune: k.prune.or(file.prune),
        rescale: k.rescale || file.rescale.unwrap_or(false),
        grid: k.grid.or(file.grid).unwrap_or(32),
        shots: k.shots.or(file.shots).unwrap_or(10_000),
        jobs: k.jobs.or(file.jobs),
        windows,
        include_h,
        greedy_rounds: file.greedy_rounds.unwrap_or(1),
        cooling_factor: file.cooling_factor,
        initial_acceptance: file.initial_acceptance,
        out: k.out.clone().or_else(|| file.out.clone()),
    })
}
