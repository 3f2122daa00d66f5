mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "molunfold", version, about = "Molecular unfolding over discretized torsions")]
struct Cli {
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print atoms, bonds, rotatable bonds and fragments.
    Inspect {
        path: PathBuf,
        #[command(flatten)]
        knobs: Knobs,
    },
    /// Build the HUBO objective and write it as JSON with a term-stats sidecar.
    Hubo {
        path: PathBuf,
        #[command(flatten)]
        knobs: Knobs,
    },
    /// Unfold one molecule and write the result and conformer.
    Solve {
        path: PathBuf,
        #[command(flatten)]
        knobs: Knobs,
    },
    /// Run the solver benchmark over a directory of molecules.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        knobs: Knobs,
    },
    /// Single-layer QAOA on a spin-domain HUBO JSON.
    Qaoa {
        hubo: PathBuf,
        #[command(flatten)]
        knobs: Knobs,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Bsb,
    Sa,
    Brute,
    Greedy,
}

/// Every tunable; each subcommand accepts a subset.
#[derive(Args, Debug, Default, Clone)]
pub struct Knobs {
    /// phase or onehot
    #[arg(long)]
    encoding: Option<String>,
    /// Grid points per torsion
    #[arg(long)]
    d: Option<usize>,
    /// Solver; repeat or comma-separate for bench
    #[arg(long, value_enum, value_delimiter = ',')]
    solver: Vec<SolverKind>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    a0: Option<f64>,
    /// Number or "auto"
    #[arg(long)]
    c0: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Drop terms with |c| below this threshold
    #[arg(long)]
    prune: Option<f64>,
    /// Divide the Hamiltonian by the RMS of its non-constant coefficients
    #[arg(long)]
    rescale: bool,
    /// Landscape resolution per axis
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    shots: Option<u64>,
    /// Worker threads
    #[arg(long)]
    jobs: Option<usize>,
    /// TTT step windows
    #[arg(long, value_delimiter = ',')]
    windows: Vec<usize>,
    #[arg(long, conflicts_with = "exclude_h")]
    include_h: bool,
    #[arg(long)]
    exclude_h: bool,
    /// Output file (hubo) or directory (solve, bench, qaoa)
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Bad flags or combinations; exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.render().to_string();
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            eprintln!("{}", one_line(first));
            return ExitCode::from(2);
        }
    };
    match commands::run(cli.command, cli.config.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let chain: Vec<String> = err.chain().map(|c| c.to_string()).collect();
            eprintln!("error: {}", one_line(&chain.join(": ")));
            if err.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
