//! `splab`: eigendecompositions, perturbation reports, verifier suites and
//! the worked-example sweeps from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "splab", version, about = "Invariant-subspace perturbation workbench")]
pub struct Cli {
    #[command(flatten)]
    pub shared: Shared,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Shared {
    /// Base seed; falls back to SPLAB_SEED, then 42.
    #[arg(long, global = true, env = "SPLAB_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for suites and sweeps (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Tolerance override, e.g. `--tol tol_eig=1e-9`; repeatable.
    #[arg(long = "tol", global = true, value_name = "KEY=VAL")]
    pub tol: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Matching {
    /// Apply the selector to the perturbed spectrum too.
    Same,
    /// Pair perturbed eigenvalues with the studied ones by minimum total distance.
    Nearest,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigendecomposition of a matrix file: X, Λ, V = X^{-*}, κ2(X).
    Eig {
        #[arg(long)]
        input: PathBuf,
    },
    /// Distances and bounds for A and A + ΔA.
    Report {
        #[arg(long)]
        input: PathBuf,
        /// unit:i,j,EPS (1-based) | gaussian:NORM | file:PATH
        #[arg(long)]
        perturb: String,
        /// topk:K | indices:i,j,... | disk:CENTER:RADIUS:inside|outside
        #[arg(long)]
        select: String,
        #[arg(long = "match", value_enum, default_value_t = Matching::Same)]
        matching: Matching,
    },
    /// Run a seeded verifier suite.
    Verify {
        /// lemma32 | lemma33 | contour | dominance | scaling
        suite: String,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
    /// Write one of the worked example matrices.
    Example {
        #[command(subcommand)]
        family: ExampleFamily,
    },
    /// Run one of the example sweeps.
    Sweep {
        #[command(subcommand)]
        sweep: SweepKind,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExampleFamily {
    /// [[1, 1, 0], [ε, 1, 0], [0, 0, 1/2]]
    Example11 {
        #[arg(long)]
        eps: f64,
    },
    /// 3×3 lower-bidiagonal δ² example.
    TightR2 {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eps: f64,
    },
    /// (r+1)×(r+1) lower-bidiagonal δ^r example.
    Tight {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eps: f64,
    },
    /// κ2(V2) necessity example, 3×3 or padded to n.
    V2 {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        delta1: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum SweepKind {
    /// Near-Jordan example over ε with one shared Gaussian ΔA.
    Table1 {
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-4,1e-6,1e-8,1e-10")]
        eps_list: Vec<f64>,
        #[arg(long, default_value_t = 1e-6)]
        norm: f64,
    },
    /// Bidiagonal family with ε = c·δ^r.
    Tightness {
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05")]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        c: f64,
    },
    /// κ2(V2) necessity example.
    V2 {
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0.005)]
        delta1: f64,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// All nine unit perturbations ε1·E_ij of the near-Jordan example.
    Special {
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[arg(long, default_value_t = 1e-6)]
        eps1: f64,
    },
}

/// Stable exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const ASSUMPTION: u8 = 2;
    pub const NUMERICAL: u8 = 3;
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("splab: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
