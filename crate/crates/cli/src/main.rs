//! `pptsep`: generate, check, canonize, certify and verify states on
//! `2⊗2⊗2⊗N`.
//!
//! Exit codes: 0 success, 1 verification or selftest failure, 2 not PPT,
//! 3 hypothesis not met, 64 usage, 65 invalid input data, 70 internal
//! numeric failure, 74 I/O.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "pptsep",
    version,
    about = "Canonical forms and separability certificates for rank-N PPT states on 2x2x2xN"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random canonical-class instance (ground truth to FILE.truth).
    Gen(GenArgs),
    /// Report Hermiticity, rank and partial-transpose spectra.
    Check(CheckArgs),
    /// Extract (A, B, C, D) from a canonical-class state.
    Canonize(CanonizeArgs),
    /// Certify separability and write the certificate.
    Decompose(DecomposeArgs),
    /// Recompute a certificate's reconstruction residual.
    Verify(VerifyArgs),
    /// Run the seeded acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DModeArg {
    Identity,
    Random,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, required_unless_present = "ghz_werner", value_parser = positive_usize)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Conjugate by random invertible local operators.
    #[arg(long, conflicts_with = "ghz_werner")]
    pub disguise: bool,
    #[arg(long, value_enum, default_value_t = DModeArg::Identity, conflicts_with = "ghz_werner")]
    pub d_mode: DModeArg,
    /// Scale of the commuting family's spectra.
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64, conflicts_with = "ghz_werner")]
    pub scale: f64,
    /// Write `p|GHZ⟩⟨GHZ| + (1−p)I/8` on three qubits instead; with `--n`,
    /// tensor it with `|0⟩⟨0|` on the fourth subsystem.
    #[arg(long, value_name = "P", value_parser = probability)]
    pub ghz_werner: Option<f64>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = pptsep_core::DEFAULT_TOL, value_parser = positive_f64)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CanonizeArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, value_parser = positive_usize)]
    pub n: usize,
    #[arg(long, default_value_t = pptsep_core::DEFAULT_TOL, value_parser = positive_f64)]
    pub tol: f64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, value_parser = positive_usize)]
    pub n: usize,
    #[arg(long, default_value_t = pptsep_core::separability::DEFAULT_CERT_TOL, value_parser = positive_f64)]
    pub tol: f64,
    #[arg(long, default_value_t = pptsep_core::separability::DEFAULT_BUDGET, value_parser = positive_usize)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub certificate: PathBuf,
    /// Defaults to the tolerance recorded in the certificate.
    #[arg(long, value_parser = positive_f64)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Criteria at N ≤ 3 with fewer instances.
    #[arg(long)]
    pub quick: bool,
    /// Append per-criterion wall-clock times.
    #[arg(long)]
    pub timings: bool,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        Ok(_) => Err("must be a positive finite number".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn probability(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if (0.0..=1.0).contains(&x) => Ok(x),
        Ok(_) => Err("must lie in [0, 1]".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(x) => Ok(x),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                commands::EXIT_USAGE
            } else {
                0
            });
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("pptsep: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
