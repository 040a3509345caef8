//! Command-line interface for Williamson decompositions.
//!
//! Exit codes: 0 success, 1 usage/parse/numerical error, 2 when the input
//! has no real symplectic diagonalisation (the verdict file is still
//! written). Errors land on stderr as one machine-readable line prefixed
//! with a stable token.

mod commands;
mod files;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "sympdec", version, about = "Williamson decomposition of covariance matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Decompose a matrix into V = S^T D S
    Decompose {
        /// Matrix file path, or '-' for stdin
        input: String,
        /// det | baseline
        #[arg(long, default_value = "det")]
        method: String,
        /// Treat the input as a raw whitespace matrix in this ordering (xpxp | xxpp)
        #[arg(long)]
        ordering: Option<String>,
        /// Certification tolerance for both residuals
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Perturbation magnitude override for degenerate spectra
        #[arg(long)]
        epsilon: Option<f64>,
        /// Resolve eigenvalue signs instead of requiring positive-definite input
        #[arg(long)]
        allow_indefinite: bool,
        /// Pivot-row policy: per-mode | fixed
        #[arg(long, default_value = "per-mode")]
        kbar: String,
        /// Output path, or '-' for stdout
        #[arg(long, short, default_value = "-")]
        output: String,
    },
    /// Recompute the residuals of a stored decomposition from scratch
    Verify {
        input: String,
        decomp: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Run both methods on one input and report agreement and timings
    Compare { input: String },
    /// Generate a random instance with known ground truth
    Gen {
        #[arg(long)]
        modes: usize,
        /// Comma-separated symplectic eigenvalues
        #[arg(long)]
        lambdas: Option<String>,
        /// Degenerate groups as COUNT:VALUE (comma-separated)
        #[arg(long)]
        degenerate: Option<String>,
        /// Comma-separated signs (+/-) applied to --lambdas
        #[arg(long)]
        indefinite: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short, default_value = "-")]
        output: String,
    },
    /// Time both methods across sizes; CSV on stdout, table on stderr
    Bench {
        /// Comma-separated mode counts
        #[arg(long, default_value = "2,4,8")]
        modes: String,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the CSV to this path
        #[arg(long)]
        csv: Option<String>,
    },
}

/// CLI-level error with a stable one-line stderr token.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Io(String),
    Lib(sympdec::Error),
}

impl CliError {
    fn token(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "E_USAGE",
            CliError::Parse(_) => "E_PARSE",
            CliError::Io(_) => "E_IO",
            CliError::Lib(e) => match e {
                sympdec::Error::NonSquare { .. }
                | sympdec::Error::DimensionMismatch { .. }
                | sympdec::Error::IndexOutOfRange { .. } => "E_DIM",
                sympdec::Error::NonFinite | sympdec::Error::NotSymmetric { .. } => "E_NOT_SYMMETRIC",
                sympdec::Error::NotPositiveDefinite { .. } => "E_NOT_PD",
                sympdec::Error::EigenFailure | sympdec::Error::SingularKernel => "E_NUMERIC",
                sympdec::Error::DegenerateSpectrum { .. } => "E_DEGENERATE",
                sympdec::Error::PivotFailure { .. } => "E_PIVOT",
                sympdec::Error::NegativeNorm { .. } => "E_NEGATIVE_NORM",
                sympdec::Error::NotSymplectic { .. } => "E_NOT_SYMPLECTIC",
                sympdec::Error::CertificationFailed { .. } => "E_CERT",
                sympdec::Error::DegeneracyNotBroken => "E_DEGENERACY_NOT_BROKEN",
                sympdec::Error::ZeroSymplecticEigenvalue => "E_ZERO_EIGENVALUE",
                sympdec::Error::LambdaMismatch { .. } | sympdec::Error::InvalidLambda(_) => "E_LAMBDA",
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Io(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

fn main() {
    // behave like a normal pipeline citizen when stdout closes early
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            let msg = e.to_string();
            eprintln!("E_USAGE: {}", msg.lines().next().unwrap_or("bad arguments"));
            std::process::exit(1);
        }
    };
    match commands::run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("{}: {}", err.token(), err);
            std::process::exit(1);
        }
    }
}
