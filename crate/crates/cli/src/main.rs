//! `scalemix`: sample structured Gaussians, fit horseshoe regressions, run
//! simulation replicates and time the samplers.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure, 4 chain failure.

mod commands;
mod csvio;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// A failure carrying its exit code and a one-line diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub const INPUT: u8 = 2;
    pub const NUMERICAL: u8 = 3;
    pub const CHAIN: u8 = 4;

    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: Self::INPUT,
            message: message.into(),
        }
    }

    /// Maps a library error: non-positive-definite systems are numerical
    /// failures, everything else is bad input.
    pub fn from_core(context: &str, err: scalemix::Error) -> Self {
        let code = match err {
            scalemix::Error::NotPositiveDefinite { .. } => Self::NUMERICAL,
            _ => Self::INPUT,
        };
        Self {
            code,
            message: format!("{context}: {err}"),
        }
    }

    pub fn chain(err: scalemix::Error) -> Self {
        Self {
            code: Self::CHAIN,
            message: format!("chain failed: {err}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "scalemix",
    version,
    about = "Structured Gaussian sampling and horseshoe regression"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Fast,
    Baseline,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CovArg {
    Ind,
    Cs,
    Toep,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SignalArg {
    Strong,
    Weak,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw from N(μ, Σ) with Σ = (ΦᵀΦ + D⁻¹)⁻¹ and μ = ΣΦᵀα.
    Sample {
        /// n×p matrix Φ.
        phi: PathBuf,
        /// One row of p entries (diagonal D) or a p×p SPD matrix.
        d: PathBuf,
        /// α as one column or one row of n entries.
        alpha: PathBuf,
        #[arg(long, default_value_t = 1000)]
        draws: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Fast)]
        method: MethodArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a horseshoe linear regression by Gibbs sampling.
    Fit {
        /// n×p design matrix.
        x: PathBuf,
        /// Response as one column or one row of n entries.
        y: PathBuf,
        #[arg(long, default_value_t = 6000)]
        iters: usize,
        #[arg(long, default_value_t = 1000)]
        burnin: usize,
        #[arg(long, default_value_t = 1)]
        thin: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hold σ at this value instead of sampling it.
        #[arg(long)]
        fixed_sigma: Option<f64>,
        /// Output prefix; writes `<prefix>_summary.csv`.
        #[arg(long)]
        out: String,
        /// Also write every kept draw to `<prefix>_draws.csv`.
        #[arg(long)]
        write_draws: bool,
    },
    /// Run simulation replicates and write per-replicate and aggregate metrics.
    Simulate {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 500)]
        p: usize,
        #[arg(long, default_value_t = 1.5)]
        sigma: f64,
        #[arg(long, value_enum, default_value_t = CovArg::Ind)]
        cov: CovArg,
        #[arg(long, value_enum, default_value_t = SignalArg::Strong)]
        signal: SignalArg,
        #[arg(long, default_value_t = 5)]
        sparsity: usize,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, default_value_t = 3000)]
        iters: usize,
        #[arg(long, default_value_t = 1000)]
        burnin: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time the fast and baseline samplers over a grid of sizes.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "50")]
        n_grid: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "250,500,1000,2000")]
        p_grid: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sample {
            phi,
            d,
            alpha,
            draws,
            seed,
            method,
            out,
        } => commands::sample(&phi, &d, &alpha, draws, seed, method, &out),
        Command::Fit {
            x,
            y,
            iters,
            burnin,
            thin,
            seed,
            fixed_sigma,
            out,
            write_draws,
        } => {
            let cfg = scalemix::ChainConfig {
                n_iter: iters,
                burn_in: burnin,
                thin,
                seed,
                fixed_sigma,
            };
            commands::fit(&x, &y, &cfg, &out, write_draws)
        }
        Command::Simulate {
            n,
            p,
            sigma,
            cov,
            signal,
            sparsity,
            reps,
            iters,
            burnin,
            seed,
            threads,
            out,
        } => {
            let design = commands::sim_design(n, p, sigma, cov, signal, sparsity, reps);
            let cfg = scalemix::ChainConfig {
                n_iter: iters,
                burn_in: burnin,
                thin: 1,
                seed,
                fixed_sigma: None,
            };
            commands::simulate(&design, &cfg, threads, &out)
        }
        Command::Bench {
            n_grid,
            p_grid,
            reps,
            seed,
            out,
        } => commands::bench(&n_grid, &p_grid, reps, seed, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
