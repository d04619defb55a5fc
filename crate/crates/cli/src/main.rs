//! `dex-arb`: solve, verify and explore the gas-fee competition equilibrium,
//! and replay the swap classification pipeline on CSV fixtures.
//!
//! Exit codes: 0 success, 2 invalid input or configuration, 3 no equilibrium
//! (no-trade market or solver failure), 4 verification checks failed.

mod commands;
mod error;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "dex-arb", version, about = "Gas-fee competition between two AMM arbitrageurs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the symmetric equilibrium of one market.
    Solve {
        /// JSON with a `market` object and an optional `solver` object.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a solution against best deviations, Monte Carlo play and fictitious play.
    Verify {
        /// `solution.json` written by `solve`.
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Gas-fee points of the best-deviation grid.
        #[arg(long, default_value_t = 200)]
        gas_grid: usize,
        /// Amount points of the best-deviation grid.
        #[arg(long, default_value_t = 200)]
        amount_grid: usize,
        #[arg(long, default_value_t = 100_000)]
        mc_samples: u64,
        /// Fictitious-play iterations; 0 skips the oracle.
        #[arg(long, default_value_t = 100_000)]
        oracle_iterations: u64,
    },
    /// Comparative statics along one parameter.
    Sweep {
        /// JSON with `market`, optional `solver`, `varying`
        /// (`base_gas_fee`, `liquidity` or `opportunity`) and `grid`.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tables behind the opportunity figures.
    Figures {
        /// Optional JSON with a template `market` and `solver`.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Opportunity grid, `start:stop:step` or a comma-separated list.
        #[arg(long, default_value = "1.1:3.0:0.1")]
        o_grid: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify swaps and compute the empirical tables and regressions.
    Analyze {
        #[arg(long)]
        blocks: PathBuf,
        #[arg(long)]
        swaps: PathBuf,
        /// Optional JSON overriding fee rate, gas estimate and quote tolerance.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { config, out } => commands::solve(&config, &out),
        Command::Verify {
            solution,
            out,
            seed,
            gas_grid,
            amount_grid,
            mc_samples,
            oracle_iterations,
        } => commands::verify(
            &solution,
            &out,
            commands::VerifyOptions {
                seed,
                gas_grid,
                amount_grid,
                mc_samples,
                oracle_iterations,
            },
        ),
        Command::Sweep { config, out } => commands::sweep(&config, &out),
        Command::Figures { config, o_grid, out } => commands::figures(config.as_deref(), &o_grid, &out),
        Command::Analyze {
            blocks,
            swaps,
            config,
            out,
        } => commands::analyze(&blocks, &swaps, config.as_deref(), &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
