//! `fracsys`: run the constants, profile, solver and verification experiments
//! from a TOML config.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 configuration error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "fracsys", version, about = "Fractional coupled-system experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML experiment config; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    dimension: Option<usize>,
    /// Fractional order.
    #[arg(long, global = true)]
    s: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// 1 for the subcritical problem, 0 for the critical one.
    #[arg(long, global = true)]
    gamma: Option<u8>,
    /// Points per axis (a power of two, at least 16).
    #[arg(long, global = true)]
    grid_size: Option<usize>,
    #[arg(long, global = true)]
    box_length: Option<f64>,
    /// Quotient minimization tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Sobolev constants, their ratio, the convexity radius and the threshold.
    Constants {
        /// Also write a closed-form sweep over alpha with alpha + beta fixed.
        #[arg(long, num_args = 0..=1, default_missing_value = "50")]
        sweep: Option<usize>,
    },
    /// Extremal profile of the critical problem and its tail fit.
    Bubble,
    /// Ground state of the scalar subcritical equation with p = alpha + beta.
    GroundState,
    /// Minimize the coupled energy in the convexity ball.
    Solve {
        /// Bisection steps for the empirical forcing threshold.
        #[arg(long)]
        bisect: Option<usize>,
        /// Extra solves from seeded random starts, to check uniqueness.
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Run every invariant check and print one PASS/FAIL line per check.
    Verify {
        /// Replace a library routine by a deliberately wrong one.
        #[arg(long, hide = true)]
        inject_fault: Option<Fault>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fault {
    Multiplier,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = cli.common;
    let overrides = Overrides {
        dimension: c.dimension,
        s: c.s,
        alpha: c.alpha,
        beta: c.beta,
        gamma: c.gamma,
        grid_size: c.grid_size,
        box_length: c.box_length,
        tol: c.tol,
        max_iter: c.max_iter,
        output: c.output,
        seed: c.seed,
    };
    let mut cfg = match ExperimentConfig::load(c.config.as_deref(), &overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Constants { sweep } => commands::constants(&cfg, sweep),
        Command::Bubble => commands::bubble(&cfg),
        Command::GroundState => commands::ground_state(&cfg),
        Command::Solve { bisect, restarts } => {
            if let Some(b) = bisect {
                cfg.solve.bisect = b;
            }
            if let Some(r) = restarts {
                cfg.solve.restarts = r;
            }
            commands::solve(&cfg)
        }
        Command::Verify { inject_fault } => commands::verify(&cfg, inject_fault.is_some()),
    };
    match result {
        Ok(commands::Outcome::Ok) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Failed(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            let code = commands::exit_code(&e);
            let kind = if code == 2 { "config error" } else { "numerical failure" };
            eprintln!("{kind}: {e:#}");
            ExitCode::from(code)
        }
    }
}
