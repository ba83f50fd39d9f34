//! `pifo-bounds`: build hard instances, run the verification suites, and run
//! solver experiments against them.
//!
//! Exit status: 0 on success, 1 when a check fails, 2 on configuration or
//! parameter-domain errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "pifo-bounds", version, about = "Hard finite-sum instances and their oracle lower bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for seed-parallel work (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Construct an instance and write it as JSON with its certificate.
    Gen {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a property suite: structure, spanjump, minimizers, geo, nonconvex or all.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        /// Directory for report.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Run one algorithm per seed; write one trace CSV per seed and a summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replace the configured seed list by this single seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a grid of experiments and fit the complexity law.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Gen { config, out } => commands::gen(&config, &out),
        Command::Verify { suite, out, seed } => commands::verify(&suite, out.as_deref(), seed),
        Command::Run { config, out, seed } => commands::run(&config, out.as_deref(), seed),
        Command::Sweep { config, out, seed } => commands::sweep(&config, out.as_deref(), seed),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
