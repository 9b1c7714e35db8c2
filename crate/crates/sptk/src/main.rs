use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sptk::cli;

#[derive(Parser)]
#[command(
    name = "sptk",
    about = "Two-time-scale analysis of coupled fast/slow linear systems",
    version
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the slow/fast decomposition (M, reduced generator, quasi-steady map)
    Decompose {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize the Lyapunov certificate and the stability threshold eps_star
    Certify {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the full stiff closed loop; CSV with the functional column
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an epsilon sweep and fit the log-log scaling slope
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("SPTK_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                // Ignore the error if a pool already exists.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: SPTK_THREADS must be a positive integer");
                return ExitCode::from(cli::EXIT_ERROR as u8);
            }
        }
    }

    let args = Args::parse();
    let result = match &args.command {
        Command::Decompose { config, out } => cli::cmd_decompose(config, out.as_deref()),
        Command::Certify { config, out } => cli::cmd_certify(config, out.as_deref()),
        Command::Simulate { config, out } => cli::cmd_simulate(config, out.as_deref()),
        Command::Sweep { config, out } => cli::cmd_sweep(config, out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(cli::exit_code_for(&err) as u8)
        }
    }
}
