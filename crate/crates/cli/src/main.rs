use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Rate regions and random-coding simulations for superposition coding
/// with binning.
///
/// Typicality uses an absolute L1 radius: a sequence is typical for P when
/// the L1 distance between its type and P is at most epsilon.
#[derive(Parser)]
#[command(name = "supbin", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment file.
    Run {
        /// JSON experiment file.
        config: PathBuf,
        /// Directory for result.json, error.json and CSV outputs.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; results do not depend on this.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print each scheme name with its rate symbols.
    ListSchemes,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListSchemes => {
            print!("{}", supbin_cli::list_schemes());
            ExitCode::SUCCESS
        }
        Command::Run { config, out, threads } => {
            if let Some(k) = threads {
                if k == 0 {
                    eprintln!("error: --threads must be positive");
                    return ExitCode::from(supbin_cli::EXIT_INVALID as u8);
                }
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
                    eprintln!("error: cannot start {k} worker threads: {e}");
                    return ExitCode::from(supbin_cli::EXIT_FAILED as u8);
                }
            }
            ExitCode::from(supbin_cli::run_to_exit_code(&config, &out) as u8)
        }
    }
}
