use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lcs_cli::{CliError, RunFlags};

/// Locally conformally symplectic scenario runner.
///
/// The worker count of the numerical kernels is read from LCS_THREADS.
#[derive(Debug, Parser)]
#[command(name = "lcs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario config; exit 0 if every verdict passes, 1 if one
    /// fails, 2 if the config is unusable.
    Run {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Directory for report.json and checkpoints.csv.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Override the RK4 step count of a moser scenario.
        #[arg(long, value_name = "N")]
        steps: Option<usize>,
        /// Override the samples per axis of a grid-based scenario.
        #[arg(long, value_name = "N")]
        grid: Option<usize>,
        #[arg(long)]
        quiet: bool,
    },
    /// Write a built-in config to a file or to standard output.
    EmitFixture {
        name: String,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// List the built-in configs.
    Fixtures,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("LCS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| CliError::Threads(raw.clone()))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|_| CliError::Threads(raw))
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run {
            config,
            out,
            steps,
            grid,
            quiet,
        } => {
            configure_threads()?;
            let flags = RunFlags {
                out,
                steps,
                grid,
                quiet,
            };
            Ok(lcs_cli::run(&config, &flags)?.report.exit_code())
        }
        Command::EmitFixture { name, out } => {
            let text = lcs_cli::emit_fixture(&name)?;
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|source| CliError::Write { path, source })?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Fixtures => {
            for name in lcs_cli::FIXTURES {
                println!("{name}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("lcs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
