use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use radlab_cli::{run, Command, Overrides, RunConfig};

/// Radial fractional calculus lab: transforms, potentials, derivatives,
/// inequality sweeps and ball expansions.
#[derive(Debug, Parser)]
#[command(name = "radlab", version)]
struct Args {
    command: Command,
    /// Run configuration (TOML, or JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
    /// Seed for randomized family jitter.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match (&args.config, args.command) {
        (Some(p), _) => RunConfig::load(p),
        (None, Command::Selftest) => Ok(RunConfig::default()),
        (None, _) => Err(radlab_cli::CliError::config("--config is required")),
    };
    let result = config.and_then(|c| run(args.command, c, &args.out, &Overrides { threads: args.threads, seed: args.seed }));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("radlab {}: {e}", args.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
