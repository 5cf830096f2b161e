use std::path::PathBuf;

use clap::Parser;
use pfront_core::cli::{run_cli, Command};

/// Interface dynamics lab for u_t − (|u_x|^{p−2}u_x)_x + b u^β = 0.
#[derive(Parser)]
#[command(name = "pfront", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Experiment file in `key = value` format.
    #[arg(long)]
    config: PathBuf,
    /// Artifact directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { pfront_core::cli::EXIT_CONFIG } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(run_cli(args.command, &args.config, args.out.as_deref()));
}
