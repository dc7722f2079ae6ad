use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use seclab_cli::{exit_code, generate_corpus, parse_manifest, render_all, run_all, serialize, RunConfig};

#[derive(Parser)]
#[command(name = "seclab", version, about = "Sections of finite group extensions and their local-global behaviour")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Run every job of a manifest.
    Run {
        manifest: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Leave out the per-job elapsed time.
        #[arg(long)]
        no_timing: bool,
        /// Order bound for randomly generated instances.
        #[arg(long, default_value_t = 24)]
        max_order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print a generated corpus manifest.
    Gen {
        #[arg(long)]
        max_order: usize,
        #[arg(long)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { manifest, format, no_timing, max_order, seed } => {
            let text = match std::fs::read_to_string(&manifest) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("seclab: cannot read {}: {e}", manifest.display());
                    return ExitCode::from(1);
                }
            };
            let parsed = match parse_manifest(&text) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("seclab: {}:{e}", manifest.display());
                    return ExitCode::from(1);
                }
            };
            let config = RunConfig { seed, max_order, timing: !no_timing };
            let reports = run_all(&parsed, &config);
            print!("{}", render_all(&reports, matches!(format, Format::Structured)));
            ExitCode::from(exit_code(&reports) as u8)
        }
        Command::Gen { max_order, seed } => match generate_corpus(max_order, seed) {
            Ok(m) => {
                print!("{}", serialize(&m));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("seclab: {e}");
                ExitCode::from(1)
            }
        },
    }
}
