use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use ionprobe_cli::commands::{self, Outcome};
use ionprobe_cli::config::{load_file, End2EndArgs, Fig1Args, ProbeCmdArgs, SpectrumArgs};

#[derive(Parser)]
#[command(
    name = "ionprobe",
    version,
    about = "Parity scans and direct-measurement simulations"
)]
struct Cli {
    /// JSON config for the chosen command; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Seed for randomized test states
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Conditioned ⟨C_xy⟩ time series for each N (CSV per N plus an SVG plot)
    Fig1(Fig1Args),
    /// Direct measurement of an observable on a prepared vibrational state
    Probe(ProbeCmdArgs),
    /// Parity scan followed by the probe measurement at gt*
    End2end(End2EndArgs),
    /// Sector eigenvalues of C_xy and L_z
    Spectrum(SpectrumArgs),
}

fn run(cli: &Cli) -> Result<Outcome> {
    let path = cli.config.as_deref();
    let log = &mut io::stdout();
    match &cli.command {
        Command::Fig1(flags) => {
            commands::fig1(&load_file::<Fig1Args>(path)?.overlay(flags), &cli.out, log)
        }
        Command::Probe(flags) => {
            let args = load_file::<ProbeCmdArgs>(path)?.overlay(flags);
            commands::probe(&args, cli.seed, &cli.out, log)
        }
        Command::End2end(flags) => commands::end2end(
            &load_file::<End2EndArgs>(path)?.overlay(flags),
            &cli.out,
            log,
        ),
        Command::Spectrum(flags) => commands::spectrum(
            &load_file::<SpectrumArgs>(path)?.overlay(flags),
            &cli.out,
            log,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) if outcome.bound_failed => {
            eprintln!("error: linearization bound violated");
            ExitCode::from(2)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
