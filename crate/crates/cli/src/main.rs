use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ergocap_cli::commands::{cmd_bosonic_gap, cmd_ergotropy, cmd_sweep, SweepOverrides};
use ergocap_cli::config::parse_levels;

#[derive(Parser)]
#[command(
    name = "ergocap",
    version,
    about = "Work-extraction capacitances of noisy quantum batteries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Output ergotropy curves, their envelopes and the gap for one channel.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Grid intervals on [0, e_max]; overrides `grid_size`.
        #[arg(long)]
        grid: Option<usize>,
        /// Multiplies every reported energy.
        #[arg(long)]
        unit_scale: Option<f64>,
    },
    /// Two-mode attenuator gap as a function of inverse temperature.
    BosonicGap {
        #[arg(long, allow_negative_numbers = true)]
        beta_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        unit_scale: f64,
    },
    /// Energy, ergotropy and total ergotropy of a state.
    Ergotropy {
        #[arg(long)]
        state: PathBuf,
        /// Comma-separated eigenvalues.
        #[arg(long, value_parser = levels, default_value = "0,1,2")]
        hamiltonian: Levels,
    },
}

#[derive(Clone)]
struct Levels(Vec<f64>);

fn levels(s: &str) -> Result<Levels, String> {
    parse_levels(s).map(Levels)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Sweep {
            config,
            out,
            jobs,
            seed,
            grid,
            unit_scale,
        } => cmd_sweep(
            &config,
            &out,
            &SweepOverrides {
                jobs,
                seed,
                grid,
                unit_scale,
            },
        ),
        Command::BosonicGap {
            beta_min,
            beta_max,
            steps,
            out,
            unit_scale,
        } => cmd_bosonic_gap(beta_min, beta_max, steps, &out, unit_scale),
        Command::Ergotropy { state, hamiltonian } => {
            cmd_ergotropy(&state, &hamiltonian.0).map(|s| print!("{s}"))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
