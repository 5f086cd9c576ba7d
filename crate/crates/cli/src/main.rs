//! `oncilla`: run gaits, turns, energy sweeps, gait optimization and SBCP
//! bus tools from the command line.
//!
//! Exit status: 0 on success, 1 for invalid arguments or configuration,
//! 2 when a run fails.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "oncilla", version, about = "Quadruped locomotion toolkit")]
pub struct Cli {
    /// JSON experiment configuration; missing keys take defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed for every random choice; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "ONCILLA_OUT", default_value = "out")]
    pub out: PathBuf,
    /// Suppress the summary on stdout.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate a gait and compute its metrics.
    #[command(subcommand)]
    Gait(GaitCommand),
    /// Simulate a turning gait and report radius and full-turn time.
    Turn(TurnArgs),
    /// Quasi-static power and cost of transport.
    #[command(subcommand)]
    Cot(CotCommand),
    /// Particle swarm search over gait parameters for distance travelled.
    Optimize(OptimizeArgs),
    /// SBCP frame codec and bus simulation.
    #[command(subcommand)]
    Sbcp(SbcpCommand),
}

#[derive(Args, Debug, Clone, Default)]
pub struct RunOverrides {
    /// Simulated time (s).
    #[arg(long)]
    pub duration: Option<f64>,
    /// Simulation step (s).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Locomotion frequency (Hz).
    #[arg(long)]
    pub frequency: Option<f64>,
    /// Step length (m).
    #[arg(long)]
    pub step_length: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum GaitCommand {
    /// Writes trajectory.csv and metrics.csv.
    Run(RunOverrides),
    /// Metrics of an existing trajectory log.
    Metrics {
        /// trajectory.csv from a previous run.
        #[arg(long, value_name = "PATH")]
        log: PathBuf,
        /// Locomotion frequency of the logged gait (Hz); defaults to the config.
        #[arg(long)]
        frequency: Option<f64>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyArg {
    /// Asymmetric step length, set by --varpi.
    Asl,
    /// Abduction/adduction amplitude, set by --yaw-rate.
    Aa,
}

#[derive(Args, Debug)]
pub struct TurnArgs {
    #[arg(long, value_enum)]
    pub strategy: StrategyArg,
    /// Turning factor in [-1, 1] for the asl strategy.
    #[arg(long, allow_hyphen_values = true)]
    pub varpi: Option<f64>,
    /// Desired yaw rate (rad/s) for the aa strategy.
    #[arg(long, allow_hyphen_values = true)]
    pub yaw_rate: Option<f64>,
    #[command(flatten)]
    pub run: RunOverrides,
}

#[derive(Subcommand, Debug)]
pub enum CotCommand {
    /// Writes cot.csv for a list of target speeds.
    Sweep {
        /// Comma-separated speeds (m/s); defaults to the config.
        #[arg(long, value_delimiter = ',')]
        speeds: Option<Vec<f64>>,
    },
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub particles: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum SbcpCommand {
    /// Prints the wire bytes of a frame as hex.
    Encode {
        /// Class id, decimal or 0x-prefixed hex.
        #[arg(long, value_parser = parse_byte)]
        class: u8,
        /// Device id, decimal or 0x-prefixed hex.
        #[arg(long, value_parser = parse_byte)]
        id: u8,
        /// Instruction byte, decimal or 0x-prefixed hex.
        #[arg(long, value_parser = parse_byte)]
        instruction: u8,
        /// Parameter bytes as hex, such as `2402`.
        #[arg(long, default_value = "")]
        params: String,
    },
    /// Decodes one frame given as hex.
    Decode {
        /// Frame bytes, such as `FF10010201FB`.
        hex: String,
    },
    /// Reads two registers from each of N simulated slaves; writes sbcp_trace.csv.
    Demo {
        #[arg(long, default_value_t = 8)]
        slaves: usize,
    },
}

fn parse_byte(s: &str) -> Result<u8, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(h) => u8::from_str_radix(h, 16),
        None => s.parse(),
    };
    r.map_err(|e| format!("{s:?} is not a byte: {e}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
