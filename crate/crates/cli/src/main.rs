//! `xrpm` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or parse failure, 2 validation or model error.

mod commands;
mod output;
mod sweep;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Analytical latency, energy and AoI models for edge-assisted XR pipelines.
#[derive(Debug, Parser)]
#[command(name = "xrpm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Output directory; the XRPM_OUT environment variable takes precedence.
    #[arg(long, default_value = "xrpm-out")]
    out: PathBuf,
    /// Coefficient set: `paper`, a registered name, or a JSON file.
    #[arg(long, default_value = "paper")]
    coefficients: String,
    /// Directory holding registered coefficient sets.
    #[arg(long, default_value = "coefficients")]
    registry: PathBuf,
}

impl Common {
    fn out_dir(&self) -> PathBuf {
        match std::env::var_os("XRPM_OUT") {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.out.clone(),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a scenario against every model constraint.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Latency, energy and AoI for a range of frames.
    Evaluate {
        #[arg(long)]
        scenario: PathBuf,
        /// Half-open frame range `a..b`; defaults to all frames of the scenario.
        #[arg(long)]
        frames: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Re-evaluate one frame for each value of a scenario parameter.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// Dotted path of the swept field, e.g. `device.allocation.cpu_clock`.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, conflicts_with = "range", required_unless_present = "range")]
        values: Option<String>,
        /// `start:stop:step`, stop inclusive.
        #[arg(long)]
        range: Option<String>,
        /// Frame evaluated at each point.
        #[arg(long, default_value_t = 0)]
        frame: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run the discrete-event oracle and compare with the analytic model.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum)]
        mode: SimMode,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Customers (mm1) or requests per sensor (aoi).
        #[arg(long)]
        horizon: Option<usize>,
        /// Buffer class simulated in mm1 mode.
        #[arg(long, value_enum, default_value_t = BufferClass::External)]
        buffer: BufferClass,
        /// Leading customers dropped from mm1 statistics.
        #[arg(long, default_value_t = 0)]
        warmup: usize,
        #[arg(long, value_enum, default_value_t = Policy::PaperMapping)]
        policy: Policy,
        /// Draw buffer sojourns instead of using the mean.
        #[arg(long)]
        stochastic: bool,
        /// Frame whose timing defines the AoI request ticks.
        #[arg(long, default_value_t = 0)]
        frame: usize,
        /// Also write the event log as newline-delimited JSON.
        #[arg(long)]
        event_log: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Fit a linear model from a measurement CSV.
    Fit {
        #[arg(long)]
        csv: PathBuf,
        /// Registry slot (compute_cpu, compute_gpu, power_cpu, power_gpu,
        /// encoding, cnn_complexity) or `generic` to regress on every other column.
        #[arg(long)]
        model: String,
        #[arg(long)]
        target: String,
        /// Save a coefficient set with this slot replaced under the given name.
        #[arg(long)]
        register: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimMode {
    Mm1,
    Aoi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BufferClass {
    Frame,
    Volumetric,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Policy {
    PaperMapping,
    FreshestAvailable,
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable input or unwritable output.
    Input(String),
    /// Scenario or model rejected the input.
    Model(String),
}

impl CliError {
    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Model(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Model(m) => f.write_str(m),
        }
    }
}

impl From<xrpm::Error> for CliError {
    fn from(err: xrpm::Error) -> Self {
        use xrpm::Error as E;
        match err {
            E::UnstableQueue { .. }
            | E::NoEdgeConfigured
            | E::EmptyUpdates
            | E::DegenerateAoi(_)
            | E::RankDeficient { .. }
            | E::InsufficientData { .. }
            | E::InvalidScenario(_) => CliError::Model(err.to_string()),
            E::UnknownColumn(_) | E::Parse(_) | E::Json(_) | E::Csv(_) | E::Io(_) => {
                CliError::Input(err.to_string())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { scenario, common } => commands::validate(scenario, common),
        Command::Evaluate { scenario, frames, common } => {
            commands::evaluate(scenario, frames.as_deref(), common)
        }
        Command::Sweep { scenario, param, values, range, frame, common } => {
            commands::sweep(scenario, param, values.as_deref(), range.as_deref(), *frame, common)
        }
        Command::Simulate {
            scenario,
            mode,
            seed,
            horizon,
            buffer,
            warmup,
            policy,
            stochastic,
            frame,
            event_log,
            common,
        } => commands::simulate(
            scenario,
            &commands::SimulateArgs {
                mode: *mode,
                seed: *seed,
                horizon: *horizon,
                buffer: *buffer,
                warmup: *warmup,
                policy: *policy,
                stochastic: *stochastic,
                frame: *frame,
                event_log: *event_log,
            },
            common,
        ),
        Command::Fit { csv, model, target, register, common } => {
            commands::fit(csv, model, target, register.as_deref(), common)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
