//! Thin command-line front end over the library.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage or I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mmie::cli::{self, OutputFormat, RunSpec};
use mmie::engine::EngineConfig;

#[derive(Parser)]
#[command(
    name = "mmie",
    version,
    about = "Multi-mode inference engine simulator and performance model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct NetworkArgs {
    /// Built-in network name (alexnet, vgg16, resnet50) or descriptor path
    #[arg(long)]
    network: String,
    /// Layer selection, e.g. 3, 1-5 or 1,4,7 (1-based)
    #[arg(long)]
    layers: Option<String>,
    /// Output format: text, json or csv
    #[arg(long, default_value = "text")]
    format: String,
    /// Channel subsampling divisor for reduced-scale simulation
    #[arg(long, default_value_t = 1)]
    scale: usize,
    /// Write output to this path as well as stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for generated layer data
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Analytical per-layer and whole-network report
    Report {
        #[command(flatten)]
        net: NetworkArgs,
        /// Append deltas against the embedded published figures
        #[arg(long)]
        compare: bool,
    },
    /// Run the cycle-accurate engine on seeded random data
    Simulate {
        #[command(flatten)]
        net: NetworkArgs,
    },
    /// Check engine outputs against the fixed-point reference and
    /// measured cycles against the analytical model
    Validate {
        #[command(flatten)]
        net: NetworkArgs,
    },
    /// Print the schedule matrix grid for a (w_f, s, n) pass
    Schedule {
        w_f: usize,
        s: usize,
        n: usize,
        /// Write the grid to this path as well as stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run_spec(net: &NetworkArgs) -> Result<RunSpec, mmie::Error> {
    Ok(RunSpec {
        network: net.network.clone(),
        layers: net
            .layers
            .as_deref()
            .map(cli::parse_layer_range)
            .transpose()?,
        format: net.format.parse::<OutputFormat>()?,
        compare: false,
        scale: net.scale,
        out: net.out.clone(),
        seed: net.seed,
    })
}

fn run() -> Result<ExitCode, mmie::Error> {
    let cli = Cli::parse();
    let engine = EngineConfig::default();
    match cli.command {
        Command::Report { net, compare } => {
            let mut spec = run_spec(&net)?;
            spec.compare = compare;
            print!("{}", cli::cmd_report(&spec, &engine)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { net } => {
            let spec = run_spec(&net)?;
            print!("{}", cli::cmd_simulate(&spec, &engine)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { net } => {
            let spec = run_spec(&net)?;
            let summary = cli::cmd_validate(&spec, &engine)?;
            let body = match spec.format {
                OutputFormat::Json => serde_json::to_string_pretty(&summary)?,
                _ => summary.to_text(),
            };
            if let Some(path) = &spec.out {
                std::fs::write(path, &body)?;
            }
            print!("{body}");
            Ok(if summary.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Schedule { w_f, s, n, out } => {
            let grid = cli::cmd_schedule(w_f, s, n)?;
            if let Some(path) = &out {
                std::fs::write(path, &grid)?;
            }
            print!("{grid}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
