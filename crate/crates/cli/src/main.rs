use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use iiot_energy_cli::{parse_scenario, run_scenario, CliError, Kind, RunError};

/// Energy and latency experiments for IoT edge learning, placement and ledgers.
#[derive(Parser)]
#[command(name = "iiot-energy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a `learning` scenario.
    Learn(Target),
    /// Run a `placement` scenario.
    Place(Target),
    /// Run a `radio-dlt` scenario.
    Radio(Target),
    /// Run an `integrated` scenario.
    Integrated(Target),
}

#[derive(Args)]
struct Target {
    /// Scenario file.
    #[arg(long)]
    scenario: PathBuf,
    /// Replaces the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Replaces the scenario's output directory.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, kind, target) = match &cli.command {
        Command::Learn(t) => ("learn", Kind::Learning, t),
        Command::Place(t) => ("place", Kind::Placement, t),
        Command::Radio(t) => ("radio", Kind::RadioDlt, t),
        Command::Integrated(t) => ("integrated", Kind::Integrated, t),
    };
    match execute(command, kind, target) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: &'static str, kind: Kind, target: &Target) -> Result<Vec<PathBuf>, CliError> {
    let mut scenario = parse_scenario(&target.scenario)?;
    if let Some(seed) = target.seed {
        scenario = scenario.with_seed(seed)?;
    }
    if let Some(out) = &target.output {
        scenario = scenario.with_output(out.clone());
    }
    if scenario.kind() != kind {
        return Err(RunError::WrongKind {
            command,
            expected: kind.name(),
            found: scenario.kind().name(),
        }
        .into());
    }
    Ok(run_scenario(&scenario)?)
}
