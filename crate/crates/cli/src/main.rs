//! `snnbench` command-line driver.
//!
//! Exit status: 0 on success, 1 when the inputs are well-formed but cannot
//! be processed (invalid spec, window outside the data, ...), 2 on usage
//! errors.

mod energy;
mod output;
mod placement;
mod report;
mod simulate;
mod stats;
mod sweep;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use snnbench::Scheme;

#[derive(Debug, Parser)]
#[command(
    name = "snnbench",
    version,
    about = "Spiking network simulation and benchmarking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a network and write its spikes, timers and realtime factor
    Simulate(simulate::SimulateArgs),
    /// Run a strong-scaling sweep and write the scaling table
    Sweep(sweep::SweepArgs),
    /// Print the cores a placement scheme pins threads to
    Placement(placement::PlacementArgs),
    /// Integrate a power log and report energy per synaptic event
    Energy(energy::EnergyArgs),
    /// Firing rates, ISI variability and a raster sample of a spike file
    Stats(stats::StatsArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SchemeArg {
    Sequential,
    Distant,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Sequential => Scheme::Sequential,
            SchemeArg::Distant => Scheme::Distant,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => simulate::run(a),
        Command::Sweep(a) => sweep::run(a),
        Command::Placement(a) => placement::run(a),
        Command::Energy(a) => energy::run(a),
        Command::Stats(a) => stats::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
