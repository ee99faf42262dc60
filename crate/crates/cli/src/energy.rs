use std::fs::File;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use snnbench::metrics::{
    align_power, energy_per_synaptic_event, integrate_energy, read_power_csv, EnergyReport,
    DEVICE_DELAY_S, REPORT_SCHEMA_VERSION,
};

use crate::output::{read_json, write_json};
use crate::report::RunReport;

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("events_source").required(true).args(["events", "run_dir"]))]
pub struct EnergyArgs {
    /// Power log: `epoch_seconds,watts` rows at 1 Hz
    #[arg(long)]
    power: PathBuf,
    /// Idle power subtracted from every reading, W
    #[arg(long, default_value_t = 0.0)]
    baseline: f64,
    /// Seconds the readings lag behind the load
    #[arg(long, default_value_t = DEVICE_DELAY_S, allow_negative_numbers = true)]
    shift: i64,
    /// Window start, Unix seconds; taken from the run directory when omitted
    #[arg(long)]
    t0: Option<f64>,
    /// Window end, Unix seconds; taken from the run directory when omitted
    #[arg(long)]
    t1: Option<f64>,
    /// Number of synaptic events in the window
    #[arg(long)]
    events: Option<u64>,
    /// Output directory of a `simulate` run; supplies the event count and window
    #[arg(long)]
    run_dir: Option<PathBuf>,
    /// Report destination
    #[arg(long, default_value = "energy.json")]
    out: PathBuf,
}

pub fn run(args: &EnergyArgs) -> Result<()> {
    let file =
        File::open(&args.power).with_context(|| format!("reading {}", args.power.display()))?;
    let trace = read_power_csv(file)?;
    let run: Option<RunReport> = args
        .run_dir
        .as_ref()
        .map(|dir| read_json(&dir.join("timers.json")))
        .transpose()?;
    let events = match (&run, args.events) {
        (_, Some(n)) => n,
        (Some(r), None) => r.counts.synaptic_events_delivered,
        (None, None) => unreachable!("clap requires one of --events and --run-dir"),
    };
    let t0 = args.t0.or(run.as_ref().map(|r| r.wall_start));
    let t1 = args.t1.or(run.as_ref().map(|r| r.wall_end));
    let (Some(t0), Some(t1)) = (t0, t1) else {
        bail!("the integration window needs --t0 and --t1 or --run-dir");
    };

    let aligned = align_power(&trace, args.shift);
    let e_total = integrate_energy(&aligned, t0, t1, 0.0)?;
    let e_net = integrate_energy(&aligned, t0, t1, args.baseline)?;
    let report = EnergyReport {
        schema_version: REPORT_SCHEMA_VERSION,
        e_total,
        e_baseline_subtracted: e_net,
        synaptic_events: events,
        e_per_event: energy_per_synaptic_event(e_net, events)?,
        baseline: args.baseline,
        window: [t0, t1],
        shift_s: args.shift,
    };
    write_json(&args.out, &report)?;
    println!("e_per_event {} J", report.e_per_event);
    Ok(())
}
