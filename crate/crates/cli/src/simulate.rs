use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use snnbench::engine::RunOptions;
use snnbench::metrics::RtfReport;
use snnbench::model::load_network_spec_file;
use snnbench::{
    build_connectivity, run_simulation, validate, Error, NetworkSpec, PlacementPlan, RunOutput,
    Scalar, TopologyModel,
};

use crate::output::{write_atomic, write_json};
use crate::report::{RunReport, RUN_REPORT_SCHEMA_VERSION};
use crate::SchemeArg;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Precision {
    F32,
    F64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Network spec (JSON)
    #[arg(long)]
    spec: PathBuf,
    /// Worker threads (virtual processes)
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Replaces the spec's seed
    #[arg(long)]
    seed: Option<u64>,
    /// Replaces the spec's model time, in seconds
    #[arg(long)]
    model_time: Option<f64>,
    /// Pin workers with this placement scheme on the default topology
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Floating-point precision of the neuron state and weights
    #[arg(long, value_enum, default_value = "f64")]
    precision: Precision,
    /// Directory receiving spikes.tsv, spikes.meta.json, timers.json and rtf.json
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn simulate<T: Scalar>(
    spec: &NetworkSpec,
    n_vp: usize,
    plan: Option<&PlacementPlan>,
) -> snnbench::Result<RunOutput> {
    let table = build_connectivity::<T>(spec, n_vp)?;
    let opts = RunOptions {
        placement: plan,
        ..RunOptions::new(n_vp)
    };
    run_simulation(spec, &table, &opts)
}

pub fn run(args: &SimulateArgs) -> Result<()> {
    let mut spec = load_network_spec_file(&args.spec)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(t) = args.model_time {
        spec.grid.t_model = t * 1000.0;
    }
    validate(&spec).map_err(Error::Invalid)?;
    let plan = args
        .scheme
        .map(|s| PlacementPlan::new(&TopologyModel::default(), s.into(), args.threads))
        .transpose()?;

    let out = match args.precision {
        Precision::F64 => simulate::<f64>(&spec, args.threads, plan.as_ref())?,
        Precision::F32 => simulate::<f32>(&spec, args.threads, plan.as_ref())?,
    };
    let t_model = spec.grid.t_model / 1000.0;
    let rtf = RtfReport::new(&out.timers, t_model)?;

    let mut spikes = Vec::new();
    out.record.write_tsv(&mut spikes)?;
    write_atomic(&args.out_dir.join("spikes.tsv"), &spikes)?;
    write_json(
        &args.out_dir.join("spikes.meta.json"),
        &out.record.metadata(),
    )?;
    let report = RunReport {
        schema_version: RUN_REPORT_SCHEMA_VERSION,
        n_vp: out.n_vp,
        precision: format!("{:?}", args.precision).to_lowercase(),
        pinned: out.pinned,
        t_model,
        wall_start: out.wall_start,
        wall_end: out.wall_end,
        timers: out.timers,
        counts: out.counts,
    };
    write_json(&args.out_dir.join("timers.json"), &report)?;
    write_json(&args.out_dir.join("rtf.json"), &rtf)?;
    println!("rtf {}", rtf.rtf);
    Ok(())
}
