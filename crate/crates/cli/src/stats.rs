use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use snnbench::engine::RecordMetadata;
use snnbench::metrics::{raster_export, write_raster_csv, RateStats};
use snnbench::SpikeRecord;

use crate::output::{read_json, write_atomic, write_json};

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Spike file written by `simulate`
    #[arg(long)]
    spikes: PathBuf,
    /// Metadata sidecar; defaults to spikes.meta.json next to the spike file
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Fraction of each population shown in the raster
    #[arg(long, default_value_t = 0.6)]
    fraction: f64,
    /// Raster window length, ms
    #[arg(long, default_value_t = 200.0)]
    window_ms: f64,
    /// Raster window start, ms; the start of the record when omitted
    #[arg(long)]
    t0_ms: Option<f64>,
    /// Seed of the raster neuron selection
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving stats.json and raster.csv
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

pub fn run(args: &StatsArgs) -> Result<()> {
    let meta_path = args
        .meta
        .clone()
        .unwrap_or_else(|| args.spikes.with_file_name("spikes.meta.json"));
    let meta: RecordMetadata = read_json(&meta_path)?;
    let file =
        File::open(&args.spikes).with_context(|| format!("reading {}", args.spikes.display()))?;
    let record = SpikeRecord::read_tsv(BufReader::new(file), meta)?;

    let stats = RateStats::compute(&record)?;
    let t0 = args.t0_ms.unwrap_or(record.window_ms().0);
    let rows = raster_export(&record, args.fraction, (t0, t0 + args.window_ms), args.seed)?;
    let mut csv = Vec::new();
    write_raster_csv(&rows, record.h, &mut csv)?;

    write_json(&args.out_dir.join("stats.json"), &stats)?;
    write_atomic(&args.out_dir.join("raster.csv"), &csv)?;
    for r in &stats.rates {
        match r.rate {
            Some(rate) => println!("{} {rate:.3} Hz", r.name),
            None => println!("{} empty", r.name),
        }
    }
    Ok(())
}
