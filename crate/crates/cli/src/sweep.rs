use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use snnbench::bench::{emit_scaling_table, run_sweep, BenchmarkConfig};

use crate::output::{read_json, relative_to, write_atomic};
use crate::SchemeArg;

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Benchmark config (JSON); relative paths inside it resolve against its directory
    #[arg(long)]
    config: PathBuf,
    /// Replaces the thread counts, e.g. 1,2,4,8
    #[arg(long, value_delimiter = ',')]
    threads: Option<Vec<usize>>,
    /// Replaces the placement scheme
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Replaces the model time, in seconds
    #[arg(long)]
    model_time: Option<f64>,
    /// Replaces the number of repetitions per thread count
    #[arg(long)]
    repetitions: Option<usize>,
    /// Scaling table destination; standard output when neither this nor the config names one
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: &SweepArgs) -> Result<()> {
    let mut cfg: BenchmarkConfig = read_json(&args.config)?;
    cfg.spec = relative_to(&args.config, &cfg.spec);
    if let Some(threads) = &args.threads {
        cfg.threads = threads.clone();
    }
    if let Some(scheme) = args.scheme {
        cfg.scheme = scheme.into();
    }
    if let Some(t) = args.model_time {
        cfg.t_model = Some(t);
    }
    if let Some(r) = args.repetitions {
        cfg.repetitions = r;
    }
    let rows = run_sweep(&cfg)?;
    for row in &rows {
        match &row.error {
            Some(e) => eprintln!("{} threads, rep {}: failed: {e}", row.n_threads, row.rep),
            None => eprintln!(
                "{} threads, rep {}: rtf {:.4}",
                row.n_threads, row.rep, row.rtf
            ),
        }
    }
    let doc = emit_scaling_table(&rows);
    let dest = args
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(|p| relative_to(&args.config, p)));
    match dest {
        Some(path) => write_atomic(&path, doc.as_bytes())?,
        None => print!("{doc}"),
    }
    Ok(())
}
