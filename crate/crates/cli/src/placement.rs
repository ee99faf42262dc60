use anyhow::Result;
use clap::Args;
use snnbench::placement::{first_l3_sharing_index, format_places};
use snnbench::{PlacementPlan, TopologyModel};

use crate::SchemeArg;

#[derive(Debug, Args)]
pub struct PlacementArgs {
    /// Number of worker threads to place
    #[arg(long)]
    threads: usize,
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 2)]
    sockets: usize,
    /// Chiplets per socket
    #[arg(long, default_value_t = 8)]
    chiplets: usize,
    /// Core complexes per chiplet
    #[arg(long, default_value_t = 2)]
    ccx: usize,
    #[arg(long, default_value_t = 4)]
    cores_per_ccx: usize,
}

pub fn run(args: &PlacementArgs) -> Result<()> {
    let topo = TopologyModel::new(args.sockets, args.chiplets, args.ccx, args.cores_per_ccx)?;
    let plan = PlacementPlan::new(&topo, args.scheme.into(), args.threads)?;
    println!("{}", format_places(&plan));
    println!("{}", serde_json::to_string(&plan.cores)?);
    match first_l3_sharing_index(&plan, &topo) {
        Some(i) => eprintln!("thread {i} is the first to share an L3 cache with an earlier thread"),
        None => eprintln!("no two threads share an L3 cache"),
    }
    Ok(())
}
