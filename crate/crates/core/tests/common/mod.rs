#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use snnbench::model::{
    ConnectionRule, NetworkSpec, NeuronParams, PopulationSpec, Sign, SimulationGrid,
};

pub fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

pub fn population(name: &str, size: u64, ext_indegree: u64) -> PopulationSpec {
    PopulationSpec {
        name: name.into(),
        size,
        params: NeuronParams::default(),
        ext_rate: 8.0,
        ext_indegree,
        ext_weight: 87.81,
        dc_current: 0.0,
    }
}

pub fn rule(source: &str, target: &str, total: u64, sign: Sign) -> ConnectionRule {
    let (w, d) = match sign {
        Sign::Excitatory => (87.81, 1.5),
        Sign::Inhibitory => (-5.0 * 87.81, 0.8),
    };
    ConnectionRule {
        source: source.into(),
        target: target.into(),
        total_synapses: total,
        weight_mean: w,
        weight_sd: 0.1 * w.abs(),
        delay_mean: d,
        delay_sd: d / 2.0,
        sign,
    }
}

/// Random network of `n` neurons (80 % excitatory) with `synapses`
/// synapses split evenly over the four population pairs by source share.
pub fn balanced_network(n: u64, synapses: u64, t_model_ms: f64, seed: u64) -> NetworkSpec {
    let ne = n * 4 / 5;
    let ni = n - ne;
    let se = synapses * 4 / 5;
    let si = synapses - se;
    NetworkSpec {
        grid: SimulationGrid {
            h: 0.1,
            t_model: t_model_ms,
            t_transient: 100.0,
            min_delay: 0.1,
            max_delay: 5.0,
        },
        populations: vec![population("E", ne, 950), population("I", ni, 900)],
        connections: vec![
            rule("E", "E", se * 4 / 5, Sign::Excitatory),
            rule("E", "I", se - se * 4 / 5, Sign::Excitatory),
            rule("I", "E", si * 4 / 5, Sign::Inhibitory),
            rule("I", "I", si - si * 4 / 5, Sign::Inhibitory),
        ],
        seed,
    }
}
