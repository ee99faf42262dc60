use serde::{Deserialize, Serialize};

use crate::dynamics::NeuronId;
use crate::engine::SpikeRecord;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationRate {
    pub name: String,
    pub size: u64,
    pub spikes: u64,
    /// spikes/s; `None` for empty populations
    pub rate: Option<f64>,
    pub excluded: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeuronCv {
    pub neuron: NeuronId,
    pub n_spikes: u64,
    pub cv: f64,
}

/// Firing statistics of one recorded window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateStats {
    pub schema_version: u32,
    /// ms
    pub window: [f64; 2],
    pub rates: Vec<PopulationRate>,
    pub cv: Vec<NeuronCv>,
}

impl RateStats {
    pub fn compute(record: &SpikeRecord) -> Result<Self> {
        let (a, b) = record.window_ms();
        Ok(Self {
            schema_version: super::REPORT_SCHEMA_VERSION,
            window: [a, b],
            rates: population_rates(record)?,
            cv: cv_isi(record),
        })
    }
}

/// Spikes per neuron per second of the recorded window, per population.
pub fn population_rates(record: &SpikeRecord) -> Result<Vec<PopulationRate>> {
    let seconds = record.window_seconds();
    if !(seconds > 0.0) {
        return Err(Error::Domain("recorded window is empty".into()));
    }
    let mut counts = vec![0u64; record.populations.len()];
    for e in &record.events {
        let id = e.neuron as u64;
        let p = record.populations.partition_point(|p| p.end <= id);
        if p < counts.len() {
            counts[p] += 1;
        }
    }
    Ok(record
        .populations
        .iter()
        .zip(counts)
        .map(|(p, spikes)| {
            let size = p.size();
            PopulationRate {
                name: p.name.clone(),
                size,
                spikes,
                rate: (size > 0).then(|| spikes as f64 / (size as f64 * seconds)),
                excluded: size == 0,
            }
        })
        .collect())
}

/// Coefficient of variation of the inter-spike intervals of every neuron
/// with at least three spikes, using the n-1 standard deviation.
pub fn cv_isi(record: &SpikeRecord) -> Vec<NeuronCv> {
    let mut by_neuron: Vec<(NeuronId, u64)> =
        record.events.iter().map(|e| (e.neuron, e.step)).collect();
    by_neuron.sort_unstable();
    by_neuron
        .chunk_by(|a, b| a.0 == b.0)
        .filter(|spikes| spikes.len() >= 3)
        .map(|spikes| {
            let isi: Vec<f64> = spikes
                .windows(2)
                .map(|w| (w[1].1 - w[0].1) as f64)
                .collect();
            NeuronCv {
                neuron: spikes[0].0,
                n_spikes: spikes.len() as u64,
                cv: coefficient_of_variation(&isi),
            }
        })
        .collect()
}

fn coefficient_of_variation(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if mean > 0.0 {
        var.sqrt() / mean
    } else {
        0.0
    }
}
