use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::dynamics::{NeuronId, SpikeEvent};
use crate::error::{Error, Result};
use crate::model::NetworkSpec;

pub const RECORD_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationBounds {
    pub name: String,
    /// First global id.
    pub start: u64,
    /// One past the last global id.
    pub end: u64,
}

impl PopulationBounds {
    pub fn size(&self) -> u64 {
        self.end - self.start
    }

    pub fn from_spec(spec: &NetworkSpec) -> Vec<Self> {
        spec.populations
            .iter()
            .zip(spec.population_ranges())
            .map(|(p, r)| PopulationBounds {
                name: p.name.clone(),
                start: r.start,
                end: r.end,
            })
            .collect()
    }
}

/// Sidecar document describing how to interpret a spike file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordMetadata {
    pub schema_version: u32,
    /// ms
    pub h: f64,
    /// First recorded step.
    pub start_step: u64,
    /// One past the last recorded step.
    pub end_step: u64,
    pub populations: Vec<PopulationBounds>,
}

/// Spikes of the measured window, sorted by `(step, neuron)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpikeRecord {
    pub events: Vec<SpikeEvent>,
    pub h: f64,
    pub start_step: u64,
    pub end_step: u64,
    pub populations: Vec<PopulationBounds>,
}

impl SpikeRecord {
    pub fn window_ms(&self) -> (f64, f64) {
        (
            self.start_step as f64 * self.h,
            self.end_step as f64 * self.h,
        )
    }

    pub fn window_seconds(&self) -> f64 {
        (self.end_step - self.start_step) as f64 * self.h / 1000.0
    }

    pub fn n_neurons(&self) -> u64 {
        self.populations.last().map_or(0, |p| p.end)
    }

    pub fn metadata(&self) -> RecordMetadata {
        RecordMetadata {
            schema_version: RECORD_SCHEMA_VERSION,
            h: self.h,
            start_step: self.start_step,
            end_step: self.end_step,
            populations: self.populations.clone(),
        }
    }

    /// One `step<TAB>neuron` line per event.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut out = String::with_capacity(self.events.len() * 12);
        for e in &self.events {
            out.push_str(&e.step.to_string());
            out.push('\t');
            out.push_str(&e.neuron.to_string());
            out.push('\n');
        }
        w.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(r: R, meta: RecordMetadata) -> Result<Self> {
        let mut events = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = || {
                Error::Format(format!(
                    "spike file line {}: expected `step<TAB>neuron`",
                    i + 1
                ))
            };
            let (a, b) = line.split_once('\t').ok_or_else(bad)?;
            let step: u64 = a.trim().parse().map_err(|_| bad())?;
            let neuron: NeuronId = b.trim().parse().map_err(|_| bad())?;
            events.push(SpikeEvent { step, neuron });
        }
        if events.windows(2).any(|w| w[0] > w[1]) {
            events.sort_unstable();
        }
        let rec = Self {
            events,
            h: meta.h,
            start_step: meta.start_step,
            end_step: meta.end_step,
            populations: meta.populations,
        };
        if let Some(e) = rec
            .events
            .iter()
            .find(|e| e.step < rec.start_step || e.step >= rec.end_step)
        {
            return Err(Error::Format(format!(
                "spike at step {} lies outside the recorded window",
                e.step
            )));
        }
        if let Some(e) = rec
            .events
            .iter()
            .find(|e| e.neuron as u64 >= rec.n_neurons())
        {
            return Err(Error::Format(format!(
                "spike of unknown neuron {}",
                e.neuron
            )));
        }
        Ok(rec)
    }
}

/// Merges per-vp spike lists into one list sorted by `(step, neuron)`.
pub fn merge_records(parts: Vec<Vec<SpikeEvent>>) -> Vec<SpikeEvent> {
    let mut all: Vec<SpikeEvent> = parts.into_iter().flatten().collect();
    all.sort();
    all
}
