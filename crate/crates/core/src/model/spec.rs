use std::collections::HashSet;
use std::fs;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{NeuronParams, SimulationGrid};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSpec {
    pub name: String,
    pub size: u64,
    pub params: NeuronParams,
    /// Rate of each external Poisson source, spikes/s.
    pub ext_rate: f64,
    /// Number of independent external sources per neuron.
    pub ext_indegree: u64,
    /// pA
    pub ext_weight: f64,
    /// Constant current injected into every neuron of the population, pA.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub dc_current: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Excitatory,
    Inhibitory,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Excitatory => 1.0,
            Sign::Inhibitory => -1.0,
        }
    }
}

/// Fixed-total-count random connectivity between two populations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionRule {
    pub source: String,
    pub target: String,
    pub total_synapses: u64,
    /// Signed mean weight in pA; its sign must agree with `sign`.
    pub weight_mean: f64,
    pub weight_sd: f64,
    pub delay_mean: f64,
    pub delay_sd: f64,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub grid: SimulationGrid,
    pub populations: Vec<PopulationSpec>,
    pub connections: Vec<ConnectionRule>,
    pub seed: u64,
}

impl NetworkSpec {
    pub fn total_neurons(&self) -> u64 {
        self.populations.iter().map(|p| p.size).sum()
    }

    pub fn total_synapses(&self) -> u64 {
        self.connections.iter().map(|c| c.total_synapses).sum()
    }

    pub fn population_index(&self, name: &str) -> Option<usize> {
        self.populations.iter().position(|p| p.name == name)
    }

    /// Global id ranges of the populations, in declaration order.
    pub fn population_ranges(&self) -> Vec<Range<u64>> {
        let mut start = 0;
        self.populations
            .iter()
            .map(|p| {
                let r = start..start + p.size;
                start += p.size;
                r
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("NetworkSpec always serializes")
    }

    /// Structural checks that make the document usable at all: unique
    /// population names and connection rules that refer to them.
    pub(crate) fn check_schema(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for (i, p) in self.populations.iter().enumerate() {
            if !seen.insert(p.name.as_str()) {
                return Err(Error::Schema {
                    field: format!("populations[{i}].name"),
                    message: format!("duplicate population name \"{}\"", p.name),
                });
            }
        }
        for (i, c) in self.connections.iter().enumerate() {
            for (key, name) in [("source", &c.source), ("target", &c.target)] {
                if !seen.contains(name.as_str()) {
                    return Err(Error::Schema {
                        field: format!("connections[{i}].{key}"),
                        message: format!("unknown population \"{name}\""),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Parses a network spec document. Unknown keys are rejected; connection
/// rules must name declared populations.
pub fn load_network_spec(document: &str) -> Result<NetworkSpec> {
    let spec: NetworkSpec = serde_json::from_str(document)?;
    spec.check_schema()?;
    Ok(spec)
}

pub fn load_network_spec_file(path: impl AsRef<Path>) -> Result<NetworkSpec> {
    let text = fs::read_to_string(path)?;
    load_network_spec(&text)
}
