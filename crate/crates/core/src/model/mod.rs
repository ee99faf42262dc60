//! Network description, neuron parameters, the simulation grid, and the
//! exact-integration propagators of the current-based LIF neuron.

mod grid;
mod params;
mod propagators;
mod spec;
mod validate;

pub use grid::SimulationGrid;
pub use params::NeuronParams;
pub use propagators::{compute_propagators, Propagators};
pub use spec::{
    load_network_spec, load_network_spec_file, ConnectionRule, NetworkSpec, PopulationSpec, Sign,
};
pub use validate::{validate, Violation};
