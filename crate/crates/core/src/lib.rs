//! Multithreaded simulation engine for networks of current-based
//! leaky integrate-and-fire neurons, together with the tooling to benchmark
//! it: thread placement over chiplet topologies, strong-scaling sweeps,
//! realtime factor and energy-per-synaptic-event accounting.
//!
//! Numeric kernels are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the double-precision types used by the CLI.

// `!(x >= 0.0)` is used deliberately so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod connectivity;
pub mod dynamics;
pub mod engine;
mod error;
pub mod metrics;
pub mod model;
pub mod placement;
pub mod rng;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use connectivity::{build_connectivity, degrees, DegreeSummary, TargetTable};
pub use dynamics::{NeuronId, SpikeEvent};
pub use engine::{run_simulation, PhaseTimers, RunOptions, RunOutput, SpikeRecord};
pub use model::{load_network_spec, validate, NetworkSpec};
pub use placement::{PlacementPlan, Scheme, TopologyModel};

pub type Propagators64 = model::Propagators<f64>;
pub type Propagators32 = model::Propagators<f32>;
pub type NeuronState64 = dynamics::NeuronStateArrays<f64>;
pub type NeuronState32 = dynamics::NeuronStateArrays<f32>;
pub type TargetTable64 = TargetTable<f64>;
pub type TargetTable32 = TargetTable<f32>;
