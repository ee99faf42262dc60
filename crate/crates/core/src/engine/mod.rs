//! The parallel simulation loop.
//!
//! Neurons are distributed round-robin over virtual processes (one worker
//! thread each). Time advances in communication intervals of at most
//! `min_delay` steps; each interval is three barrier-separated phases:
//!
//! * deliver: walk the out-edges of the spikes exchanged at the end of the
//!   previous interval and write into the ring buffers of local targets,
//! * update: advance local neurons through every step of the interval,
//! * communicate: all-gather the spikes emitted by every virtual process.

mod partition;
mod record;
mod ring;
mod run;
mod timers;

pub use partition::{partition_neurons, VirtualProcessPartition};
pub use record::{merge_records, PopulationBounds, RecordMetadata, SpikeRecord};
pub use ring::RingBuffer;
pub use run::{run_simulation, RunCounts, RunOptions, RunOutput, MAX_VPS};
pub use timers::PhaseTimers;
