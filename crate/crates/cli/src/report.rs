use serde::{Deserialize, Serialize};
use snnbench::engine::RunCounts;
use snnbench::PhaseTimers;

pub const RUN_REPORT_SCHEMA_VERSION: u32 = 1;

/// Contents of `timers.json`, written next to the spike file of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub n_vp: usize,
    pub precision: String,
    pub pinned: bool,
    /// s
    pub t_model: f64,
    /// Unix seconds bracketing the measured window.
    pub wall_start: f64,
    pub wall_end: f64,
    pub timers: PhaseTimers,
    pub counts: RunCounts,
}
