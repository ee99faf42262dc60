use serde::{Deserialize, Serialize};

use crate::engine::PhaseTimers;
use crate::error::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Realtime factor `t_wall / t_model`; below 1 the simulation outpaces
/// biological time.
pub fn rtf(t_wall: f64, t_model: f64) -> Result<f64> {
    if !(t_model > 0.0) {
        return Err(Error::Domain(format!(
            "model time must be positive, got {t_model}"
        )));
    }
    Ok(t_wall / t_model)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseFractions {
    pub f_update: f64,
    pub f_deliver: f64,
    pub f_communicate: f64,
    pub f_other: f64,
}

pub fn phase_fractions(timers: &PhaseTimers) -> Result<PhaseFractions> {
    if !(timers.t_total > 0.0) {
        return Err(Error::Domain(format!(
            "total time must be positive, got {}",
            timers.t_total
        )));
    }
    let f = |t: f64| t / timers.t_total;
    let (u, d, c) = (
        f(timers.t_update),
        f(timers.t_deliver),
        f(timers.t_communicate),
    );
    Ok(PhaseFractions {
        f_update: u,
        f_deliver: d,
        f_communicate: c,
        f_other: 1.0 - (u + d + c),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RtfReport {
    pub schema_version: u32,
    /// s
    pub t_wall: f64,
    /// s
    pub t_model: f64,
    pub rtf: f64,
    #[serde(flatten)]
    pub fractions: PhaseFractions,
}

impl RtfReport {
    /// `t_model` in seconds; wall time is the measured window of `timers`.
    pub fn new(timers: &PhaseTimers, t_model: f64) -> Result<Self> {
        let fractions = if timers.t_total > 0.0 {
            phase_fractions(timers)?
        } else {
            PhaseFractions {
                f_update: 0.0,
                f_deliver: 0.0,
                f_communicate: 0.0,
                f_other: 1.0,
            }
        };
        Ok(Self {
            schema_version: REPORT_SCHEMA_VERSION,
            t_wall: timers.t_total,
            t_model,
            rtf: rtf(timers.t_total, t_model)?,
            fractions,
        })
    }
}

/// Energy divided by the number of synaptic events (spikes times fan-out).
pub fn energy_per_synaptic_event(energy: f64, synaptic_events: u64) -> Result<f64> {
    if synaptic_events == 0 {
        return Err(Error::Domain("no synaptic events to divide by".into()));
    }
    Ok(energy / synaptic_events as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub schema_version: u32,
    /// J, without baseline subtraction
    pub e_total: f64,
    /// J
    pub e_baseline_subtracted: f64,
    pub synaptic_events: u64,
    /// J
    pub e_per_event: f64,
    /// W
    pub baseline: f64,
    /// Integration window, Unix seconds.
    pub window: [f64; 2],
    /// Seconds the readings were moved back before integration.
    pub shift_s: i64,
}
