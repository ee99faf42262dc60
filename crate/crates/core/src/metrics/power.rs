use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fractional accuracy of the power distribution units.
pub const DEVICE_ACCURACY: f64 = 0.05;

/// Readings lag wall-clock time by this many seconds.
pub const DEVICE_DELAY_S: i64 = 1;

/// Power readings at 1 Hz. Sample `i` is attributed to the second
/// `[start_time + i, start_time + i + 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerTrace {
    /// Unix seconds of the first sample.
    pub start_time: f64,
    /// W
    pub samples: Vec<f64>,
    pub accuracy: f64,
}

impl PowerTrace {
    pub fn new(start_time: f64, samples: Vec<f64>) -> Result<Self> {
        if let Some((i, w)) = samples.iter().enumerate().find(|(_, w)| !(**w >= 0.0)) {
            return Err(Error::Domain(format!(
                "power sample {i} is {w}, must be >= 0"
            )));
        }
        Ok(Self {
            start_time,
            samples,
            accuracy: DEVICE_ACCURACY,
        })
    }

    pub fn end_time(&self) -> f64 {
        self.start_time + self.samples.len() as f64
    }
}

/// Attributes every reading `shift` seconds earlier.
pub fn align_power(trace: &PowerTrace, shift: i64) -> PowerTrace {
    PowerTrace {
        start_time: trace.start_time - shift as f64,
        ..trace.clone()
    }
}

/// Energy in J over `[t0, t1)` above `baseline` W, by the left rectangular
/// rule at 1 s resolution. Samples below baseline contribute nothing;
/// partially covered seconds are weighted by their overlap.
pub fn integrate_energy(trace: &PowerTrace, t0: f64, t1: f64, baseline: f64) -> Result<f64> {
    if !(baseline >= 0.0) {
        return Err(Error::Domain(format!(
            "baseline must be >= 0, got {baseline}"
        )));
    }
    if !(t0 <= t1) {
        return Err(Error::Range(format!("window [{t0}, {t1}) is reversed")));
    }
    if t0 < trace.start_time || t1 > trace.end_time() {
        return Err(Error::Range(format!(
            "window [{t0}, {t1}) outside trace [{}, {})",
            trace.start_time,
            trace.end_time()
        )));
    }
    if t0 == t1 {
        return Ok(0.0);
    }
    let first = ((t0 - trace.start_time).floor() as usize).min(trace.samples.len());
    let last = ((t1 - trace.start_time).ceil() as usize).min(trace.samples.len());
    let mut energy = 0.0;
    for i in first..last {
        let ts = trace.start_time + i as f64;
        let overlap = (t1.min(ts + 1.0) - t0.max(ts)).max(0.0);
        energy += (trace.samples[i] - baseline).max(0.0) * overlap;
    }
    Ok(energy)
}

/// Reads `epoch_seconds,watts` rows, optionally preceded by a header.
pub fn read_power_csv<R: Read>(r: R) -> Result<PowerTrace> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut times = Vec::new();
    let mut watts = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Format(format!(
                "power log row {}: expected 2 columns",
                i + 1
            )));
        }
        let (t, w) = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
        match (t, w) {
            (Ok(t), Ok(w)) => {
                times.push(t);
                watts.push(w);
            }
            _ if i == 0 => continue,
            _ => {
                return Err(Error::Format(format!(
                    "power log row {}: not numeric",
                    i + 1
                )))
            }
        }
    }
    let Some(&start) = times.first() else {
        return Err(Error::Format("power log has no samples".into()));
    };
    for (i, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - 1.0).abs() > 1e-6 {
            return Err(Error::Format(format!(
                "power log is not at 1 Hz between samples {i} and {}",
                i + 1
            )));
        }
    }
    PowerTrace::new(start, watts)
}
