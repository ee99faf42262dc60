use std::io::Write;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::engine::SpikeRecord;
use crate::error::{Error, Result};
use crate::rng::{self, Domain};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterRow {
    pub t_ms: f64,
    /// Display row; populations occupy consecutive blocks of rows in
    /// declaration order.
    pub row: u64,
    pub population: String,
}

/// Spikes of a random `fraction` of each population within `[t0, t1)` ms.
///
/// The neurons shown are drawn per population from the raster stream of
/// `seed`, `floor(fraction * size)` of them, and numbered by id within
/// their population block.
pub fn raster_export(
    record: &SpikeRecord,
    fraction: f64,
    window: (f64, f64),
    seed: u64,
) -> Result<Vec<RasterRow>> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::Domain(format!(
            "fraction must lie in [0, 1], got {fraction}"
        )));
    }
    let (t0, t1) = window;
    let (a, b) = record.window_ms();
    let eps = 1e-9 * record.h;
    if !(t0 <= t1) || t0 < a - eps || t1 > b + eps {
        return Err(Error::Range(format!(
            "raster window [{t0}, {t1}) ms outside recorded [{a}, {b}) ms"
        )));
    }

    // row of every selected neuron, indexed by global id
    let mut rows: Vec<Option<(u64, usize)>> = vec![None; record.n_neurons() as usize];
    let mut next_row = 0;
    for (p, pop) in record.populations.iter().enumerate() {
        let k = (fraction * pop.size() as f64 + 1e-9).floor() as usize;
        let mut ids: Vec<u64> = (pop.start..pop.end).collect();
        let mut rng = rng::stream(seed, Domain::Raster, p as u64);
        let (chosen, _) = ids.partial_shuffle(&mut rng, k);
        chosen.sort_unstable();
        for &id in chosen.iter() {
            rows[id as usize] = Some((next_row, p));
            next_row += 1;
        }
    }

    let first = (t0 / record.h - 1e-9).ceil().max(0.0) as u64;
    let end = (t1 / record.h - 1e-9).ceil().max(0.0) as u64;
    let lo = record.events.partition_point(|e| e.step < first);
    let hi = record.events.partition_point(|e| e.step < end);
    Ok(record.events[lo..hi]
        .iter()
        .filter_map(|e| {
            rows[e.neuron as usize].map(|(row, p)| RasterRow {
                t_ms: e.step as f64 * record.h,
                row,
                population: record.populations[p].name.clone(),
            })
        })
        .collect())
}

/// Digits after the decimal point needed to print multiples of `h` exactly.
fn decimals_for(h: f64) -> usize {
    (0..=9)
        .find(|&p| {
            let x = h * 10f64.powi(p as i32);
            (x - x.round()).abs() < 1e-9 * x.max(1.0)
        })
        .unwrap_or(9)
}

/// CSV with header `t_ms,row,population`.
pub fn write_raster_csv<W: Write>(rows: &[RasterRow], h: f64, mut w: W) -> Result<()> {
    let prec = decimals_for(h);
    let mut out = String::from("t_ms,row,population\n");
    for r in rows {
        out.push_str(&format!("{:.prec$},{},{}\n", r.t_ms, r.row, r.population));
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}
