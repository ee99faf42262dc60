//! Independent reference solutions.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snnbench::dynamics::{step_population, NeuronKernel, NeuronStateArrays};
use snnbench::engine::SpikeRecord;
use snnbench::metrics::RasterRow;
use snnbench::model::NeuronParams;

/// State (V, I_ex, I_in) of the subthreshold ODE
///   dV/dt = -(V - E_L)/tau_m + (I_ex + I_in + I_dc)/C
///   dI/dt = -I/tau_syn
fn derivative(p: &NeuronParams, i_dc: f64, y: [f64; 3]) -> [f64; 3] {
    [
        -(y[0] - p.e_l) / p.tau_m + (y[1] + y[2] + i_dc) / p.c_m,
        -y[1] / p.tau_syn_ex,
        -y[2] / p.tau_syn_in,
    ]
}

pub fn rk4(p: &NeuronParams, i_dc: f64, mut y: [f64; 3], t: f64, substeps: usize) -> [f64; 3] {
    let dt = t / substeps as f64;
    let axpy =
        |y: [f64; 3], k: [f64; 3], a: f64| [y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2]];
    for _ in 0..substeps {
        let k1 = derivative(p, i_dc, y);
        let k2 = derivative(p, i_dc, axpy(y, k1, dt / 2.0));
        let k3 = derivative(p, i_dc, axpy(y, k2, dt / 2.0));
        let k4 = derivative(p, i_dc, axpy(y, k3, dt));
        for j in 0..3 {
            y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    y
}

/// Largest relative deviation of the grid trajectory from the RK4 oracle
/// over `t_ms`, with random synaptic input arriving every step.
pub fn max_relative_error(p: &NeuronParams, h: f64, i_dc: f64, t_ms: f64, seed: u64) -> f64 {
    let kernel = NeuronKernel::<f64>::new(p, h, i_dc).unwrap();
    let mut state = NeuronStateArrays::new(1, p.e_l);
    let mut oracle = [p.e_l, 0.0, 0.0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (t_ms / h).round() as u64;
    let mut worst = 0.0f64;
    for step in 0..n {
        let ex = if rng.random_bool(0.3) {
            rng.random_range(0.0..300.0)
        } else {
            0.0
        };
        let inh = if rng.random_bool(0.2) {
            -rng.random_range(0.0..600.0)
        } else {
            0.0
        };
        let spikes = step_population(&mut state, &kernel, &[ex], &[inh], step);
        assert!(spikes.is_empty());
        oracle = rk4(p, i_dc, oracle, h, 100);
        oracle[1] += ex;
        oracle[2] += inh;
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
        worst = worst.max(rel(state.v_m[0], oracle[0]));
        if oracle[1] != 0.0 {
            worst = worst.max(rel(state.i_ex[0], oracle[1]));
        }
    }
    worst
}

pub fn subthreshold(params: NeuronParams) -> NeuronParams {
    NeuronParams {
        v_th: 1e9,
        ..params
    }
}

/// Checks raster rows against the record they were drawn from: rows of each
/// population form a block of `floor(fraction * size)` rows in declaration
/// order, every row reproduces the spike train of a distinct neuron of its
/// population within the window, and all spikes of a shown neuron appear.
pub fn recount_raster(
    record: &SpikeRecord,
    rows: &[RasterRow],
    fraction: f64,
    window: (f64, f64),
) -> Result<(), String> {
    let (t0, t1) = window;
    let first = (t0 / record.h).round() as u64;
    let end = (t1 / record.h).round() as u64;
    let mut neuron_trains: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
    for e in record
        .events
        .iter()
        .filter(|e| (first..end).contains(&e.step))
    {
        neuron_trains.entry(e.neuron).or_default().push(e.step);
    }
    let mut row_trains: BTreeMap<u64, (String, Vec<u64>)> = BTreeMap::new();
    for r in rows {
        if !(t0..t1).contains(&r.t_ms) {
            return Err(format!("spike at {} ms outside the window", r.t_ms));
        }
        let entry = row_trains
            .entry(r.row)
            .or_insert_with(|| (r.population.clone(), Vec::new()));
        if entry.0 != r.population {
            return Err(format!("row {} spans two populations", r.row));
        }
        entry.1.push((r.t_ms / record.h).round() as u64);
    }

    let mut offset = 0;
    for pop in &record.populations {
        let k = (fraction * pop.size() as f64).floor() as u64;
        let mut available: HashMap<&Vec<u64>, usize> = HashMap::new();
        for (_, t) in neuron_trains.range(pop.start as u32..pop.end as u32) {
            *available.entry(t).or_default() += 1;
        }
        for (row, (name, t)) in row_trains.range(offset..offset + k) {
            if name != &pop.name {
                return Err(format!("row {row} labelled {name}, expected {}", pop.name));
            }
            match available.get_mut(t) {
                Some(n) if *n > 0 => *n -= 1,
                _ => {
                    return Err(format!(
                        "row {row} matches no unused neuron of {}",
                        pop.name
                    ))
                }
            }
        }
        offset += k;
    }
    if let Some((&row, _)) = row_trains.range(offset..).next() {
        return Err(format!("row {row} beyond the {offset} selected neurons"));
    }
    Ok(())
}
