use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{NetworkSpec, NeuronParams, SimulationGrid};

/// A single failed invariant, addressed by its JSON path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Checks every invariant of the spec. Returns all violations found.
pub fn validate(spec: &NetworkSpec) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let grid_ok = check_grid(&spec.grid, &mut out);
    let h = spec.grid.h;

    let mut names = HashSet::new();
    for (i, pop) in spec.populations.iter().enumerate() {
        let at = |f: &str| format!("populations[{i}].{f}");
        if !names.insert(pop.name.as_str()) {
            out.push(Violation::new(
                at("name"),
                format!("duplicate population name \"{}\"", pop.name),
            ));
        }
        if pop.size > u32::MAX as u64 {
            out.push(Violation::new(
                at("size"),
                "population exceeds the 32-bit id space",
            ));
        }
        if !(pop.ext_rate >= 0.0) || !pop.ext_rate.is_finite() {
            out.push(Violation::new(at("ext_rate"), "must be finite and >= 0"));
        }
        if !pop.ext_weight.is_finite() {
            out.push(Violation::new(at("ext_weight"), "must be finite"));
        }
        if !pop.dc_current.is_finite() {
            out.push(Violation::new(at("dc_current"), "must be finite"));
        }
        check_params(
            &pop.params,
            grid_ok.then_some(&spec.grid),
            &at("params"),
            &mut out,
        );
    }
    if spec.total_neurons() > u32::MAX as u64 {
        out.push(Violation::new(
            "populations",
            "total neuron count exceeds the 32-bit id space",
        ));
    }

    let mut lower: Option<u64> = None;
    let mut upper: Option<u64> = None;
    for (i, c) in spec.connections.iter().enumerate() {
        let at = |f: &str| format!("connections[{i}].{f}");
        for (key, name) in [("source", &c.source), ("target", &c.target)] {
            match spec.population_index(name) {
                None => out.push(Violation::new(
                    at(key),
                    format!("unknown population \"{name}\""),
                )),
                Some(p) if spec.populations[p].size == 0 && c.total_synapses > 0 => {
                    out.push(Violation::new(
                        at(key),
                        format!("population \"{name}\" is empty but synapses are requested"),
                    ))
                }
                Some(_) => {}
            }
        }
        if !c.weight_mean.is_finite() {
            out.push(Violation::new(at("weight_mean"), "must be finite"));
        } else if c.weight_mean * c.sign.factor() < 0.0 {
            out.push(Violation::new(
                at("weight_mean"),
                "sign contradicts the rule's sign",
            ));
        }
        if !(c.weight_sd >= 0.0) || !c.weight_sd.is_finite() {
            out.push(Violation::new(at("weight_sd"), "must be finite and >= 0"));
        }
        if !(c.delay_sd >= 0.0) || !c.delay_sd.is_finite() {
            out.push(Violation::new(at("delay_sd"), "must be finite and >= 0"));
        }
        if !c.delay_mean.is_finite() {
            out.push(Violation::new(at("delay_mean"), "must be finite"));
            continue;
        }
        if !grid_ok {
            continue;
        }
        let g = &spec.grid;
        if c.delay_mean < h * (1.0 - 1e-9) {
            out.push(Violation::new(at("delay_mean"), "delay below grid step"));
            continue;
        }
        if c.delay_mean > g.max_delay * (1.0 + 1e-9) {
            out.push(Violation::new(
                at("delay_mean"),
                "delay above grid max_delay",
            ));
            continue;
        }
        if c.total_synapses == 0 {
            continue;
        }
        let (lo, hi) = if c.delay_sd > 0.0 {
            (1, g.max_delay_steps())
        } else {
            match g.steps_exact(c.delay_mean) {
                Some(n) => (n, n),
                None => {
                    out.push(Violation::new(
                        at("delay_mean"),
                        "fixed delay is not a multiple of h",
                    ));
                    continue;
                }
            }
        };
        lower = Some(lower.map_or(lo, |l| l.min(lo)));
        upper = Some(upper.map_or(hi, |u| u.max(hi)));
    }

    if let (Some(lo), Some(hi)) = (lower, upper) {
        let g = &spec.grid;
        if g.min_delay_steps() != lo {
            out.push(Violation::new(
                "grid.min_delay",
                format!(
                    "must equal the smallest realizable delay {} ms",
                    lo as f64 * h
                ),
            ));
        }
        if g.max_delay_steps() != hi {
            out.push(Violation::new(
                "grid.max_delay",
                format!(
                    "must equal the largest realizable delay {} ms",
                    hi as f64 * h
                ),
            ));
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn check_grid(g: &SimulationGrid, out: &mut Vec<Violation>) -> bool {
    if !(g.h > 0.0) || !g.h.is_finite() {
        out.push(Violation::new("grid.h", "must be finite and > 0"));
        return false;
    }
    let n0 = out.len();
    for (f, v) in [("t_model", g.t_model), ("t_transient", g.t_transient)] {
        if !(v >= 0.0) || !v.is_finite() {
            out.push(Violation::new(
                format!("grid.{f}"),
                "must be finite and >= 0",
            ));
        } else if g.steps_exact(v).is_none() {
            out.push(Violation::new(format!("grid.{f}"), "not a multiple of h"));
        }
    }
    if g.min_delay < g.h * (1.0 - 1e-9) {
        out.push(Violation::new("grid.min_delay", "delay below grid step"));
    } else if g.steps_exact(g.min_delay).is_none() {
        out.push(Violation::new("grid.min_delay", "not a multiple of h"));
    }
    if !(g.max_delay >= g.min_delay) {
        out.push(Violation::new("grid.max_delay", "must be >= min_delay"));
    } else if g.steps_exact(g.max_delay).is_none() {
        out.push(Violation::new("grid.max_delay", "not a multiple of h"));
    } else if g.max_delay_steps() > u16::MAX as u64 {
        out.push(Violation::new("grid.max_delay", "exceeds 65535 steps"));
    }
    out.len() == n0
}

fn check_params(
    p: &NeuronParams,
    grid: Option<&SimulationGrid>,
    at: &str,
    out: &mut Vec<Violation>,
) {
    for (f, v) in [
        ("tau_m", p.tau_m),
        ("C_m", p.c_m),
        ("tau_syn_ex", p.tau_syn_ex),
        ("tau_syn_in", p.tau_syn_in),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            out.push(Violation::new(
                format!("{at}.{f}"),
                "must be finite and > 0",
            ));
        }
    }
    for (f, v) in [("E_L", p.e_l), ("V_th", p.v_th), ("V_reset", p.v_reset)] {
        if !v.is_finite() {
            out.push(Violation::new(format!("{at}.{f}"), "must be finite"));
        }
    }
    if !(p.v_reset < p.v_th) {
        out.push(Violation::new(
            format!("{at}.V_reset"),
            "must be below V_th",
        ));
    }
    if !(p.t_ref >= 0.0) || !p.t_ref.is_finite() {
        out.push(Violation::new(
            format!("{at}.t_ref"),
            "must be finite and >= 0",
        ));
    } else if let Some(g) = grid {
        if g.steps_exact(p.t_ref).is_none() {
            out.push(Violation::new(format!("{at}.t_ref"), "not a multiple of h"));
        }
    }
}
