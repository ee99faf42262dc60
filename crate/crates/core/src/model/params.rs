use serde::{Deserialize, Serialize};

/// Parameters of a current-based LIF neuron with exponential synaptic
/// currents. Times in ms, capacitance in pF, potentials in mV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeuronParams {
    pub tau_m: f64,
    #[serde(rename = "C_m")]
    pub c_m: f64,
    #[serde(rename = "E_L")]
    pub e_l: f64,
    #[serde(rename = "V_th")]
    pub v_th: f64,
    #[serde(rename = "V_reset")]
    pub v_reset: f64,
    pub t_ref: f64,
    pub tau_syn_ex: f64,
    pub tau_syn_in: f64,
}

impl NeuronParams {
    /// Number of steps a neuron is clamped after a spike.
    pub fn refractory_steps(&self, h: f64) -> u32 {
        let r = self.t_ref / h;
        // absorb representation error such as 2.0 / 0.1 = 20.000000000000004
        (r - 1e-9 * r.max(1.0)).ceil().max(0.0) as u32
    }
}

impl Default for NeuronParams {
    fn default() -> Self {
        Self {
            tau_m: 10.0,
            c_m: 250.0,
            e_l: -65.0,
            v_th: -50.0,
            v_reset: -65.0,
            t_ref: 2.0,
            tau_syn_ex: 0.5,
            tau_syn_in: 0.5,
        }
    }
}
