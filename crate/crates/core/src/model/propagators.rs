use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::NeuronParams;

/// One-step propagator of the subthreshold system
///
/// ```text
/// dV/dt   = -(V - E_L)/tau_m + (I_ex + I_in + I_dc)/C_m
/// dI_x/dt = -I_x/tau_syn_x
/// ```
///
/// so that `V(t+h) = p_vv V + p_const + p_ve I_ex + p_vi I_in + p_dc I_dc`
/// and `I_x(t+h) = p_xx I_x`, exactly at grid points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Propagators<T> {
    pub p_vv: T,
    pub p_ee: T,
    pub p_ii: T,
    /// mV per pA
    pub p_ve: T,
    /// mV per pA
    pub p_vi: T,
    /// mV
    pub p_const: T,
    /// Response to a constant current held over the step, mV per pA.
    pub p_dc: T,
}

impl<T: Scalar> Propagators<T> {
    pub fn cast<U: Scalar>(&self) -> Propagators<U> {
        let c = |x: T| U::of(x.to_f64_lossy());
        Propagators {
            p_vv: c(self.p_vv),
            p_ee: c(self.p_ee),
            p_ii: c(self.p_ii),
            p_ve: c(self.p_ve),
            p_vi: c(self.p_vi),
            p_const: c(self.p_const),
            p_dc: c(self.p_dc),
        }
    }
}

/// Computes the exact-integration propagators for step `h` (ms).
///
/// All coefficients are evaluated in `f64` and converted to `T` once.
pub fn compute_propagators<T: Scalar>(params: &NeuronParams, h: f64) -> Result<Propagators<T>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!(
            "time step must be positive, got {h}"
        )));
    }
    for (name, v) in [
        ("tau_m", params.tau_m),
        ("C_m", params.c_m),
        ("tau_syn_ex", params.tau_syn_ex),
        ("tau_syn_in", params.tau_syn_in),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }

    let tau_m = params.tau_m;
    let decay_m = -(-h / tau_m).exp_m1(); // 1 - p_vv without cancellation
    let p = Propagators {
        p_vv: (-h / tau_m).exp(),
        p_ee: (-h / params.tau_syn_ex).exp(),
        p_ii: (-h / params.tau_syn_in).exp(),
        p_ve: current_coupling(tau_m, params.tau_syn_ex, params.c_m, h),
        p_vi: current_coupling(tau_m, params.tau_syn_in, params.c_m, h),
        p_const: params.e_l * decay_m,
        p_dc: tau_m / params.c_m * decay_m,
    };
    Ok(p.cast())
}

/// Voltage response after one step to a unit exponentially decaying current.
pub(crate) fn current_coupling(tau_m: f64, tau_s: f64, c_m: f64, h: f64) -> f64 {
    if tau_s == tau_m {
        coupling_limit(tau_m, c_m, h)
    } else {
        coupling_generic(tau_m, tau_s, c_m, h)
    }
}

/// tau_m tau_s / (C (tau_s - tau_m)) * (exp(-h/tau_s) - exp(-h/tau_m)),
/// with the bracket factored as exp(-h/tau_m) * expm1(h (tau_s - tau_m) / (tau_m tau_s)).
pub(crate) fn coupling_generic(tau_m: f64, tau_s: f64, c_m: f64, h: f64) -> f64 {
    let x = h * (tau_s - tau_m) / (tau_m * tau_s);
    tau_m * tau_s / (c_m * (tau_s - tau_m)) * (-h / tau_m).exp() * x.exp_m1()
}

/// Limit of [`coupling_generic`] as tau_s -> tau_m.
pub(crate) fn coupling_limit(tau_m: f64, c_m: f64, h: f64) -> f64 {
    h / c_m * (-h / tau_m).exp()
}
