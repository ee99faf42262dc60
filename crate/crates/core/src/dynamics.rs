//! Per-step neuron update and external Poisson drive.

use std::ops::Range;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{compute_propagators, NeuronParams, Propagators};
use crate::scalar::Scalar;

pub type NeuronId = u32;

/// A spike emitted by `neuron` during the update of step `step`.
///
/// Ordering is by `(step, neuron)`, the canonical order of spike records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpikeEvent {
    pub step: u64,
    pub neuron: NeuronId,
}

/// Everything a population needs to advance one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeuronKernel<T> {
    pub prop: Propagators<T>,
    pub v_th: T,
    pub v_reset: T,
    pub refractory_steps: u32,
    /// Constant injected current, pA.
    pub i_dc: T,
}

impl<T: Scalar> NeuronKernel<T> {
    pub fn new(params: &NeuronParams, h: f64, i_dc: f64) -> Result<Self> {
        Ok(Self {
            prop: compute_propagators(params, h)?,
            v_th: T::of(params.v_th),
            v_reset: T::of(params.v_reset),
            refractory_steps: params.refractory_steps(h),
            i_dc: T::of(i_dc),
        })
    }
}

/// Structure-of-arrays neuron state.
#[derive(Clone, Debug, PartialEq)]
pub struct NeuronStateArrays<T> {
    /// mV
    pub v_m: Vec<T>,
    /// pA
    pub i_ex: Vec<T>,
    /// pA
    pub i_in: Vec<T>,
    pub refr_left: Vec<u32>,
}

impl<T: Scalar> NeuronStateArrays<T> {
    pub fn new(n: usize, v_init: T) -> Self {
        Self {
            v_m: vec![v_init; n],
            i_ex: vec![T::zero(); n],
            i_in: vec![T::zero(); n],
            refr_left: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.v_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v_m.is_empty()
    }

    pub(crate) fn extend(&mut self, n: usize, v_init: T) {
        self.v_m.extend(std::iter::repeat_n(v_init, n));
        self.i_ex.extend(std::iter::repeat_n(T::zero(), n));
        self.i_in.extend(std::iter::repeat_n(T::zero(), n));
        self.refr_left.extend(std::iter::repeat_n(0, n));
    }
}

/// Advances every neuron in `states` by one step and returns the spikes,
/// identified by their index in `states`.
pub fn step_population<T: Scalar>(
    states: &mut NeuronStateArrays<T>,
    kernel: &NeuronKernel<T>,
    input_ex: &[T],
    input_in: &[T],
    step: u64,
) -> Vec<SpikeEvent> {
    let mut spikes = Vec::new();
    step_range(states, 0..states.len(), kernel, input_ex, input_in, |i| {
        spikes.push(SpikeEvent {
            step,
            neuron: i as NeuronId,
        })
    });
    spikes
}

/// Advances the neurons in `range` by one step. `input_ex`/`input_in` are
/// indexed relative to `range.start`. `emit` receives the absolute index of
/// each neuron that crossed threshold.
///
/// Order within the step: propagate, add input to the currents, threshold
/// test. Refractory neurons are held at `V_reset` while their currents keep
/// integrating.
pub fn step_range<T: Scalar>(
    states: &mut NeuronStateArrays<T>,
    range: Range<usize>,
    kernel: &NeuronKernel<T>,
    input_ex: &[T],
    input_in: &[T],
    mut emit: impl FnMut(usize),
) {
    let p = &kernel.prop;
    let v_rest = p.p_const + p.p_dc * kernel.i_dc;
    let start = range.start;
    let v_m = &mut states.v_m[range.clone()];
    let i_ex = &mut states.i_ex[range.clone()];
    let i_in = &mut states.i_in[range.clone()];
    let refr = &mut states.refr_left[range];
    debug_assert_eq!(input_ex.len(), v_m.len());
    debug_assert_eq!(input_in.len(), v_m.len());

    for j in 0..v_m.len() {
        let (ie, ii) = (i_ex[j], i_in[j]);
        i_ex[j] = p.p_ee * ie + input_ex[j];
        i_in[j] = p.p_ii * ii + input_in[j];
        if refr[j] > 0 {
            refr[j] -= 1;
            v_m[j] = kernel.v_reset;
            continue;
        }
        let v = p.p_vv * v_m[j] + v_rest + p.p_ve * ie + p.p_vi * ii;
        if v >= kernel.v_th {
            v_m[j] = kernel.v_reset;
            refr[j] = kernel.refractory_steps;
            emit(start + j);
        } else {
            v_m[j] = v;
        }
    }
}

const INVERSION_LIMIT: f64 = 10.0;

/// Sequential-search inversion; `p0` is `exp(-lambda)`.
fn poisson_inversion<R: Rng + ?Sized>(lambda: f64, p0: f64, rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut p = p0;
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= lambda / k as f64;
        if p == 0.0 {
            break;
        }
        cdf += p;
    }
    k
}

/// Poisson count with mean `lambda`: inversion below 10, otherwise the
/// transformed-rejection sampler from `rand_distr`.
pub fn poisson_count<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    if !(lambda > 0.0) {
        return 0;
    }
    if lambda < INVERSION_LIMIT {
        poisson_inversion(lambda, (-lambda).exp(), rng)
    } else {
        Poisson::new(lambda)
            .expect("lambda is finite and positive")
            .sample(rng) as u64
    }
}

/// Current increment for one step of `indegree` independent Poisson sources
/// firing at `rate` spikes/s, each contributing `weight` pA.
pub fn poisson_external_input<T: Scalar, R: Rng + ?Sized>(
    rate: f64,
    indegree: u64,
    weight: f64,
    h: f64,
    rng: &mut R,
) -> T {
    PoissonDrive::new(rate, indegree, weight, h).sample(rng)
}

/// Precomputed per-population Poisson drive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoissonDrive<T> {
    /// Expected number of external spikes per step.
    pub lambda: f64,
    pub weight: T,
    p0: f64,
}

impl<T: Scalar> PoissonDrive<T> {
    pub fn new(rate: f64, indegree: u64, weight: f64, h: f64) -> Self {
        let lambda = rate * indegree as f64 * h / 1000.0;
        Self {
            lambda,
            weight: T::of(weight),
            p0: (-lambda).exp(),
        }
    }

    pub fn is_silent(&self) -> bool {
        !(self.lambda > 0.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        if self.is_silent() {
            return T::zero();
        }
        let k = if self.lambda < INVERSION_LIMIT {
            poisson_inversion(self.lambda, self.p0, rng)
        } else {
            poisson_count(self.lambda, rng)
        };
        self.weight * T::of(k as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Domain};
    use proptest::prelude::*;

    const H: f64 = 0.1;

    fn kernel(params: &NeuronParams, i_dc: f64) -> NeuronKernel<f64> {
        NeuronKernel::new(params, H, i_dc).unwrap()
    }

    #[test]
    fn resting_state_is_a_fixed_point() {
        let p = NeuronParams::default();
        let k = kernel(&p, 0.0);
        let mut s = NeuronStateArrays::new(4, p.e_l);
        let zero = vec![0.0; 4];
        for step in 0..1000 {
            let spikes = step_population(&mut s, &k, &zero, &zero, step);
            assert!(spikes.is_empty());
        }
        for &v in &s.v_m {
            assert!((v - p.e_l).abs() < 1e-12, "{v}");
        }
        assert!(s.i_ex.iter().chain(&s.i_in).all(|&i| i == 0.0));
    }

    #[test]
    fn neuron_at_threshold_fires_and_resets() {
        // V starts at threshold with a depolarizing current so the
        // propagated value stays at or above it for any input
        let p = NeuronParams::default();
        let k = kernel(&p, 0.0);
        for input in [0.0, 500.0, -500.0] {
            let mut s = NeuronStateArrays::new(1, p.v_th);
            s.i_ex[0] = 1000.0;
            let spikes = step_population(&mut s, &k, &[input], &[0.0], 3);
            assert_eq!(spikes, vec![SpikeEvent { step: 3, neuron: 0 }]);
            assert_eq!(s.v_m[0], p.v_reset);
            assert_eq!(s.refr_left[0], 20);
        }
    }

    #[test]
    fn refractory_neurons_are_clamped_and_silent() {
        let p = NeuronParams::default();
        let k = kernel(&p, 0.0);
        let mut s = NeuronStateArrays::new(1, p.v_reset);
        s.refr_left[0] = 5;
        for step in 0..5 {
            // huge input that would otherwise cross threshold
            let spikes = step_population(&mut s, &k, &[1e6], &[0.0], step);
            assert!(spikes.is_empty());
            assert_eq!(s.v_m[0], p.v_reset);
            assert!(s.refr_left[0] <= k.refractory_steps);
        }
        assert_eq!(s.refr_left[0], 0);
        // currents accumulated while refractory
        assert!(s.i_ex[0] > 1e6);
        let spikes = step_population(&mut s, &k, &[0.0], &[0.0], 5);
        assert_eq!(spikes.len(), 1);
    }

    #[test]
    fn input_reaches_voltage_one_step_later() {
        let p = NeuronParams::default();
        let k = kernel(&p, 0.0);
        let mut s = NeuronStateArrays::new(1, p.e_l);
        step_population(&mut s, &k, &[100.0], &[0.0], 0);
        assert_eq!(s.v_m[0], p.e_l * k.prop.p_vv + k.prop.p_const);
        assert_eq!(s.i_ex[0], 100.0);
        step_population(&mut s, &k, &[0.0], &[0.0], 1);
        assert!(s.v_m[0] > p.e_l);
    }

    #[test]
    fn steady_state_under_constant_current() {
        let p = NeuronParams {
            v_th: 1e9,
            ..NeuronParams::default()
        };
        let i = 300.0;
        let k = kernel(&p, i);
        let mut s = NeuronStateArrays::new(1, p.e_l);
        let zero = [0.0];
        // 500 ms = 50 tau_m
        for step in 0..5000 {
            step_population(&mut s, &k, &zero, &zero, step);
        }
        let expected = p.e_l + i * p.tau_m / p.c_m;
        assert!(
            (s.v_m[0] - expected).abs() < 1e-6,
            "{} vs {expected}",
            s.v_m[0]
        );
    }

    #[test]
    fn zero_rate_or_weight_gives_no_input() {
        let mut rng = stream(3, Domain::Synthetic, 0);
        for _ in 0..1000 {
            assert_eq!(
                poisson_external_input::<f64, _>(0.0, 1000, 87.8, H, &mut rng),
                0.0
            );
            assert_eq!(
                poisson_external_input::<f64, _>(8.0, 1000, 0.0, H, &mut rng),
                0.0
            );
        }
    }

    #[test]
    fn poisson_mean_at_benchmark_drive() {
        let drive = PoissonDrive::<f64>::new(8.0, 1000, 1.0, H);
        assert!((drive.lambda - 0.8).abs() < 1e-12);
        let mut rng = stream(11, Domain::Synthetic, 1);
        let n = 1_000_000;
        let total: f64 = (0..n).map(|_| drive.sample(&mut rng)).sum();
        let mean = total / n as f64;
        let sigma = (0.8f64 / n as f64).sqrt();
        assert!((mean - 0.8).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn large_lambda_branch_mean_and_variance() {
        let mut rng = stream(12, Domain::Synthetic, 2);
        let n = 200_000;
        let lambda = 25.0;
        let xs: Vec<f64> = (0..n)
            .map(|_| poisson_count(lambda, &mut rng) as f64)
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - lambda).abs() < 4.0 * (lambda / n as f64).sqrt());
        assert!((var / lambda - 1.0).abs() < 0.03);
    }

    #[test]
    fn same_stream_same_counts() {
        let a: Vec<u64> = {
            let mut r = stream(5, Domain::ExternalInput, 9);
            (0..100).map(|_| poisson_count(1.3, &mut r)).collect()
        };
        let b: Vec<u64> = {
            let mut r = stream(5, Domain::ExternalInput, 9);
            (0..100).map(|_| poisson_count(1.3, &mut r)).collect()
        };
        assert_eq!(a, b);
    }

    fn trajectory(inputs: &[f64], k: &NeuronKernel<f64>, v0: f64) -> Vec<f64> {
        let mut s = NeuronStateArrays::new(1, v0);
        let mut out = Vec::with_capacity(inputs.len());
        for (step, &x) in inputs.iter().enumerate() {
            let (ex, inh) = if x >= 0.0 { (x, 0.0) } else { (0.0, x) };
            let spikes = step_population(&mut s, k, &[ex], &[inh], step as u64);
            assert!(spikes.is_empty());
            out.push(s.v_m[0]);
        }
        out
    }

    proptest! {
        #[test]
        fn subthreshold_superposition(
            a in proptest::collection::vec(0.0f64..50.0, 200),
            b in proptest::collection::vec(0.0f64..50.0, 200),
        ) {
            let p = NeuronParams { v_th: 1e9, ..NeuronParams::default() };
            let k = kernel(&p, 0.0);
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let zero = vec![0.0; a.len()];
            let ta = trajectory(&a, &k, p.e_l);
            let tb = trajectory(&b, &k, p.e_l);
            let tab = trajectory(&sum, &k, p.e_l);
            let t0 = trajectory(&zero, &k, p.e_l);
            for i in 0..a.len() {
                let lhs = tab[i];
                let rhs = ta[i] + tb[i] - t0[i];
                prop_assert!(((lhs - rhs) / lhs).abs() <= 1e-9, "step {}: {} vs {}", i, lhs, rhs);
            }
        }

        #[test]
        fn update_is_deterministic(v0 in -80.0f64..-45.0, ie in 0.0f64..2000.0, inp in 0.0f64..500.0) {
            let p = NeuronParams::default();
            let k = kernel(&p, 0.0);
            let mut a = NeuronStateArrays::new(3, v0);
            a.i_ex = vec![ie; 3];
            let mut b = a.clone();
            for step in 0..50 {
                let sa = step_population(&mut a, &k, &[inp; 3], &[0.0; 3], step);
                let sb = step_population(&mut b, &k, &[inp; 3], &[0.0; 3], step);
                prop_assert_eq!(sa, sb);
            }
            prop_assert_eq!(a, b);
        }
    }
}
