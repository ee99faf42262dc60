use crate::connectivity::Channel;
use crate::scalar::Scalar;

/// Future synaptic input of a set of neurons, one slot per step, stored as
/// `slot * n_neurons + neuron` for each channel.
#[derive(Clone, Debug)]
pub struct RingBuffer<T> {
    n_neurons: usize,
    slots: usize,
    ex: Vec<T>,
    inh: Vec<T>,
}

impl<T: Scalar> RingBuffer<T> {
    /// Holds `max_delay_steps + min_delay_steps` slots, enough for any spike
    /// emitted in the previous communication interval.
    pub fn new(n_neurons: usize, min_delay_steps: usize, max_delay_steps: usize) -> Self {
        let slots = (max_delay_steps + min_delay_steps).max(1);
        Self {
            n_neurons,
            slots,
            ex: vec![T::zero(); slots * n_neurons],
            inh: vec![T::zero(); slots * n_neurons],
        }
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    #[inline]
    pub fn add(&mut self, neuron: usize, channel: Channel, step: u64, value: T) {
        let i = (step % self.slots as u64) as usize * self.n_neurons + neuron;
        match channel {
            Channel::Excitatory => self.ex[i] += value,
            Channel::Inhibitory => self.inh[i] += value,
        }
    }

    /// Moves the input due at `step` into `out_ex`/`out_in` and clears the slot.
    pub fn take(&mut self, step: u64, out_ex: &mut [T], out_in: &mut [T]) {
        let base = (step % self.slots as u64) as usize * self.n_neurons;
        let range = base..base + self.n_neurons;
        out_ex.copy_from_slice(&self.ex[range.clone()]);
        out_in.copy_from_slice(&self.inh[range.clone()]);
        self.ex[range.clone()].fill(T::zero());
        self.inh[range].fill(T::zero());
    }

    pub fn is_clear(&self) -> bool {
        self.ex.iter().chain(&self.inh).all(|x| x.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulates_and_clears() {
        let mut r = RingBuffer::<f64>::new(3, 1, 4);
        assert_eq!(r.slots(), 5);
        r.add(1, Channel::Excitatory, 7, 2.0);
        r.add(1, Channel::Excitatory, 7, 0.5);
        r.add(2, Channel::Inhibitory, 7, -1.0);
        r.add(0, Channel::Excitatory, 8, 9.0);
        let (mut ex, mut inh) = (vec![0.0; 3], vec![0.0; 3]);
        r.take(7, &mut ex, &mut inh);
        assert_eq!(ex, vec![0.0, 2.5, 0.0]);
        assert_eq!(inh, vec![0.0, 0.0, -1.0]);
        r.take(7, &mut ex, &mut inh);
        assert_eq!(ex, vec![0.0; 3]);
        r.take(8, &mut ex, &mut inh);
        assert_eq!(ex, vec![9.0, 0.0, 0.0]);
        assert!(r.is_clear());
    }

    #[test]
    fn wraps_around() {
        let mut r = RingBuffer::<f32>::new(1, 1, 2);
        let (mut ex, mut inh) = ([0.0f32], [0.0f32]);
        for step in 0..20u64 {
            r.add(0, Channel::Excitatory, step + 2, step as f32);
            r.take(step, &mut ex, &mut inh);
            let expected = if step >= 2 { (step - 2) as f32 } else { 0.0 };
            assert_eq!(ex[0], expected);
        }
    }
}
