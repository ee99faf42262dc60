use serde::{Deserialize, Serialize};

/// Wall-clock seconds spent in each phase of the measured window.
///
/// Each named phase is the per-interval maximum over virtual processes,
/// summed over intervals; `t_other` is whatever the three phases do not
/// account for.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimers {
    pub t_update: f64,
    pub t_deliver: f64,
    pub t_communicate: f64,
    pub t_other: f64,
    pub t_total: f64,
}

impl PhaseTimers {
    pub(crate) fn from_nanos(update: u64, deliver: u64, communicate: u64, total: u64) -> Self {
        let named = update + deliver + communicate;
        debug_assert!(named <= total, "phase times exceed the measured window");
        let s = |ns: u64| ns as f64 * 1e-9;
        Self {
            t_update: s(update),
            t_deliver: s(deliver),
            t_communicate: s(communicate),
            t_other: s(total.saturating_sub(named)),
            t_total: s(total),
        }
    }

    pub fn named_sum(&self) -> f64 {
        self.t_update + self.t_deliver + self.t_communicate
    }
}
