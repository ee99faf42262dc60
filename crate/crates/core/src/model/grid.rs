use serde::{Deserialize, Serialize};

/// Relative tolerance used when checking that a time is a multiple of `h`.
const GRID_TOL: f64 = 1e-9;

/// Time grid of a simulation. All times in ms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationGrid {
    pub h: f64,
    pub t_model: f64,
    pub t_transient: f64,
    pub min_delay: f64,
    pub max_delay: f64,
}

impl SimulationGrid {
    /// Number of whole steps in `t`, or `None` if `t` is not on the grid.
    pub fn steps_exact(&self, t: f64) -> Option<u64> {
        if !(self.h > 0.0) || !t.is_finite() || t < 0.0 {
            return None;
        }
        let n = (t / self.h).round();
        let tol = GRID_TOL * t.abs().max(self.h);
        if (n * self.h - t).abs() <= tol {
            Some(n as u64)
        } else {
            None
        }
    }

    /// Steps in `t`, rounded to the nearest grid point.
    pub fn steps_rounded(&self, t: f64) -> u64 {
        (t / self.h).round().max(0.0) as u64
    }

    pub fn transient_steps(&self) -> u64 {
        self.steps_rounded(self.t_transient)
    }

    pub fn model_steps(&self) -> u64 {
        self.steps_rounded(self.t_model)
    }

    pub fn min_delay_steps(&self) -> u64 {
        self.steps_rounded(self.min_delay).max(1)
    }

    pub fn max_delay_steps(&self) -> u64 {
        self.steps_rounded(self.max_delay)
            .max(self.min_delay_steps())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SimulationGrid {
        SimulationGrid {
            h: 0.1,
            t_model: 1000.0,
            t_transient: 100.0,
            min_delay: 0.1,
            max_delay: 5.0,
        }
    }

    #[test]
    fn steps_on_grid() {
        let g = grid();
        assert_eq!(g.steps_exact(1.5), Some(15));
        assert_eq!(g.steps_exact(0.0), Some(0));
        assert_eq!(g.steps_exact(0.05), None);
        assert_eq!(g.steps_exact(-0.1), None);
        assert_eq!(g.model_steps(), 10_000);
        assert_eq!(g.transient_steps(), 1_000);
        assert_eq!(g.max_delay_steps(), 50);
    }
}
