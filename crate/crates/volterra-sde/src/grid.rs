use crate::error::{Error, Result};

/// Uniform discretization of [0, t_end] with `steps` intervals
/// (so `steps + 1` grid points, t_0 = 0 and t_steps = t_end).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    steps: usize,
    dt: f64,
}

impl TimeGrid {
    pub fn new(t_end: f64, steps: usize) -> Result<TimeGrid> {
        if !(t_end > 0.0) {
            return Err(Error::Domain(format!("t_end = {t_end} must be positive")));
        }
        if steps < 2 {
            return Err(Error::Domain(format!("steps = {steps} must be >= 2")));
        }
        Ok(TimeGrid {
            t_end,
            steps,
            dt: t_end / steps as f64,
        })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of grid points, `steps + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t(&self, j: usize) -> f64 {
        debug_assert!(j <= self.steps);
        j as f64 * self.dt
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |j| self.t(j))
    }

    /// Same interval, `factor` times as many steps.
    pub fn refine(&self, factor: usize) -> TimeGrid {
        TimeGrid::new(self.t_end, self.steps * factor).expect("refined grid is valid")
    }

    /// Same interval, `factor` times fewer steps; `steps` must divide evenly.
    pub fn coarsen(&self, factor: usize) -> Result<TimeGrid> {
        if factor == 0 || self.steps % factor != 0 || self.steps / factor < 2 {
            return Err(Error::Domain(format!(
                "cannot coarsen a {}-step grid by factor {}",
                self.steps, factor
            )));
        }
        TimeGrid::new(self.t_end, self.steps / factor)
    }
}
