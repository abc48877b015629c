//! Product-integration quadrature for convolutions with (possibly weakly
//! singular) kernels, and the forward solve of scalar linear Volterra
//! equations of the second kind on a uniform grid.

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::kernel::Kernel;

/// Lower-triangular product-integration weights for
/// int_0^{t_j} a(t_j - tau) x(tau) dtau with x piecewise linear.
///
/// On a uniform grid the weights depend only on the lag, so only two
/// per-lag arrays are stored: `wl[m]` multiplies the value at the left
/// endpoint of the subinterval with lag index m, `wr[m]` the right one.
#[derive(Debug, Clone)]
pub struct QuadratureWeights {
    dt: f64,
    steps: usize,
    wl: Vec<f64>,
    wr: Vec<f64>,
    /// cumulative kernel mass: masses[j] = int_0^{t_j} a(u) du
    masses: Vec<f64>,
}

impl QuadratureWeights {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Dense weight w[j][i]; zero outside 0 <= i <= j.
    pub fn weight(&self, j: usize, i: usize) -> f64 {
        if i > j || j > self.steps {
            return 0.0;
        }
        let mut w = 0.0;
        if i < j {
            w += self.wl[j - i - 1];
        }
        if i >= 1 {
            w += self.wr[j - i];
        }
        w
    }

    /// Quadrature of int_0^{t_j} a(t_j - tau) x(tau) dtau.
    pub fn convolve_at(&self, x: &[f64], j: usize) -> f64 {
        debug_assert!(j < x.len());
        let mut acc = 0.0;
        for m in 0..j {
            acc += self.wl[m] * x[j - 1 - m] + self.wr[m] * x[j - m];
        }
        acc
    }

    /// All rows at once; result[j] = convolve_at(x, j).
    pub fn convolve(&self, x: &[f64]) -> Vec<f64> {
        (0..x.len()).map(|j| self.convolve_at(x, j)).collect()
    }

    /// int_0^{t_j} a(u) du (the row sum against x = 1).
    pub fn kernel_mass(&self, j: usize) -> f64 {
        self.masses[j]
    }
}

fn build_from_moments(
    grid: &TimeGrid,
    moments: impl Fn(f64, f64) -> Result<(f64, f64)>,
) -> Result<QuadratureWeights> {
    let dt = grid.dt();
    let steps = grid.steps();
    let mut wl = Vec::with_capacity(steps);
    let mut wr = Vec::with_capacity(steps);
    let mut masses = Vec::with_capacity(steps + 1);
    masses.push(0.0);
    for m in 0..steps {
        let (u0, u1) = (m as f64 * dt, (m + 1) as f64 * dt);
        let (a0, a1) = moments(u0, u1)?;
        if !a0.is_finite() || !a1.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite kernel moment on [{u0}, {u1}]"
            )));
        }
        // x linear on the subinterval: the value at lag (m+1)dt carries
        // the (u - u0) profile, the value at lag m*dt the (u1 - u) one
        wl.push((a1 - u0 * a0) / dt);
        wr.push(((u1) * a0 - a1) / dt);
        masses.push(masses[m] + a0);
    }
    Ok(QuadratureWeights {
        dt,
        steps,
        wl,
        wr,
        masses,
    })
}

/// Product-integration weights for the kernel itself.
pub fn build_weights(kernel: &Kernel, grid: &TimeGrid) -> Result<QuadratureWeights> {
    build_from_moments(grid, |u0, u1| kernel.segment_moments(u0, u1))
}

/// Product-integration weights for a-dot (differentiable kernels only).
pub fn build_derivative_weights(kernel: &Kernel, grid: &TimeGrid) -> Result<QuadratureWeights> {
    build_from_moments(grid, |u0, u1| kernel.derivative_segment_moments(u0, u1))
}

/// Forward solve of x(t) = f(t) + lambda * int_0^t a(t-tau) x(tau) dtau.
///
/// The Volterra structure is lower triangular, so the solve is causal:
/// the implicit diagonal term is moved to the left side at each step.
pub fn solve_second_kind(
    weights: &QuadratureWeights,
    lambda: f64,
    f: &[f64],
) -> Result<Vec<f64>> {
    if f.len() != weights.steps + 1 {
        return Err(Error::Shape {
            expected: weights.steps + 1,
            got: f.len(),
        });
    }
    let mut x = vec![0.0; f.len()];
    x[0] = f[0];
    for j in 1..f.len() {
        let mut acc = 0.0;
        for m in 0..j {
            acc += weights.wl[m] * x[j - 1 - m];
            if m > 0 {
                acc += weights.wr[m] * x[j - m];
            }
        }
        // diagonal (i = j) only receives the wr[0] contribution
        let pivot = 1.0 - lambda * weights.wr[0];
        if pivot.abs() < 1e-12 {
            return Err(Error::SingularStep {
                step: j,
                t: j as f64 * weights.dt,
                pivot: pivot.abs(),
            });
        }
        x[j] = (f[j] + lambda * acc) / pivot;
    }
    Ok(x)
}
