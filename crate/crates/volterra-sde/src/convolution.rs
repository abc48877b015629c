//! The stochastic convolution W^Psi, its Yosida-approximated versions, the
//! interchange of A with the integral, the Cauchy-problem reformulation and
//! trajectory regularity probes.

use rayon::prelude::*;
use std::io::Write;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::kernel::Kernel;
use crate::operator::{semigroup_scalar, HVector, SpectralOperator};
use crate::resolvent::{build_resolvent, ResolventTable};
use crate::solver;
use crate::stochastic::{ito_prefix, Integrand, OperatorMapped, WienerBundle};

/// A batch of H-valued trajectories on a shared grid.
#[derive(Debug, Clone)]
pub struct TrajectorySet {
    grid: TimeGrid,
    label: String,
    /// values[path][grid index]
    values: Vec<Vec<HVector>>,
}

impl TrajectorySet {
    pub fn new(grid: TimeGrid, label: &str, values: Vec<Vec<HVector>>) -> TrajectorySet {
        debug_assert!(values.iter().all(|path| path.len() == grid.len()));
        TrajectorySet {
            grid,
            label: label.to_string(),
            values,
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn paths(&self) -> usize {
        self.values.len()
    }

    pub fn dim(&self) -> usize {
        self.values[0][0].dim()
    }

    pub fn value(&self, path: usize, j: usize) -> &HVector {
        &self.values[path][j]
    }

    pub fn path_values(&self, path: usize) -> &[HVector] {
        &self.values[path]
    }

    /// Coordinate row of one path: result[j] = X(t_j)_k.
    pub fn mode_row(&self, path: usize, k: usize) -> Vec<f64> {
        self.values[path].iter().map(|v| v.coeffs()[k]).collect()
    }

    /// Trapezoid quadrature of int_0^T |X(t)|_H^2 dt, the square-integrable
    /// trajectory witness; finite by construction on a finite grid, reported
    /// so that callers can assert it.
    pub fn trajectory_l2_sq(&self, path: usize) -> f64 {
        let dt = self.grid.dt();
        let mut acc = 0.0;
        for (j, v) in self.values[path].iter().enumerate() {
            let weight = if j == 0 || j == self.grid.steps() {
                0.5
            } else {
                1.0
            };
            let n = v.norm_h();
            acc += weight * n * n * dt;
        }
        acc
    }

    /// Max over paths and steps of |X(t_{j+1}) - X(t_j)|_H.
    pub fn max_jump(&self) -> f64 {
        let mut worst = 0.0_f64;
        for path in &self.values {
            for pair in path.windows(2) {
                worst = worst.max(pair[1].sub(&pair[0]).norm_h());
            }
        }
        worst
    }

    /// Pathwise sup-norm distance to another set on the same grid.
    pub fn sup_distance(&self, other: &TrajectorySet) -> Result<Vec<f64>> {
        if self.paths() != other.paths() || self.grid != other.grid {
            return Err(Error::Precondition(
                "sup_distance needs matching paths and grids".into(),
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.sub(y).norm_h())
                    .fold(0.0_f64, f64::max)
            })
            .collect())
    }

    /// CSV export with columns path, t, mode, value.
    pub fn export_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "path,t,mode,value")?;
        for (p, path) in self.values.iter().enumerate() {
            for (j, v) in path.iter().enumerate() {
                for (k, c) in v.coeffs().iter().enumerate() {
                    writeln!(
                        out,
                        "{p},{},{},{}",
                        crate::experiments::fmt_float(self.grid.t(j)),
                        k + 1,
                        crate::experiments::fmt_float(*c)
                    )?;
                }
            }
        }
        Ok(())
    }

    /// Ensemble summary CSV with columns t, mean_sq (mean of |X(t)|^2) and
    /// its standard error.
    pub fn summary_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,mean_sq,stderr")?;
        for j in 0..self.grid.len() {
            let samples: Vec<f64> = self
                .values
                .iter()
                .map(|path| {
                    let n = path[j].norm_h();
                    n * n
                })
                .collect();
            let (mean, stderr) = crate::stochastic::mean_and_stderr(&samples);
            writeln!(
                out,
                "{},{},{}",
                crate::experiments::fmt_float(self.grid.t(j)),
                crate::experiments::fmt_float(mean),
                crate::experiments::fmt_float(stderr)
            )?;
        }
        Ok(())
    }
}

fn check_compatible<P: Integrand>(
    table: &ResolventTable,
    psi: &P,
    bundle: &WienerBundle,
) -> Result<()> {
    if psi.dim() != table.modes() {
        return Err(Error::Shape {
            expected: table.modes(),
            got: psi.dim(),
        });
    }
    if psi.modes() > bundle.modes() {
        return Err(Error::Shape {
            expected: bundle.modes(),
            got: psi.modes(),
        });
    }
    if table.grid() != bundle.grid() {
        return Err(Error::Precondition(
            "resolvent table and bundle must share one grid".into(),
        ));
    }
    let tail: f64 = (0..psi.modes()).map(|i| psi.tail_bound(i)).sum();
    if !tail.is_finite() {
        return Err(Error::Precondition(
            "integrand tail bounds must have a finite sum".into(),
        ));
    }
    Ok(())
}

/// One path of W^Psi(t_j) = sum_i sum_{l<j} S(t_j - t_l) Psi_i(t_l) dW_i(l),
/// left-point in Psi and in the resolvent lag.
pub fn stochastic_convolution<P: Integrand>(
    table: &ResolventTable,
    psi: &P,
    bundle: &WienerBundle,
) -> Result<TrajectorySet> {
    check_compatible(table, psi, bundle)?;
    let grid = *table.grid();
    let steps = grid.steps();
    let dim = table.modes();

    // collapse the mode series first: g[l] = sum_i Psi_i(t_l) dW_i(l)
    let mut g = Vec::with_capacity(steps);
    for l in 0..steps {
        let state = bundle.prefix(l);
        let mut acc = HVector::zeros(dim);
        for i in 0..psi.modes() {
            acc.axpy(bundle.increment(i, l), &psi.eval(i, l, &state));
        }
        g.push(acc);
    }

    let mut values = vec![HVector::zeros(dim); grid.len()];
    for k in 0..dim {
        let s = table.mode_values(k);
        for (j, value) in values.iter_mut().enumerate().skip(1) {
            let mut acc = 0.0;
            for (l, gl) in g.iter().enumerate().take(j) {
                acc += s[j - l] * gl.coeffs()[k];
            }
            value.coeffs_mut()[k] = acc;
        }
    }
    Ok(TrajectorySet::new(grid, "stochastic convolution", vec![values]))
}

/// Monte Carlo ensemble of convolutions: path p uses the (seed, p) bundle.
pub fn stochastic_convolution_ensemble<P: Integrand>(
    table: &ResolventTable,
    psi: &P,
    seed: u64,
    paths: usize,
) -> Result<TrajectorySet> {
    let values: Result<Vec<Vec<HVector>>> = (0..paths)
        .into_par_iter()
        .map(|p| {
            let bundle = WienerBundle::sample_path(table.grid(), psi.modes(), seed, p as u64)?;
            let single = stochastic_convolution(table, psi, &bundle)?;
            Ok(single.values.into_iter().next().unwrap())
        })
        .collect();
    Ok(TrajectorySet::new(
        *table.grid(),
        "stochastic convolution ensemble",
        values?,
    ))
}

/// Both sides of the interchange A W^Psi vs the convolution with integrand
/// A Psi; returns the modewise image together with the max discrepancy,
/// which must vanish to machine precision for the diagonal operator.
pub fn apply_a_to_convolution<P: Integrand + Clone>(
    op: &SpectralOperator,
    table: &ResolventTable,
    psi: &P,
    bundle: &WienerBundle,
) -> Result<(TrajectorySet, f64)> {
    let direct = stochastic_convolution(table, psi, bundle)?;
    let mapped = stochastic_convolution(table, &OperatorMapped::new(op, psi.clone())?, bundle)?;
    let applied: Vec<Vec<HVector>> = direct
        .values
        .iter()
        .map(|path| path.iter().map(|v| op.apply(v)).collect())
        .collect::<Result<Vec<_>>>()?;
    let applied = TrajectorySet::new(*table.grid(), "A W^Psi", applied);
    let discrepancy = applied
        .sup_distance(&mapped)?
        .into_iter()
        .fold(0.0_f64, f64::max);
    if discrepancy > 1e-12 {
        return Err(Error::Numeric(format!(
            "interchange discrepancy {discrepancy:.3e} exceeds 1e-12"
        )));
    }
    Ok((applied, discrepancy))
}

/// W_n^Psi: the convolution against the Yosida family S_n on the same
/// bundle, so differences to W^Psi are pathwise (common random numbers).
pub fn yosida_convolution<P: Integrand>(
    op: &SpectralOperator,
    kernel: &Kernel,
    grid: &TimeGrid,
    n: u64,
    psi: &P,
    bundle: &WienerBundle,
) -> Result<TrajectorySet> {
    let table = build_resolvent(op, kernel, grid, Some(n))?;
    stochastic_convolution(&table, psi, bundle)
}

#[derive(Debug)]
pub struct CauchyReport {
    pub w_direct: TrajectorySet,
    pub w_reformulated: TrajectorySet,
    pub y: TrajectorySet,
    /// sup over the grid of |W_direct - W_reformulated|_H (single path).
    pub sup_discrepancy: f64,
    /// Max interior finite-difference residual of dY/dt = cAY + forcing.
    pub ode_residual: f64,
}

/// Rewrites W^Psi through the Cauchy problem of the semigroup generated by
/// A: with c = a(0) finite and nonzero,
/// W(t) = A int_0^t e^{c(t-tau)A} [a-dot * W (tau) + c int_0^tau Psi dW] dtau
///        + int_0^t Psi dW,
/// and Y(t) is the inner semigroup convolution.
pub fn cauchy_reformulation<P: Integrand>(
    op: &SpectralOperator,
    kernel: &Kernel,
    grid: &TimeGrid,
    psi: &P,
    bundle: &WienerBundle,
) -> Result<CauchyReport> {
    let c = gate_a0(kernel)?;
    let table = build_resolvent(op, kernel, grid, None)?;
    let direct = stochastic_convolution(&table, psi, bundle)?;
    let ito = ito_prefix(psi, bundle)?;
    let dweights = solver::build_derivative_weights(kernel, grid)?;

    let dim = op.dim();
    let points = grid.len();
    let dt = grid.dt();
    let mut y = vec![HVector::zeros(dim); points];
    let mut reform = vec![HVector::zeros(dim); points];
    let mut ode_residual = 0.0_f64;
    for k in 0..dim {
        let lambda = op.eigenvalue(k);
        let w_row = direct.mode_row(0, k);
        let wtilde = dweights.convolve(&w_row);
        let inner: Vec<f64> = (0..points)
            .map(|j| wtilde[j] + c * ito[j].coeffs()[k])
            .collect();
        // left-point semigroup convolution Y_k(t_j) = int e^{c lambda (t_j - t_l)} inner,
        // matching the left-point rule of every other discretization here
        let mut y_row = vec![0.0; points];
        for j in 1..points {
            let mut acc = 0.0;
            for (l, &f) in inner.iter().enumerate().take(j) {
                acc += semigroup_scalar(grid.t(j) - grid.t(l), c * lambda) * f * dt;
            }
            y_row[j] = acc;
        }
        for j in 0..points {
            y[j].coeffs_mut()[k] = y_row[j];
            reform[j].coeffs_mut()[k] = lambda * y_row[j] + ito[j].coeffs()[k];
        }
        for j in 1..points - 1 {
            let fd = (y_row[j + 1] - y_row[j - 1]) / (2.0 * dt);
            ode_residual = ode_residual.max((fd - (c * lambda * y_row[j] + inner[j])).abs());
        }
    }

    let y = TrajectorySet::new(*grid, "Y", vec![y]);
    let reform = TrajectorySet::new(*grid, "reformulated W^Psi", vec![reform]);
    let sup_discrepancy = direct
        .sup_distance(&reform)?
        .into_iter()
        .fold(0.0_f64, f64::max);
    Ok(CauchyReport {
        w_direct: direct,
        w_reformulated: reform,
        y,
        sup_discrepancy,
        ode_residual,
    })
}

/// Deterministic-forcing variant of the Y-ODE check: the Wiener integral is
/// replaced by g(t) = sin(t) v, the convolution W = a * AW + g is solved
/// per mode, and the finite-difference residual of dY/dt = cAY + forcing
/// is returned; O(dt) by construction.
pub fn deterministic_cauchy_ode_residual(
    op: &SpectralOperator,
    kernel: &Kernel,
    grid: &TimeGrid,
) -> Result<f64> {
    let c = gate_a0(kernel)?;
    let weights = solver::build_weights(kernel, grid)?;
    let dweights = solver::build_derivative_weights(kernel, grid)?;
    let dt = grid.dt();
    let points = grid.len();
    let v = 1.0 / (op.dim() as f64).sqrt();
    let g: Vec<f64> = grid.points().map(|t| t.sin() * v).collect();

    let mut worst = 0.0_f64;
    for k in 0..op.dim() {
        let lambda = op.eigenvalue(k);
        let w_row = solver::solve_second_kind(&weights, lambda, &g)?;
        let wtilde = dweights.convolve(&w_row);
        let inner: Vec<f64> = (0..points).map(|j| wtilde[j] + c * g[j]).collect();
        let mut y_row = vec![0.0; points];
        for j in 1..points {
            let mut acc = 0.0;
            for (l, &f) in inner.iter().enumerate().take(j) {
                acc += semigroup_scalar(grid.t(j) - grid.t(l), c * lambda) * f * dt;
            }
            y_row[j] = acc;
        }
        for j in 1..points - 1 {
            let fd = (y_row[j + 1] - y_row[j - 1]) / (2.0 * dt);
            worst = worst.max((fd - (c * lambda * y_row[j] + inner[j])).abs());
        }
    }
    Ok(worst)
}

fn gate_a0(kernel: &Kernel) -> Result<f64> {
    let c = kernel.a0();
    if !kernel.differentiable() || !c.is_finite() || c == 0.0 {
        return Err(Error::Unsupported(format!(
            "Cauchy reformulation needs a differentiable kernel with finite nonzero a(0), got a(0) = {c}"
        )));
    }
    Ok(c)
}

#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub max_jump: f64,
    /// Log-log regression slope of the RMS modulus of continuity against
    /// the lag; NaN when the trajectories are constant.
    pub holder_estimate: f64,
    /// The regression data: (lag in time units, RMS modulus).
    pub moduli: Vec<(f64, f64)>,
}

/// Continuity diagnostics: the largest one-step jump and an empirical
/// Hoelder exponent from lags 1..=10 (one decade).
pub fn regularity_probe(trajectories: &TrajectorySet) -> Result<RegularityReport> {
    let steps = trajectories.grid().steps();
    if steps < 2 {
        return Err(Error::Precondition("regularity probe needs >= 2 steps".into()));
    }
    let max_lag = 10.min(steps / 2).max(1);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut moduli = Vec::new();
    for m in 1..=max_lag {
        let mut acc = 0.0;
        let mut count = 0usize;
        for p in 0..trajectories.paths() {
            let path = trajectories.path_values(p);
            for j in 0..path.len() - m {
                let d = path[j + m].sub(&path[j]).norm_h();
                acc += d * d;
                count += 1;
            }
        }
        let rms = (acc / count as f64).sqrt();
        let lag = m as f64 * trajectories.grid().dt();
        moduli.push((lag, rms));
        if rms > 0.0 {
            xs.push(lag.ln());
            ys.push(rms.ln());
        }
    }
    let holder_estimate = if xs.len() >= 2 {
        regression_slope(&xs, &ys)
    } else {
        f64::NAN
    };
    Ok(RegularityReport {
        max_jump: trajectories.max_jump(),
        holder_estimate,
        moduli,
    })
}

fn regression_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    sxy / sxx
}
