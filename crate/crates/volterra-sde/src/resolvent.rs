//! Resolvent family tables: per-mode scalar resolvents s_lambda(t) of
//! S(t) and its Yosida-approximated families S_n(t), with the residual,
//! commutation, boundedness and convergence diagnostics.

use rayon::prelude::*;
use std::io::Write;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::kernel::Kernel;
use crate::operator::{yosida_scalar, HVector, SpectralOperator};
use crate::solver::{self, QuadratureWeights};

/// Per-mode scalar resolvent values s_{lambda_k}(t_j) on a time grid.
/// With `yosida_n` present, mode k uses the Yosida eigenvalue
/// n*lambda_k/(n - lambda_k) instead of lambda_k.
#[derive(Debug, Clone)]
pub struct ResolventTable {
    operator: SpectralOperator,
    kernel: Kernel,
    grid: TimeGrid,
    /// s[mode][grid point]
    s: Vec<Vec<f64>>,
    yosida_n: Option<u64>,
    weights: QuadratureWeights,
}

/// Solves the scalar resolvent equation per mode. All modes share one
/// weight table; a Yosida family differs only in the effective eigenvalue.
pub fn build_resolvent(
    op: &SpectralOperator,
    kernel: &Kernel,
    grid: &TimeGrid,
    yosida_n: Option<u64>,
) -> Result<ResolventTable> {
    let weights = solver::build_weights(kernel, grid)?;
    let ones = vec![1.0; grid.len()];
    let lambdas: Result<Vec<f64>> = op
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(k, &l)| match yosida_n {
            Some(n) => yosida_scalar(n, l).map_err(|e| e.in_mode(k)),
            None => Ok(l),
        })
        .collect();
    let lambdas = lambdas?;
    let s: Result<Vec<Vec<f64>>> = lambdas
        .par_iter()
        .enumerate()
        .map(|(k, &l)| solver::solve_second_kind(&weights, l, &ones).map_err(|e| e.in_mode(k)))
        .collect();
    Ok(ResolventTable {
        operator: op.clone(),
        kernel: kernel.clone(),
        grid: *grid,
        s: s?,
        yosida_n,
        weights,
    })
}

impl ResolventTable {
    pub fn operator(&self) -> &SpectralOperator {
        &self.operator
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn yosida_n(&self) -> Option<u64> {
        self.yosida_n
    }

    pub fn modes(&self) -> usize {
        self.s.len()
    }

    /// Scalar resolvent of mode k at grid index j.
    pub fn scalar(&self, k: usize, j: usize) -> f64 {
        self.s[k][j]
    }

    pub fn mode_values(&self, k: usize) -> &[f64] {
        &self.s[k]
    }

    /// Effective eigenvalue of mode k (Yosida-mapped when applicable).
    pub fn effective_eigenvalue(&self, k: usize) -> f64 {
        match self.yosida_n {
            Some(n) => yosida_scalar(n, self.operator.eigenvalue(k)).expect("checked at build"),
            None => self.operator.eigenvalue(k),
        }
    }

    /// S(t_j) v, coordinate-wise.
    pub fn apply(&self, j: usize, v: &HVector) -> Result<HVector> {
        if v.dim() != self.modes() {
            return Err(Error::Shape {
                expected: self.modes(),
                got: v.dim(),
            });
        }
        if j >= self.grid.len() {
            return Err(Error::Domain(format!(
                "grid index {j} out of range (len {})",
                self.grid.len()
            )));
        }
        Ok(HVector::new(
            v.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| self.s[k][j] * c)
                .collect(),
        ))
    }

    /// Max over the grid of |S(t)v - v - int_0^t a(t-tau) A_eff S(tau)v dtau|_H,
    /// computed with the same product-integration weights as the build.
    pub fn resolvent_equation_residual(&self, v: &HVector) -> Result<f64> {
        self.residual_with(v, &self.weights, 1)
    }

    /// The same residual evaluated on a 2x coarser subgrid with weights
    /// built for that subgrid — an independent-grid cross-validation.
    pub fn resolvent_equation_residual_coarse(&self, v: &HVector) -> Result<f64> {
        let coarse = self.grid.coarsen(2)?;
        let weights = solver::build_weights(&self.kernel, &coarse)?;
        self.residual_with(v, &weights, 2)
    }

    fn residual_with(&self, v: &HVector, weights: &QuadratureWeights, stride: usize) -> Result<f64> {
        if v.dim() != self.modes() {
            return Err(Error::Shape {
                expected: self.modes(),
                got: v.dim(),
            });
        }
        let points = weights.steps() + 1;
        // per-mode residual rows first, then the H-norm across modes
        let mut rows = vec![vec![0.0_f64; points]; self.modes()];
        for (k, row) in rows.iter_mut().enumerate() {
            let lambda = self.effective_eigenvalue(k);
            let vs: Vec<f64> = (0..points).map(|i| self.s[k][i * stride]).collect();
            let conv = weights.convolve(&vs);
            for j in 0..points {
                row[j] = (vs[j] - 1.0 - lambda * conv[j]) * v.coeffs()[k];
            }
        }
        let mut worst = 0.0_f64;
        for j in 0..points {
            let sq: f64 = rows.iter().map(|row| row[j] * row[j]).sum();
            worst = worst.max(sq.sqrt());
        }
        Ok(worst)
    }

    /// Max over the grid of |A S(t)v - S(t) A v|_H; structurally zero for
    /// diagonal operators, asserted to machine precision.
    pub fn commutation_check(&self, v: &HVector) -> Result<f64> {
        let av = self.operator.apply(v)?;
        let mut worst = 0.0_f64;
        for j in 0..self.grid.len() {
            let s_v = self.apply(j, v)?;
            let a_s_v = self.operator.apply(&s_v)?;
            let s_a_v = self.apply(j, &av)?;
            worst = worst.max(a_s_v.sub(&s_a_v).norm_h());
        }
        Ok(worst)
    }

    /// Least (M >= 1, omega >= 0) with max_k |s_k(t_j)| <= M exp(omega t_j)
    /// on the grid, via the log-envelope of the per-time maxima.
    pub fn exponential_bound_fit(&self) -> (f64, f64) {
        let envelope: Vec<f64> = (0..self.grid.len())
            .map(|j| {
                (0..self.modes())
                    .map(|k| self.s[k][j].abs())
                    .fold(0.0_f64, f64::max)
            })
            .collect();
        // smallest omega >= 0 that admits M = 1 if possible, else the
        // smallest omega for which the envelope slope is matched
        let mut omega = 0.0_f64;
        for (j, &e) in envelope.iter().enumerate().skip(1) {
            if e > 1.0 {
                omega = omega.max(e.ln() / self.grid.t(j));
            }
        }
        let m = envelope
            .iter()
            .enumerate()
            .map(|(j, &e)| e * (-omega * self.grid.t(j)).exp())
            .fold(1.0_f64, f64::max);
        (m, omega)
    }

    /// CSV export: columns t, mode_1, ..., mode_K.
    pub fn export_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "t")?;
        for k in 1..=self.modes() {
            write!(out, ",mode_{k}")?;
        }
        writeln!(out)?;
        for j in 0..self.grid.len() {
            write!(out, "{}", crate::experiments::fmt_float(self.grid.t(j)))?;
            for k in 0..self.modes() {
                write!(out, ",{}", crate::experiments::fmt_float(self.s[k][j]))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Sup over the grid of |S_n(t)v - S(t)v|_H for each n; the sequence is
/// decreasing for completely positive kernels and negative spectra.
pub fn yosida_resolvent_convergence(
    op: &SpectralOperator,
    kernel: &Kernel,
    grid: &TimeGrid,
    v: &HVector,
    n_list: &[u64],
) -> Result<Vec<f64>> {
    let base = build_resolvent(op, kernel, grid, None)?;
    let mut errors = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let approx = build_resolvent(op, kernel, grid, Some(n))?;
        let mut sup = 0.0_f64;
        for j in 0..grid.len() {
            let diff = approx.apply(j, v)?.sub(&base.apply(j, v)?);
            sup = sup.max(diff.norm_h());
        }
        errors.push(sup);
    }
    Ok(errors)
}
