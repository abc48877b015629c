//! Theorem-level verification: the strong-solution identity, the weak form
//! tested against D(A*) vectors, mild/weak consistency, and the convergence
//! suite for the Yosida-approximated convolutions.

use rayon::prelude::*;

use crate::convolution::stochastic_convolution;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::kernel::Kernel;
use crate::operator::{j_scalar, HVector, SpectralOperator};
use crate::resolvent::{build_resolvent, ResolventTable};
use crate::solver::{self, QuadratureWeights};
use crate::stochastic::{ito_prefix, Integrand, WienerBundle};

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub name: String,
    pub grid: TimeGrid,
    pub paths: usize,
    pub residual_sup_mean: f64,
    pub residual_sup_per_path: Vec<f64>,
    pub refinement_rates: Option<Vec<f64>>,
    pub pass: bool,
    pub tolerance_used: f64,
}

impl VerificationReport {
    fn from_sups(
        name: &str,
        grid: TimeGrid,
        sups: Vec<f64>,
        tolerance: f64,
    ) -> VerificationReport {
        let mean = sups.iter().sum::<f64>() / sups.len() as f64;
        VerificationReport {
            name: name.to_string(),
            grid,
            paths: sups.len(),
            residual_sup_mean: mean,
            residual_sup_per_path: sups,
            refinement_rates: None,
            pass: mean <= tolerance,
            tolerance_used: tolerance,
        }
    }
}

/// Default pass tolerance for the identity residuals: the discretization
/// is left-point consistent, so the residual scales like sqrt(dt) at worst,
/// with a prefactor growing with the stiffest eigenvalue.
pub fn ito_consistency_tolerance(grid: &TimeGrid, op: &SpectralOperator) -> f64 {
    let stiffness = op.eigenvalues().iter().map(|l| l.abs()).fold(0.0_f64, f64::max);
    10.0 * grid.dt().sqrt() * (1.0 + stiffness * grid.dt().sqrt())
}

/// sup_t |W(t) - (a * AW)(t) - ito(t)|_H and the integrability witness
/// int_0^T |a(T-tau) AW(tau)|_H dtau for one path.
fn strong_residual_single<P: Integrand>(
    table: &ResolventTable,
    weights: &QuadratureWeights,
    psi: &P,
    bundle: &WienerBundle,
) -> Result<(f64, f64)> {
    let grid = table.grid();
    let points = grid.len();
    let dim = table.modes();
    let w = stochastic_convolution(table, psi, bundle)?;
    let ito = ito_prefix(psi, bundle)?;

    let mut sq = vec![0.0_f64; points];
    let mut aw_rows = Vec::with_capacity(dim);
    for k in 0..dim {
        let lambda = table.operator().eigenvalue(k);
        let aw: Vec<f64> = w.mode_row(0, k).iter().map(|x| lambda * x).collect();
        let conv = weights.convolve(&aw);
        for j in 0..points {
            let r = w.value(0, j).coeffs()[k] - conv[j] - ito[j].coeffs()[k];
            sq[j] += r * r;
        }
        aw_rows.push(aw);
    }
    let sup = sq.iter().map(|s| s.sqrt()).fold(0.0_f64, f64::max);

    // quadrature of int_0^T |a(T - tau) AW(tau)|_H dtau via the terminal row
    let aw_norm: Vec<f64> = (0..points)
        .map(|j| {
            aw_rows
                .iter()
                .map(|row| row[j] * row[j])
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let witness = weights.convolve_at(&aw_norm, points - 1);
    if !witness.is_finite() {
        return Err(Error::Numeric(
            "integrability witness is not finite".into(),
        ));
    }
    Ok((sup, witness))
}

/// Strong-solution residual of one path:
/// W(t) = int_0^t a(t-tau) A W(tau) dtau + sum_i int_0^t Psi_i dW_i.
pub fn strong_solution_residual<P: Integrand>(
    op: &SpectralOperator,
    kernel: &Kernel,
    grid: &TimeGrid,
    psi: &P,
    bundle: &WienerBundle,
    tolerance: f64,
) -> Result<VerificationReport> {
    let table = build_resolvent(op, kernel, grid, None)?;
    let weights = solver::build_weights(kernel, grid)?;
    let (sup, _witness) = strong_residual_single(&table, &weights, psi, bundle)?;
    Ok(VerificationReport::from_sups(
        "strong-solution residual",
        *grid,
        vec![sup],
        tolerance,
    ))
}

/// Ensemble version over the (seed, path) bundle family.
pub fn strong_solution_residual_ensemble<P: Integrand>(
    op: &SpectralOperator,
    kernel: &Kernel,
    grid: &TimeGrid,
    psi: &P,
    seed: u64,
    paths: usize,
    tolerance: f64,
) -> Result<VerificationReport> {
    let table = build_resolvent(op, kernel, grid, None)?;
    let weights = solver::build_weights(kernel, grid)?;
    let sups: Result<Vec<f64>> = (0..paths)
        .into_par_iter()
        .map(|p| {
            let bundle = WienerBundle::sample_path(grid, psi.modes(), seed, p as u64)?;
            strong_residual_single(&table, &weights, psi, &bundle).map(|(sup, _)| sup)
        })
        .collect();
    Ok(VerificationReport::from_sups(
        "strong-solution residual",
        *grid,
        sups?,
        tolerance,
    ))
}

#[derive(Debug, Clone)]
pub struct RefinementStudy {
    pub steps: Vec<usize>,
    pub sup_means: Vec<f64>,
    /// rates[i] = observed order between consecutive step counts.
    pub rates: Vec<f64>,
}

/// Strong residual under simultaneous (dt, bundle) refinement: the finest
/// bundle is sampled once per path and coarsened to every other level, so
/// every level sees the same Brownian path.
pub fn strong_refinement_study<P: Integrand>(
    op: &SpectralOperator,
    kernel: &Kernel,
    t_end: f64,
    steps_list: &[usize],
    psi: &P,
    seed: u64,
    paths: usize,
) -> Result<RefinementStudy> {
    if steps_list.len() < 2 || steps_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition(
            "refinement study needs an increasing steps list".into(),
        ));
    }
    let finest = *steps_list.last().unwrap();
    if steps_list.iter().any(|&s| finest % s != 0) {
        return Err(Error::Precondition(
            "every step count must divide the finest one".into(),
        ));
    }
    let levels: Result<Vec<(TimeGrid, ResolventTable, QuadratureWeights)>> = steps_list
        .iter()
        .map(|&s| {
            let grid = TimeGrid::new(t_end, s)?;
            let table = build_resolvent(op, kernel, &grid, None)?;
            let weights = solver::build_weights(kernel, &grid)?;
            Ok((grid, table, weights))
        })
        .collect();
    let levels = levels?;
    let fine_grid = levels.last().unwrap().0;

    let per_path: Result<Vec<Vec<f64>>> = (0..paths)
        .into_par_iter()
        .map(|p| {
            let fine = WienerBundle::sample_path(&fine_grid, psi.modes(), seed, p as u64)?;
            levels
                .iter()
                .map(|(grid, table, weights)| {
                    let bundle = if grid.steps() == finest {
                        fine.clone()
                    } else {
                        fine.coarsen(finest / grid.steps())?
                    };
                    strong_residual_single(table, weights, psi, &bundle).map(|(sup, _)| sup)
                })
                .collect()
        })
        .collect();
    let per_path = per_path?;

    let sup_means: Vec<f64> = (0..steps_list.len())
        .map(|lvl| per_path.iter().map(|row| row[lvl]).sum::<f64>() / paths as f64)
        .collect();
    let rates = sup_means
        .windows(2)
        .zip(steps_list.windows(2))
        .map(|(e, s)| (e[0] / e[1]).ln() / (s[1] as f64 / s[0] as f64).ln())
        .collect();
    Ok(RefinementStudy {
        steps: steps_list.to_vec(),
        sup_means,
        rates,
    })
}

/// Weak-form residual for one path and one test vector xi in D(A*):
/// <X(t), xi> = <(a * X)(t), A* xi> + <ito(t), xi>, with X = W^Psi.
pub fn weak_solution_residual<P: Integrand>(
    op: &SpectralOperator,
    kernel: &Kernel,
    grid: &TimeGrid,
    psi: &P,
    bundle: &WienerBundle,
    xi: &HVector,
    tolerance: f64,
) -> Result<VerificationReport> {
    if xi.dim() != op.dim() {
        return Err(Error::Shape {
            expected: op.dim(),
            got: xi.dim(),
        });
    }
    let table = build_resolvent(op, kernel, grid, None)?;
    let weights = solver::build_weights(kernel, grid)?;
    let w = stochastic_convolution(&table, psi, bundle)?;
    let ito = ito_prefix(psi, bundle)?;
    let a_xi = op.apply(xi)?;

    let points = grid.len();
    let mut residual = vec![0.0_f64; points];
    for k in 0..op.dim() {
        if xi.coeffs()[k] == 0.0 {
            continue;
        }
        let conv = weights.convolve(&w.mode_row(0, k));
        for j in 0..points {
            residual[j] += w.value(0, j).coeffs()[k] * xi.coeffs()[k]
                - conv[j] * a_xi.coeffs()[k]
                - ito[j].coeffs()[k] * xi.coeffs()[k];
        }
    }
    let sup = residual.iter().map(|r| r.abs()).fold(0.0_f64, f64::max);
    Ok(VerificationReport::from_sups(
        "weak-solution residual",
        *grid,
        vec![sup],
        tolerance,
    ))
}

/// Mild/weak consistency: the process defined by the mild formula (the
/// resolvent convolution) must satisfy the weak identity for every basis
/// test vector; reports the worst one.
pub fn mild_weak_equivalence_check<P: Integrand>(
    op: &SpectralOperator,
    kernel: &Kernel,
    grid: &TimeGrid,
    psi: &P,
    bundle: &WienerBundle,
    tolerance: f64,
) -> Result<VerificationReport> {
    let mut worst = 0.0_f64;
    for k in 0..op.dim() {
        let xi = HVector::basis(op.dim(), k);
        let report = weak_solution_residual(op, kernel, grid, psi, bundle, &xi, tolerance)?;
        worst = worst.max(report.residual_sup_mean);
    }
    Ok(VerificationReport::from_sups(
        "mild/weak equivalence",
        *grid,
        vec![worst],
        tolerance,
    ))
}

#[derive(Debug, Clone)]
pub struct YosidaSuiteReport {
    pub n_list: Vec<u64>,
    /// e1[i] = sup_t mean_p |W_n - W|_H^2 at n = n_list[i].
    pub e1: Vec<f64>,
    /// e2[i] = sup_t mean_p |A_n W_n - A W|_H^2.
    pub e2: Vec<f64>,
    /// sup_t mean_p of the two decomposition terms; 3 (n1_sq + n2_sq)
    /// bounds e2 per n.
    pub n1_sq: Vec<f64>,
    pub n2_sq: Vec<f64>,
    pub paths: usize,
}

impl YosidaSuiteReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.e1.windows(2).all(|w| w[1] < w[0]) && self.e2.windows(2).all(|w| w[1] < w[0])
    }

    pub fn decomposition_bound_holds(&self) -> bool {
        self.e2
            .iter()
            .zip(self.n1_sq.iter().zip(&self.n2_sq))
            .all(|(e2, (n1, n2))| *e2 <= 3.0 * (n1 + n2) * (1.0 + 1e-12) + 1e-300)
    }
}

/// Common-random-number estimates of sup_t E|W_n - W|^2 and
/// sup_t E|A_n W_n - A W|^2 along n_list, with the decomposition
/// A_n W_n - A W = J_n [A (W_n - W)] + (A_n - A) W.
pub fn yosida_strong_convergence_suite<P: Integrand>(
    op: &SpectralOperator,
    kernel: &Kernel,
    grid: &TimeGrid,
    psi: &P,
    seed: u64,
    n_list: &[u64],
    paths: usize,
) -> Result<YosidaSuiteReport> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("n_list must be increasing".into()));
    }
    let base = build_resolvent(op, kernel, grid, None)?;
    let tables: Result<Vec<ResolventTable>> = n_list
        .iter()
        .map(|&n| build_resolvent(op, kernel, grid, Some(n)))
        .collect();
    let tables = tables?;
    let points = grid.len();
    let dim = op.dim();

    // per path, per n, per grid point: the four squared norms
    struct PathRow {
        e1: Vec<Vec<f64>>,
        e2: Vec<Vec<f64>>,
        n1: Vec<Vec<f64>>,
        n2: Vec<Vec<f64>>,
    }
    let rows: Result<Vec<PathRow>> = (0..paths)
        .into_par_iter()
        .map(|p| {
            let bundle = WienerBundle::sample_path(grid, psi.modes(), seed, p as u64)?;
            let w = stochastic_convolution(&base, psi, &bundle)?;
            let mut row = PathRow {
                e1: vec![vec![0.0; points]; n_list.len()],
                e2: vec![vec![0.0; points]; n_list.len()],
                n1: vec![vec![0.0; points]; n_list.len()],
                n2: vec![vec![0.0; points]; n_list.len()],
            };
            for (i, table_n) in tables.iter().enumerate() {
                let wn = stochastic_convolution(table_n, psi, &bundle)?;
                let n = n_list[i];
                for k in 0..dim {
                    let lambda = op.eigenvalue(k);
                    let lambda_n = table_n.effective_eigenvalue(k);
                    let jn = j_scalar(n, lambda)?;
                    for j in 0..points {
                        let d = wn.value(0, j).coeffs()[k] - w.value(0, j).coeffs()[k];
                        row.e1[i][j] += d * d;
                        let a_gap = lambda_n * wn.value(0, j).coeffs()[k]
                            - lambda * w.value(0, j).coeffs()[k];
                        row.e2[i][j] += a_gap * a_gap;
                        // A_n(W_n - W) = J_n A (W_n - W)
                        let t1 = jn * lambda * d;
                        row.n1[i][j] += t1 * t1;
                        let t2 = (lambda_n - lambda) * w.value(0, j).coeffs()[k];
                        row.n2[i][j] += t2 * t2;
                    }
                }
            }
            Ok(row)
        })
        .collect();
    let rows = rows?;

    let sup_mean = |select: &dyn Fn(&PathRow) -> &Vec<Vec<f64>>, i: usize| -> f64 {
        (0..points)
            .map(|j| rows.iter().map(|r| select(r)[i][j]).sum::<f64>() / paths as f64)
            .fold(0.0_f64, f64::max)
    };
    let mut report = YosidaSuiteReport {
        n_list: n_list.to_vec(),
        e1: Vec::new(),
        e2: Vec::new(),
        n1_sq: Vec::new(),
        n2_sq: Vec::new(),
        paths,
    };
    for i in 0..n_list.len() {
        report.e1.push(sup_mean(&|r| &r.e1, i));
        report.e2.push(sup_mean(&|r| &r.e2, i));
        report.n1_sq.push(sup_mean(&|r| &r.n1, i));
        report.n2_sq.push(sup_mean(&|r| &r.n2, i));
    }
    Ok(report)
}
