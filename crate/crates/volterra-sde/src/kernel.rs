//! Scalar convolution kernels a(t) and the complete-positivity check.

use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::solver;
use crate::special::gamma;

/// Absolute tolerance for the nonnegativity check: discretization can
/// produce tiny negative overshoots for genuinely nonnegative solutions.
pub const TOL_CP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    /// a(t) = t^(alpha-1) / Gamma(alpha), alpha in (0, 2).
    Fractional { alpha: f64 },
    /// a(t) = exp(-t).
    Exponential,
    /// Piecewise-linear kernel given on its own strictly increasing grid
    /// starting at 0.
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    kind: KernelKind,
}

impl Kernel {
    pub fn fractional(alpha: f64) -> Result<Kernel> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::Domain(format!(
                "fractional kernel needs alpha in (0, 2), got {alpha}"
            )));
        }
        Ok(Kernel {
            kind: KernelKind::Fractional { alpha },
        })
    }

    pub fn exponential() -> Kernel {
        Kernel {
            kind: KernelKind::Exponential,
        }
    }

    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>) -> Result<Kernel> {
        if grid.len() != values.len() {
            return Err(Error::Shape {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if grid.len() < 2 {
            return Err(Error::Domain("tabulated kernel needs >= 2 points".into()));
        }
        if grid[0] != 0.0 {
            return Err(Error::Domain(format!(
                "tabulated grid must start at 0, got {}",
                grid[0]
            )));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("tabulated grid must be strictly increasing".into()));
        }
        Ok(Kernel {
            kind: KernelKind::Tabulated { grid, values },
        })
    }

    /// Two-column CSV (t, a(t)) with a header row.
    pub fn tabulated_from_csv(path: &Path) -> Result<Kernel> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for record in reader.records() {
            let record = record?;
            if record.len() < 2 {
                return Err(Error::Domain("kernel CSV needs two columns (t, a)".into()));
            }
            let t: f64 = record[0]
                .trim()
                .parse()
                .map_err(|e| Error::Domain(format!("bad t value `{}`: {e}", &record[0])))?;
            let a: f64 = record[1]
                .trim()
                .parse()
                .map_err(|e| Error::Domain(format!("bad a value `{}`: {e}", &record[1])))?;
            grid.push(t);
            values.push(a);
        }
        Kernel::tabulated(grid, values)
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    /// a(0); +infinity for singular kernels.
    pub fn a0(&self) -> f64 {
        match &self.kind {
            KernelKind::Fractional { alpha } => {
                if *alpha < 1.0 {
                    f64::INFINITY
                } else if *alpha == 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            KernelKind::Exponential => 1.0,
            KernelKind::Tabulated { values, .. } => values[0],
        }
    }

    pub fn is_singular(&self) -> bool {
        !self.a0().is_finite()
    }

    /// Whether a-dot exists and is locally integrable.
    pub fn differentiable(&self) -> bool {
        match &self.kind {
            KernelKind::Fractional { alpha } => *alpha >= 1.0,
            KernelKind::Exponential => true,
            KernelKind::Tabulated { .. } => false,
        }
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if t < 0.0 || (t == 0.0 && self.is_singular()) {
            return Err(Error::Domain(format!(
                "kernel evaluation needs t > 0 (singular at 0), got {t}"
            )));
        }
        match &self.kind {
            KernelKind::Fractional { alpha } => Ok(t.powf(alpha - 1.0) / gamma(*alpha)),
            KernelKind::Exponential => Ok((-t).exp()),
            KernelKind::Tabulated { grid, values } => {
                let hi = *grid.last().unwrap();
                if t > hi {
                    return Err(Error::Range {
                        arg: t,
                        lo: 0.0,
                        hi,
                    });
                }
                Ok(interpolate(grid, values, t))
            }
        }
    }

    pub fn evaluate_derivative(&self, t: f64) -> Result<f64> {
        if !self.differentiable() {
            return Err(Error::Unsupported(
                "kernel derivative undefined: a(0) is not finite or no derivative is declared"
                    .into(),
            ));
        }
        if t < 0.0 {
            return Err(Error::Domain(format!("t = {t} must be >= 0")));
        }
        match &self.kind {
            KernelKind::Fractional { alpha } => {
                if *alpha == 1.0 {
                    Ok(0.0)
                } else {
                    if t == 0.0 {
                        return Err(Error::Domain(
                            "derivative of t^(alpha-1) kernel is singular at 0".into(),
                        ));
                    }
                    Ok((alpha - 1.0) * t.powf(alpha - 2.0) / gamma(*alpha))
                }
            }
            KernelKind::Exponential => Ok(-(-t).exp()),
            KernelKind::Tabulated { .. } => unreachable!("not differentiable"),
        }
    }

    /// (integral of a, integral of u*a(u)) over [u0, u1]; integrates the
    /// singularity of the fractional kernel analytically.
    pub fn segment_moments(&self, u0: f64, u1: f64) -> Result<(f64, f64)> {
        debug_assert!(0.0 <= u0 && u0 < u1);
        match &self.kind {
            KernelKind::Fractional { alpha } => {
                let a = *alpha;
                let m0 = (u1.powf(a) - u0.powf(a)) / gamma(a + 1.0);
                let m1 = (u1.powf(a + 1.0) - u0.powf(a + 1.0)) / ((a + 1.0) * gamma(a));
                Ok((m0, m1))
            }
            KernelKind::Exponential => {
                let e0 = (-u0).exp();
                let e1 = (-u1).exp();
                Ok((e0 - e1, (1.0 + u0) * e0 - (1.0 + u1) * e1))
            }
            KernelKind::Tabulated { .. } => {
                let a0 = self.evaluate(u0)?;
                let a1 = self.evaluate(u1)?;
                Ok(linear_moments(u0, u1, a0, a1))
            }
        }
    }

    /// Same as `segment_moments` but for a-dot.
    pub fn derivative_segment_moments(&self, u0: f64, u1: f64) -> Result<(f64, f64)> {
        if !self.differentiable() {
            return Err(Error::Unsupported(
                "derivative quadrature needs a differentiable kernel".into(),
            ));
        }
        match &self.kind {
            KernelKind::Fractional { alpha } => {
                if *alpha == 1.0 {
                    return Ok((0.0, 0.0));
                }
                // a-dot(t) = t^{(alpha-1)-1} / Gamma(alpha-1), same closed form
                let a = *alpha - 1.0;
                let m0 = (u1.powf(a) - u0.powf(a)) / gamma(a + 1.0);
                let m1 = (u1.powf(a + 1.0) - u0.powf(a + 1.0)) / ((a + 1.0) * gamma(a));
                Ok((m0, m1))
            }
            KernelKind::Exponential => {
                let (m0, m1) = self.segment_moments(u0, u1)?;
                Ok((-m0, -m1))
            }
            KernelKind::Tabulated { .. } => unreachable!("not differentiable"),
        }
    }
}

fn interpolate(grid: &[f64], values: &[f64], t: f64) -> f64 {
    let idx = grid.partition_point(|&g| g < t);
    if idx == 0 {
        return values[0];
    }
    if idx >= grid.len() {
        return *values.last().unwrap();
    }
    let (g0, g1) = (grid[idx - 1], grid[idx]);
    let w = (t - g0) / (g1 - g0);
    values[idx - 1] * (1.0 - w) + values[idx] * w
}

/// Moments of a linear function with endpoint values (a0, a1) on [u0, u1].
fn linear_moments(u0: f64, u1: f64, a0: f64, a1: f64) -> (f64, f64) {
    let h = u1 - u0;
    let m0 = 0.5 * h * (a0 + a1);
    let m1 = h / 6.0 * (a0 * (2.0 * u0 + u1) + a1 * (u0 + 2.0 * u1));
    (m0, m1)
}

#[derive(Debug, Clone)]
pub struct CompletePositivityReport {
    pub s_values: Vec<f64>,
    pub r_values: Vec<f64>,
    pub nonneg: bool,
    pub tol: f64,
}

/// Solves s + mu*(a * s) = 1 and r + mu*(a * r) = a on the grid and checks
/// both solutions for nonnegativity (within `TOL_CP`).
pub fn check_complete_positivity(
    kernel: &Kernel,
    mu: f64,
    grid: &TimeGrid,
) -> Result<CompletePositivityReport> {
    check_complete_positivity_with(kernel, mu, grid, true)
}

/// As `check_complete_positivity`; with `mu_scales_r = false` the r-equation
/// uses coefficient 1 instead of mu, reproducing the unscaled variant of the
/// defining equations.
pub fn check_complete_positivity_with(
    kernel: &Kernel,
    mu: f64,
    grid: &TimeGrid,
    mu_scales_r: bool,
) -> Result<CompletePositivityReport> {
    if mu < 0.0 {
        return Err(Error::Domain(format!("mu = {mu} must be >= 0")));
    }
    let weights = solver::build_weights(kernel, grid)?;
    let ones = vec![1.0; grid.len()];
    let s_values = solver::solve_second_kind(&weights, -mu, &ones)?;

    let mu_r = if mu_scales_r { mu } else { 1.0 };
    let r_values = solve_r_equation(kernel, mu_r, grid, &weights)?;

    let nonneg = s_values
        .iter()
        .chain(r_values.iter())
        .all(|&v| v >= -TOL_CP);
    Ok(CompletePositivityReport {
        s_values,
        r_values,
        nonneg,
        tol: TOL_CP,
    })
}

/// Forward solve of r + mu*(a * r) = a. For singular kernels the node at
/// t = 0 cannot hold a(0); the solve uses a surrogate node value that gives
/// the first subinterval the exact kernel mass, and the reported r_values[0]
/// is +infinity.
fn solve_r_equation(
    kernel: &Kernel,
    mu: f64,
    grid: &TimeGrid,
    weights: &solver::QuadratureWeights,
) -> Result<Vec<f64>> {
    let n = grid.len();
    let mut f = vec![0.0; n];
    for (j, fj) in f.iter_mut().enumerate().skip(1) {
        *fj = kernel.evaluate(grid.t(j))?;
    }
    if !kernel.is_singular() {
        f[0] = kernel.a0();
        return solver::solve_second_kind(weights, -mu, &f);
    }

    // mass-matching surrogate for the node at 0: the chord over [0, dt]
    // integrates to the true kernel mass on that interval
    let dt = grid.dt();
    let (mass, _) = kernel.segment_moments(0.0, dt)?;
    let r0 = 2.0 * mass / dt - f[1];

    let mut r = vec![0.0; n];
    r[0] = r0;
    for j in 1..n {
        let mut acc = 0.0;
        for i in 0..j {
            acc += weights.weight(j, i) * r[i];
        }
        let pivot = 1.0 + mu * weights.weight(j, j);
        if pivot.abs() < 1e-12 {
            return Err(Error::SingularStep {
                step: j,
                t: grid.t(j),
                pivot: pivot.abs(),
            });
        }
        r[j] = (f[j] - mu * acc) / pivot;
    }
    r[0] = f64::INFINITY; // pointwise value at the singularity
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fractional_alpha_one_is_constant_one() {
        let k = Kernel::fractional(1.0).unwrap();
        for &t in &[0.5, 1.0, 1.7] {
            assert_abs_diff_eq!(k.evaluate(t).unwrap(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn exponential_at_zero() {
        let k = Kernel::exponential();
        assert_abs_diff_eq!(k.evaluate(0.0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn fractional_half_reference_value() {
        // 1/Gamma(1/2) = 1/sqrt(pi)
        let k = Kernel::fractional(0.5).unwrap();
        assert_abs_diff_eq!(
            k.evaluate(1.0).unwrap(),
            1.0 / std::f64::consts::PI.sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(k.evaluate(1.0).unwrap(), 0.5641895835, epsilon = 1e-9);
    }

    #[test]
    fn singular_kernel_rejects_t_zero() {
        let k = Kernel::fractional(0.5).unwrap();
        assert!(k.evaluate(0.0).is_err());
        assert!(k.evaluate(-1.0).is_err());
    }

    #[test]
    fn exponential_derivative() {
        let k = Kernel::exponential();
        assert_abs_diff_eq!(k.evaluate_derivative(0.0).unwrap(), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            k.evaluate_derivative(std::f64::consts::LN_2).unwrap(),
            -0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn singular_kernel_has_no_derivative() {
        let k = Kernel::fractional(0.5).unwrap();
        assert!(matches!(
            k.evaluate_derivative(1.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn a0_values() {
        assert_eq!(Kernel::fractional(0.5).unwrap().a0(), f64::INFINITY);
        assert_eq!(Kernel::fractional(1.0).unwrap().a0(), 1.0);
        assert_eq!(Kernel::exponential().a0(), 1.0);
    }

    #[test]
    fn a0_finite_iff_differentiable_for_builtins() {
        for k in [
            Kernel::fractional(0.3).unwrap(),
            Kernel::fractional(1.0).unwrap(),
            Kernel::fractional(1.5).unwrap(),
            Kernel::exponential(),
        ] {
            assert_eq!(k.a0().is_finite(), k.differentiable(), "{:?}", k.kind());
        }
    }

    #[test]
    fn tabulated_validation() {
        assert!(Kernel::tabulated(vec![0.0, 1.0], vec![1.0, 0.5]).is_ok());
        assert!(Kernel::tabulated(vec![0.5, 1.0], vec![1.0, 0.5]).is_err());
        assert!(Kernel::tabulated(vec![0.0, 0.0], vec![1.0, 0.5]).is_err());
        assert!(Kernel::tabulated(vec![0.0], vec![1.0]).is_err());
    }

    #[test]
    fn tabulated_out_of_range() {
        let k = Kernel::tabulated(vec![0.0, 1.0], vec![1.0, 0.5]).unwrap();
        assert!(matches!(k.evaluate(2.0), Err(Error::Range { .. })));
        assert_abs_diff_eq!(k.evaluate(0.5).unwrap(), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn builtin_kernels_positive_decreasing() {
        for k in [Kernel::fractional(0.7).unwrap(), Kernel::exponential()] {
            let mut prev = f64::INFINITY;
            for j in 1..=40 {
                let v = k.evaluate(j as f64 * 0.05).unwrap();
                assert!(v > 0.0);
                assert!(v <= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn cp_mu_zero_gives_constant_one() {
        let grid = TimeGrid::new(2.0, 100).unwrap();
        for k in [Kernel::fractional(0.5).unwrap(), Kernel::exponential()] {
            let rep = check_complete_positivity(&k, 0.0, &grid).unwrap();
            assert!(rep.nonneg);
            for &s in &rep.s_values {
                assert_abs_diff_eq!(s, 1.0, epsilon = 1e-14);
            }
        }
    }

    // s' = -2s + 1, s(0) = 1  =>  s(t) = 1/2 + 1/2 e^{-2t}
    // (differentiate s + int a(t-tau) s dtau = 1 for a = exp(-t))
    #[test]
    fn cp_exponential_matches_ode_oracle() {
        let grid = TimeGrid::new(2.0, 2000).unwrap();
        let rep = check_complete_positivity(&Kernel::exponential(), 1.0, &grid).unwrap();
        assert!(rep.nonneg);
        for (j, &s) in rep.s_values.iter().enumerate() {
            let t = grid.t(j);
            let exact = 0.5 + 0.5 * (-2.0 * t).exp();
            assert!((s - exact).abs() < 5e-4, "t = {t}: {s} vs {exact}");
        }
    }

    // s' = -s, s(0) = 1 for the constant kernel
    #[test]
    fn cp_constant_kernel_matches_ode_oracle() {
        let grid = TimeGrid::new(2.0, 2000).unwrap();
        let k = Kernel::fractional(1.0).unwrap();
        let rep = check_complete_positivity(&k, 1.0, &grid).unwrap();
        assert!(rep.nonneg);
        for (j, &s) in rep.s_values.iter().enumerate() {
            let exact = (-grid.t(j)).exp();
            assert!((s - exact).abs() < 5e-4);
        }
    }

    #[test]
    fn cp_builtin_kernels_nonneg_over_mu_sweep() {
        let grid = TimeGrid::new(2.0, 400).unwrap();
        for k in [
            Kernel::fractional(0.5).unwrap(),
            Kernel::fractional(1.0).unwrap(),
            Kernel::exponential(),
        ] {
            for &mu in &[0.0, 0.5, 1.0, 10.0] {
                let rep = check_complete_positivity(&k, mu, &grid).unwrap();
                assert!(rep.nonneg, "kernel {:?}, mu = {mu}", k.kind());
            }
        }
    }

    #[test]
    fn cp_printed_variant_runs() {
        let grid = TimeGrid::new(2.0, 200).unwrap();
        let rep =
            check_complete_positivity_with(&Kernel::exponential(), 0.5, &grid, false).unwrap();
        assert!(rep.nonneg);
    }

    #[test]
    fn cp_grid_refinement_order() {
        // refining the grid by 2x shrinks the error against the ODE oracle
        let k = Kernel::exponential();
        let exact = |t: f64| 0.5 + 0.5 * (-2.0 * t).exp();
        let err = |steps: usize| {
            let grid = TimeGrid::new(2.0, steps).unwrap();
            let rep = check_complete_positivity(&k, 1.0, &grid).unwrap();
            rep.s_values
                .iter()
                .enumerate()
                .map(|(j, &s)| (s - exact(grid.t(j))).abs())
                .fold(0.0_f64, f64::max)
        };
        let (e1, e2) = (err(100), err(200));
        let order = (e1 / e2).log2();
        assert!(order >= 1.0, "observed order {order}");
    }

    #[test]
    fn kernel_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kernel.csv");
        std::fs::write(&path, "t,a\n0.0,1.0\n1.0,0.5\n2.0,0.25\n").unwrap();
        let k = Kernel::tabulated_from_csv(&path).unwrap();
        assert_abs_diff_eq!(k.evaluate(1.5).unwrap(), 0.375, epsilon = 1e-15);
        assert_eq!(k.a0(), 1.0);
    }
}
