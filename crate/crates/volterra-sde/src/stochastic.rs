//! The stochastic integral as a limit of left-point Riemann sums against a
//! series of independent scalar Wiener processes: seeded increment bundles,
//! series integrands, the Itô isometry and cross-orthogonality diagnostics.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::operator::{HVector, SpectralOperator};

/// Independent scalar Wiener increments on a shared time grid, one stream
/// per (seed, mode, path) so that regeneration is bit-identical and modes
/// and paths never share randomness.
#[derive(Debug, Clone)]
pub struct WienerBundle {
    grid: TimeGrid,
    seed: u64,
    path: u64,
    /// increments[mode][step], each N(0, dt)
    increments: Vec<Vec<f64>>,
}

impl WienerBundle {
    /// Path 0 of the ensemble keyed by `seed`.
    pub fn sample(grid: &TimeGrid, modes: usize, seed: u64) -> Result<WienerBundle> {
        WienerBundle::sample_path(grid, modes, seed, 0)
    }

    /// One member of the ensemble; distinct (mode, path) pairs map to
    /// distinct ChaCha streams of the seed-keyed generator.
    pub fn sample_path(grid: &TimeGrid, modes: usize, seed: u64, path: u64) -> Result<WienerBundle> {
        if modes == 0 {
            return Err(Error::Domain("bundle needs at least one mode".into()));
        }
        if modes as u64 > u64::from(u32::MAX) || path > u64::from(u32::MAX) {
            return Err(Error::Domain(format!(
                "mode count {modes} and path index {path} must fit in 32 bits"
            )));
        }
        let sqrt_dt = grid.dt().sqrt();
        let increments = (0..modes)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((path << 32) | i as u64);
                (0..grid.steps())
                    .map(|_| sqrt_dt * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect();
        Ok(WienerBundle {
            grid: *grid,
            seed,
            path,
            increments,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn modes(&self) -> usize {
        self.increments.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> u64 {
        self.path
    }

    /// Increment W_i(t_{l+1}) - W_i(t_l).
    pub fn increment(&self, mode: usize, step: usize) -> f64 {
        self.increments[mode][step]
    }

    pub fn mode_increments(&self, mode: usize) -> &[f64] {
        &self.increments[mode]
    }

    /// W_i(t_j) = sum of the increments before j.
    pub fn wiener_value(&self, mode: usize, j: usize) -> f64 {
        self.increments[mode][..j].iter().sum()
    }

    /// Coarse bundle whose increments are the sums of consecutive fine
    /// increments: both approximate the same Brownian path, so refinement
    /// studies compare like with like.
    pub fn coarsen(&self, factor: usize) -> Result<WienerBundle> {
        let coarse = self.grid.coarsen(factor)?;
        let increments = self
            .increments
            .iter()
            .map(|row| {
                (0..coarse.steps())
                    .map(|m| row[m * factor..(m + 1) * factor].iter().sum())
                    .collect()
            })
            .collect();
        Ok(WienerBundle {
            grid: coarse,
            seed: self.seed,
            path: self.path,
            increments,
        })
    }

    /// Read-only view of the increments strictly before `step`.
    pub fn prefix(&self, step: usize) -> IncrementPrefix<'_> {
        debug_assert!(step <= self.grid.steps());
        IncrementPrefix { bundle: self, step }
    }

    /// CSV export with columns mode, step, increment.
    pub fn export_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "mode,step,increment")?;
        for (i, row) in self.increments.iter().enumerate() {
            for (l, v) in row.iter().enumerate() {
                writeln!(out, "{i},{l},{}", crate::experiments::fmt_float(*v))?;
            }
        }
        Ok(())
    }

    /// Inverse of `export_csv`; every (mode, step) cell must be present.
    /// The seed of an imported bundle is recorded as 0.
    pub fn import_csv<R: BufRead>(grid: &TimeGrid, modes: usize, input: R) -> Result<WienerBundle> {
        let mut increments = vec![vec![f64::NAN; grid.steps()]; modes];
        let mut reader = csv::Reader::from_reader(input);
        for record in reader.records() {
            let record = record?;
            let parse = |idx: usize| -> Result<f64> {
                record[idx]
                    .trim()
                    .parse()
                    .map_err(|e| Error::Domain(format!("bad bundle CSV field `{}`: {e}", &record[idx])))
            };
            let (i, l, v) = (parse(0)? as usize, parse(1)? as usize, parse(2)?);
            if i >= modes || l >= grid.steps() {
                return Err(Error::Domain(format!(
                    "bundle CSV cell ({i}, {l}) outside {} modes x {} steps",
                    modes,
                    grid.steps()
                )));
            }
            increments[i][l] = v;
        }
        if increments.iter().flatten().any(|v| v.is_nan()) {
            return Err(Error::Domain("bundle CSV is missing increments".into()));
        }
        Ok(WienerBundle {
            grid: *grid,
            seed: 0,
            path: 0,
            increments,
        })
    }
}

/// The adapted state visible to an integrand at step j: only increments
/// with index < j can be read, so lookahead cannot be expressed.
pub struct IncrementPrefix<'a> {
    bundle: &'a WienerBundle,
    step: usize,
}

impl IncrementPrefix<'_> {
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn increment(&self, mode: usize, l: usize) -> f64 {
        assert!(
            l < self.step,
            "adaptedness violation: increment {l} read at step {}",
            self.step
        );
        self.bundle.increment(mode, l)
    }

    /// W_i(t_step), a function of the visible prefix only.
    pub fn wiener(&self, mode: usize) -> f64 {
        self.bundle.wiener_value(mode, self.step)
    }
}

/// A series integrand Psi = (Psi_i): adapted, H-valued, with summable
/// second-moment bounds certifying membership in the integrand space.
pub trait Integrand: Sync {
    /// Number of noise modes the series actually uses.
    fn modes(&self) -> usize;

    /// Dimension of the state space the values live in.
    fn dim(&self) -> usize;

    /// Psi_i(t_j); the prefix argument exposes only increments before j.
    fn eval(&self, mode: usize, step: usize, state: &IncrementPrefix<'_>) -> HVector;

    /// Bound on sup_t E|Psi_i(t)|^2 for mode i; the sum over modes must be
    /// finite (it is the truncation error budget for the dropped tail).
    fn tail_bound(&self, mode: usize) -> f64;

    /// True when eval never reads the prefix; enables exact quadrature of
    /// the isometry right-hand side.
    fn deterministic(&self) -> bool {
        false
    }
}

/// Psi_i(t) = v_i, constant in time and state.
#[derive(Debug, Clone)]
pub struct ConstantIntegrand {
    vectors: Vec<HVector>,
}

impl ConstantIntegrand {
    pub fn new(vectors: Vec<HVector>) -> Result<ConstantIntegrand> {
        if vectors.is_empty() {
            return Err(Error::Domain("integrand needs at least one mode".into()));
        }
        let dim = vectors[0].dim();
        if vectors.iter().any(|v| v.dim() != dim) {
            return Err(Error::Domain("integrand modes must share one dimension".into()));
        }
        Ok(ConstantIntegrand { vectors })
    }

    /// Single mode, Psi = e_coord in a dim-dimensional space.
    pub fn unit(dim: usize, coord: usize) -> ConstantIntegrand {
        ConstantIntegrand {
            vectors: vec![HVector::basis(dim, coord)],
        }
    }

    /// Psi_i = 2^{-i/2} e_1 for i = 1..=modes (so E|Psi_i|^2 = 2^{-i}).
    pub fn geometric(modes: usize, dim: usize) -> ConstantIntegrand {
        ConstantIntegrand {
            vectors: (1..=modes)
                .map(|i| HVector::basis(dim, 0).scaled(0.5_f64.powf(i as f64 / 2.0)))
                .collect(),
        }
    }
}

impl Integrand for ConstantIntegrand {
    fn modes(&self) -> usize {
        self.vectors.len()
    }

    fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    fn eval(&self, mode: usize, _step: usize, _state: &IncrementPrefix<'_>) -> HVector {
        self.vectors[mode].clone()
    }

    fn tail_bound(&self, mode: usize) -> f64 {
        let n = self.vectors[mode].norm_h();
        n * n
    }

    fn deterministic(&self) -> bool {
        true
    }
}

/// Psi_i(t) = 0; modes and dim still declared for shape checks.
#[derive(Debug, Clone)]
pub struct ZeroIntegrand {
    pub modes: usize,
    pub dim: usize,
}

impl Integrand for ZeroIntegrand {
    fn modes(&self) -> usize {
        self.modes
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, _mode: usize, _step: usize, _state: &IncrementPrefix<'_>) -> HVector {
        HVector::zeros(self.dim)
    }

    fn tail_bound(&self, _mode: usize) -> f64 {
        0.0
    }

    fn deterministic(&self) -> bool {
        true
    }
}

/// Single mode, Psi(t) = cos(t) e_1: a continuously differentiable
/// deterministic integrand for Riemann-sum refinement studies.
#[derive(Debug, Clone)]
pub struct SmoothIntegrand {
    pub dim: usize,
    pub dt: f64,
}

impl SmoothIntegrand {
    pub fn new(grid: &TimeGrid, dim: usize) -> SmoothIntegrand {
        SmoothIntegrand { dim, dt: grid.dt() }
    }
}

impl Integrand for SmoothIntegrand {
    fn modes(&self) -> usize {
        1
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, _mode: usize, step: usize, _state: &IncrementPrefix<'_>) -> HVector {
        HVector::basis(self.dim, 0).scaled((step as f64 * self.dt).cos())
    }

    fn tail_bound(&self, _mode: usize) -> f64 {
        1.0
    }

    fn deterministic(&self) -> bool {
        true
    }
}

/// The series (A Psi_i): the operator applied modewise.
#[derive(Debug, Clone)]
pub struct OperatorMapped<P: Integrand> {
    op: SpectralOperator,
    inner: P,
}

impl<P: Integrand> OperatorMapped<P> {
    pub fn new(op: &SpectralOperator, inner: P) -> Result<OperatorMapped<P>> {
        if inner.dim() != op.dim() {
            return Err(Error::Shape {
                expected: op.dim(),
                got: inner.dim(),
            });
        }
        Ok(OperatorMapped {
            op: op.clone(),
            inner,
        })
    }
}

impl<P: Integrand> Integrand for OperatorMapped<P> {
    fn modes(&self) -> usize {
        self.inner.modes()
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, mode: usize, step: usize, state: &IncrementPrefix<'_>) -> HVector {
        self.op
            .apply(&self.inner.eval(mode, step, state))
            .expect("dimension checked at construction")
    }

    fn tail_bound(&self, mode: usize) -> f64 {
        let gain = self
            .op
            .eigenvalues()
            .iter()
            .map(|l| l * l)
            .fold(0.0_f64, f64::max);
        gain * self.inner.tail_bound(mode)
    }

    fn deterministic(&self) -> bool {
        self.inner.deterministic()
    }
}

/// Left-point Riemann sum sum_i sum_{j < up_to} Psi_i(t_j) dW_i(t_j).
pub fn ito_integral<P: Integrand>(
    psi: &P,
    bundle: &WienerBundle,
    up_to: usize,
) -> Result<HVector> {
    if psi.modes() > bundle.modes() {
        return Err(Error::Shape {
            expected: bundle.modes(),
            got: psi.modes(),
        });
    }
    if up_to > bundle.grid().steps() {
        return Err(Error::Domain(format!(
            "up_to = {up_to} exceeds {} steps",
            bundle.grid().steps()
        )));
    }
    let mut acc = HVector::zeros(psi.dim());
    for j in 0..up_to {
        let state = bundle.prefix(j);
        for i in 0..psi.modes() {
            acc.axpy(bundle.increment(i, j), &psi.eval(i, j, &state));
        }
    }
    Ok(acc)
}

/// All the partial integrals at once: result[j] = ito_integral(psi, bundle, j).
pub fn ito_prefix<P: Integrand>(psi: &P, bundle: &WienerBundle) -> Result<Vec<HVector>> {
    if psi.modes() > bundle.modes() {
        return Err(Error::Shape {
            expected: bundle.modes(),
            got: psi.modes(),
        });
    }
    let mut acc = HVector::zeros(psi.dim());
    let mut out = Vec::with_capacity(bundle.grid().len());
    out.push(acc.clone());
    for j in 0..bundle.grid().steps() {
        let state = bundle.prefix(j);
        for i in 0..psi.modes() {
            acc.axpy(bundle.increment(i, j), &psi.eval(i, j, &state));
        }
        out.push(acc.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct IsometryReport {
    /// Monte Carlo estimate of E|int Psi dW|^2.
    pub lhs: f64,
    /// Left-point quadrature of int sum_i E|Psi_i|^2 dtau.
    pub rhs: f64,
    /// Sample standard error of `lhs`.
    pub stderr: f64,
    pub paths: usize,
}

impl IsometryReport {
    pub fn within_three_sigma(&self) -> bool {
        (self.lhs - self.rhs).abs() <= 3.0 * self.stderr
    }
}

/// Monte Carlo check of the Itô isometry for a deterministic integrand.
pub fn ito_isometry_test<P: Integrand>(
    psi: &P,
    grid: &TimeGrid,
    modes: usize,
    paths: usize,
    seed: u64,
) -> Result<IsometryReport> {
    if paths < 100 {
        return Err(Error::Precondition(format!(
            "isometry test needs >= 100 paths, got {paths}"
        )));
    }
    if !psi.deterministic() {
        return Err(Error::Precondition(
            "isometry right-hand side needs a deterministic integrand".into(),
        ));
    }
    let samples: Result<Vec<f64>> = (0..paths)
        .into_par_iter()
        .map(|p| {
            let bundle = WienerBundle::sample_path(grid, modes, seed, p as u64)?;
            let v = ito_integral(psi, &bundle, grid.steps())?;
            Ok(v.dot(&v))
        })
        .collect();
    let samples = samples?;
    let (lhs, stderr) = mean_and_stderr(&samples);

    // left-point quadrature matching the Riemann sum's evaluation rule
    let probe = WienerBundle::sample_path(grid, modes, seed, 0)?;
    let mut rhs = 0.0;
    for j in 0..grid.steps() {
        let state = probe.prefix(j);
        for i in 0..psi.modes() {
            let v = psi.eval(i, j, &state);
            rhs += v.dot(&v) * grid.dt();
        }
    }
    Ok(IsometryReport {
        lhs,
        rhs,
        stderr,
        paths,
    })
}

#[derive(Debug, Clone)]
pub struct OrthogonalityReport {
    /// Monte Carlo estimate of E<int Psi_i dW_i, int Psi_j dW_j>.
    pub estimate: f64,
    pub stderr: f64,
    pub paths: usize,
}

impl OrthogonalityReport {
    pub fn within_three_sigma(&self) -> bool {
        self.estimate.abs() <= 3.0 * self.stderr
    }
}

/// Monte Carlo check that integrals against distinct Wiener modes are
/// uncorrelated.
pub fn cross_orthogonality_test<P: Integrand>(
    psi: &P,
    grid: &TimeGrid,
    mode_i: usize,
    mode_j: usize,
    paths: usize,
    seed: u64,
) -> Result<OrthogonalityReport> {
    if mode_i == mode_j {
        return Err(Error::Precondition(format!(
            "cross-orthogonality needs distinct modes, got {mode_i} twice"
        )));
    }
    if mode_i >= psi.modes() || mode_j >= psi.modes() {
        return Err(Error::Shape {
            expected: psi.modes(),
            got: mode_i.max(mode_j) + 1,
        });
    }
    let samples: Result<Vec<f64>> = (0..paths)
        .into_par_iter()
        .map(|p| {
            let bundle = WienerBundle::sample_path(grid, psi.modes(), seed, p as u64)?;
            let mut vi = HVector::zeros(psi.dim());
            let mut vj = HVector::zeros(psi.dim());
            for l in 0..grid.steps() {
                let state = bundle.prefix(l);
                vi.axpy(bundle.increment(mode_i, l), &psi.eval(mode_i, l, &state));
                vj.axpy(bundle.increment(mode_j, l), &psi.eval(mode_j, l, &state));
            }
            Ok(vi.dot(&vj))
        })
        .collect();
    let samples = samples?;
    let (estimate, stderr) = mean_and_stderr(&samples);
    Ok(OrthogonalityReport {
        estimate,
        stderr,
        paths,
    })
}

/// (sample mean, standard error of the mean).
pub fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
