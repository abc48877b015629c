//! Run configuration: a sectioned TOML file with documented defaults,
//! resolved into the domain objects and echoed back so runs are
//! self-describing.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::kernel::Kernel;
use crate::operator::{HVector, SpectralOperator};
use crate::stochastic::{ConstantIntegrand, Integrand, IncrementPrefix, SmoothIntegrand, ZeroIntegrand};

/// Experiment names in their canonical execution order.
pub const EXPERIMENTS: [&str; 10] = [
    "resolvent",
    "cp-check",
    "convolve",
    "ito-check",
    "verify-strong",
    "verify-weak",
    "verify-mild",
    "yosida-suite",
    "cauchy",
    "regularity",
];

fn config_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    /// "exponential", "fractional" or "tabulated".
    pub kind: String,
    /// Fractional exponent, used when kind = "fractional".
    pub alpha: f64,
    /// CSV path (t, a) for kind = "tabulated".
    pub path: Option<PathBuf>,
}

impl Default for KernelConfig {
    fn default() -> KernelConfig {
        KernelConfig {
            kind: "exponential".into(),
            alpha: 0.5,
            path: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorConfig {
    /// "dirichlet-laplacian" or "csv".
    pub kind: String,
    /// Number of retained modes for the built-in spectrum.
    pub dim: usize,
    /// One-column eigenvalue CSV for kind = "csv".
    pub path: Option<PathBuf>,
}

impl Default for OperatorConfig {
    fn default() -> OperatorConfig {
        OperatorConfig {
            kind: "dirichlet-laplacian".into(),
            dim: 8,
            path: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub t_end: f64,
    pub steps: usize,
}

impl Default for GridConfig {
    fn default() -> GridConfig {
        GridConfig {
            t_end: 1.0,
            steps: 400,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// Wiener modes sampled per bundle.
    pub modes: usize,
    /// Monte Carlo paths for pathwise suites.
    pub paths: usize,
    /// Monte Carlo paths for second-moment suites.
    pub moment_paths: usize,
}

impl Default for NoiseConfig {
    fn default() -> NoiseConfig {
        NoiseConfig {
            modes: 1,
            paths: 256,
            moment_paths: 20000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrandConfig {
    /// "uniform" (constant vector with equal coordinates), "unit",
    /// "geometric", "smooth" or "zero".
    pub kind: String,
    /// Series length for kind = "geometric".
    pub modes: usize,
    /// 1-based coordinate for kind = "unit".
    pub coord: usize,
}

impl Default for IntegrandConfig {
    fn default() -> IntegrandConfig {
        IntegrandConfig {
            kind: "uniform".into(),
            modes: 8,
            coord: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub out_dir: PathBuf,
    pub seed: u64,
    /// 0 lets the runtime pick the thread count.
    pub threads: usize,
    pub kernel: KernelConfig,
    pub operator: OperatorConfig,
    pub grid: GridConfig,
    pub noise: NoiseConfig,
    pub integrand: IntegrandConfig,
    /// Experiments to run, in order; empty means write only the echoed
    /// config.
    pub experiments: Vec<String>,
    pub yosida_n: Vec<u64>,
    pub mu_values: Vec<f64>,
    /// Step counts of the strong-residual refinement study.
    pub refine_steps: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            out_dir: PathBuf::from("out"),
            seed: 42,
            threads: 0,
            kernel: KernelConfig::default(),
            operator: OperatorConfig::default(),
            grid: GridConfig::default(),
            noise: NoiseConfig::default(),
            integrand: IntegrandConfig::default(),
            experiments: EXPERIMENTS.iter().map(|s| s.to_string()).collect(),
            yosida_n: vec![10, 100, 1000],
            mu_values: vec![0.0, 0.5, 1.0, 10.0],
            refine_steps: vec![200, 400, 800],
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        let config: RunConfig =
            toml::from_str(&text).map_err(|e| config_err("<toml>", e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        for name in &self.experiments {
            if !EXPERIMENTS.contains(&name.as_str()) {
                return Err(config_err(
                    "experiments",
                    format!("unknown experiment `{name}`"),
                ));
            }
        }
        let kernel = self.build_kernel()?;
        let op = self.build_operator()?;
        self.build_grid()?;
        self.build_integrand(&op)?;
        if self.experiments.iter().any(|e| e == "cauchy")
            && (!kernel.differentiable() || !kernel.a0().is_finite() || kernel.a0() == 0.0)
        {
            return Err(config_err(
                "experiments",
                format!(
                    "the cauchy experiment needs a differentiable kernel with finite \
                     nonzero a(0); the configured kernel has a(0) = {}",
                    kernel.a0()
                ),
            ));
        }
        for &n in &self.yosida_n {
            if (n as f64) <= op.max_eigenvalue() {
                return Err(config_err(
                    "yosida_n",
                    format!("n = {n} is not above the top eigenvalue {}", op.max_eigenvalue()),
                ));
            }
        }
        if self.refine_steps.len() < 2 || self.refine_steps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config_err(
                "refine_steps",
                "needs at least two increasing step counts",
            ));
        }
        if self.mu_values.iter().any(|&m| m < 0.0) {
            return Err(config_err("mu_values", "mu must be nonnegative"));
        }
        Ok(())
    }

    pub fn build_kernel(&self) -> Result<Kernel> {
        match self.kernel.kind.as_str() {
            "exponential" => Ok(Kernel::exponential()),
            "fractional" => Kernel::fractional(self.kernel.alpha)
                .map_err(|e| config_err("kernel.alpha", e.to_string())),
            "tabulated" => {
                let path = self
                    .kernel
                    .path
                    .as_ref()
                    .ok_or_else(|| config_err("kernel.path", "required for a tabulated kernel"))?;
                Kernel::tabulated_from_csv(path).map_err(|e| config_err("kernel.path", e.to_string()))
            }
            other => Err(config_err(
                "kernel.kind",
                format!("unknown kernel `{other}` (expected exponential, fractional or tabulated)"),
            )),
        }
    }

    pub fn build_operator(&self) -> Result<SpectralOperator> {
        match self.operator.kind.as_str() {
            "dirichlet-laplacian" => {
                if self.operator.dim == 0 {
                    return Err(config_err("operator.dim", "needs at least one mode"));
                }
                Ok(SpectralOperator::dirichlet_laplacian(self.operator.dim))
            }
            "csv" => {
                let path = self
                    .operator
                    .path
                    .as_ref()
                    .ok_or_else(|| config_err("operator.path", "required for a csv spectrum"))?;
                SpectralOperator::from_csv(path).map_err(|e| config_err("operator.path", e.to_string()))
            }
            other => Err(config_err(
                "operator.kind",
                format!("unknown operator `{other}` (expected dirichlet-laplacian or csv)"),
            )),
        }
    }

    pub fn build_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.grid.t_end, self.grid.steps)
            .map_err(|e| config_err("grid", e.to_string()))
    }

    pub fn build_integrand(&self, op: &SpectralOperator) -> Result<BuiltinIntegrand> {
        let dim = op.dim();
        match self.integrand.kind.as_str() {
            "uniform" => Ok(BuiltinIntegrand::Constant(
                ConstantIntegrand::new(vec![HVector::new(vec![
                    1.0 / (dim as f64).sqrt();
                    dim
                ])])
                .expect("nonempty"),
            )),
            "unit" => {
                let coord = self.integrand.coord;
                if coord == 0 || coord > dim {
                    return Err(config_err(
                        "integrand.coord",
                        format!("coordinate {coord} outside 1..={dim}"),
                    ));
                }
                Ok(BuiltinIntegrand::Constant(ConstantIntegrand::unit(dim, coord - 1)))
            }
            "geometric" => {
                if self.integrand.modes == 0 {
                    return Err(config_err("integrand.modes", "needs at least one mode"));
                }
                Ok(BuiltinIntegrand::Constant(ConstantIntegrand::geometric(
                    self.integrand.modes,
                    dim,
                )))
            }
            "smooth" => Ok(BuiltinIntegrand::Smooth(SmoothIntegrand::new(
                &self.build_grid()?,
                dim,
            ))),
            "zero" => Ok(BuiltinIntegrand::Zero(ZeroIntegrand { modes: 1, dim })),
            other => Err(config_err(
                "integrand.kind",
                format!(
                    "unknown integrand `{other}` (expected uniform, unit, geometric, smooth or zero)"
                ),
            )),
        }
    }

    /// Bundle modes: at least what the integrand consumes.
    pub fn bundle_modes(&self, integrand: &BuiltinIntegrand) -> usize {
        self.noise.modes.max(integrand.modes())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

/// The configurable integrand families behind one concrete type.
#[derive(Debug, Clone)]
pub enum BuiltinIntegrand {
    Constant(ConstantIntegrand),
    Smooth(SmoothIntegrand),
    Zero(ZeroIntegrand),
}

impl Integrand for BuiltinIntegrand {
    fn modes(&self) -> usize {
        match self {
            BuiltinIntegrand::Constant(p) => p.modes(),
            BuiltinIntegrand::Smooth(p) => p.modes(),
            BuiltinIntegrand::Zero(p) => p.modes(),
        }
    }

    fn dim(&self) -> usize {
        match self {
            BuiltinIntegrand::Constant(p) => p.dim(),
            BuiltinIntegrand::Smooth(p) => p.dim(),
            BuiltinIntegrand::Zero(p) => p.dim(),
        }
    }

    fn eval(&self, mode: usize, step: usize, state: &IncrementPrefix<'_>) -> HVector {
        match self {
            BuiltinIntegrand::Constant(p) => p.eval(mode, step, state),
            BuiltinIntegrand::Smooth(p) => p.eval(mode, step, state),
            BuiltinIntegrand::Zero(p) => p.eval(mode, step, state),
        }
    }

    fn tail_bound(&self, mode: usize) -> f64 {
        match self {
            BuiltinIntegrand::Constant(p) => p.tail_bound(mode),
            BuiltinIntegrand::Smooth(p) => p.tail_bound(mode),
            BuiltinIntegrand::Zero(p) => p.tail_bound(mode),
        }
    }

    fn deterministic(&self) -> bool {
        match self {
            BuiltinIntegrand::Constant(p) => p.deterministic(),
            BuiltinIntegrand::Smooth(p) => p.deterministic(),
            BuiltinIntegrand::Zero(p) => p.deterministic(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let config = RunConfig::default();
        config.validate().unwrap();
        assert_eq!(config.experiments.len(), 10);
        let op = config.build_operator().unwrap();
        assert_eq!(op.dim(), 8);
        let psi = config.build_integrand(&op).unwrap();
        assert_eq!(psi.dim(), 8);
        assert!(psi.deterministic());
    }

    #[test]
    fn round_trips_through_toml() {
        let config = RunConfig::default();
        let text = config.to_toml();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.seed, config.seed);
        assert_eq!(back.experiments, config.experiments);
        assert_eq!(back.refine_steps, config.refine_steps);
    }

    #[test]
    fn rejects_unknown_experiment() {
        let config = RunConfig {
            experiments: vec!["warp-drive".into()],
            ..RunConfig::default()
        };
        let err = config.validate().unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "experiments"));
    }

    #[test]
    fn rejects_cauchy_with_singular_kernel() {
        let config = RunConfig {
            kernel: KernelConfig {
                kind: "fractional".into(),
                alpha: 0.5,
                path: None,
            },
            experiments: vec!["cauchy".into()],
            ..RunConfig::default()
        };
        let err = config.validate().unwrap_err();
        let text = err.to_string();
        assert!(text.contains("a(0)"), "{text}");
    }

    #[test]
    fn rejects_unknown_field() {
        let err = toml::from_str::<RunConfig>("unknown_field = 1\n").unwrap_err();
        assert!(err.to_string().contains("unknown_field"));
    }

    #[test]
    fn rejects_low_yosida_n() {
        let config = RunConfig {
            operator: OperatorConfig {
                kind: "csv".into(),
                dim: 0,
                path: None,
            },
            ..RunConfig::default()
        };
        // missing path reported with its field
        let err = config.validate().unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "operator.path"));
    }

    #[test]
    fn unit_integrand_coord_is_one_based() {
        let config = RunConfig {
            integrand: IntegrandConfig {
                kind: "unit".into(),
                modes: 1,
                coord: 2,
            },
            ..RunConfig::default()
        };
        let op = config.build_operator().unwrap();
        let psi = config.build_integrand(&op).unwrap();
        let grid = config.build_grid().unwrap();
        let bundle = crate::stochastic::WienerBundle::sample(&grid, 1, 1).unwrap();
        let state = bundle.prefix(0);
        assert_eq!(psi.eval(0, 0, &state).coeffs()[1], 1.0);
    }
}
