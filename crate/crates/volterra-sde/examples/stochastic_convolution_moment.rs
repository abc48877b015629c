//! Samples the stochastic convolution W(t) = int_0^t S(t - tau) Psi dW(tau)
//! for a single free mode (lambda = 0, Psi = e_1), where W is a Brownian
//! motion and E int_0^1 |W|^2 dt = 1/2.

use volterra_sde::convolution::stochastic_convolution_ensemble;
use volterra_sde::resolvent::build_resolvent;
use volterra_sde::stochastic::{mean_and_stderr, ConstantIntegrand};
use volterra_sde::{Kernel, SpectralOperator, TimeGrid};

fn main() {
    let op = SpectralOperator::from_eigenvalues(vec![0.0], "free mode").unwrap();
    let kernel = Kernel::exponential();
    let grid = TimeGrid::new(1.0, 200).unwrap();
    let table = build_resolvent(&op, &kernel, &grid, None).unwrap();
    let psi = ConstantIntegrand::unit(1, 0);

    let paths = 20000;
    let set = stochastic_convolution_ensemble(&table, &psi, 42, paths).unwrap();
    let samples: Vec<f64> = (0..paths).map(|p| set.trajectory_l2_sq(p)).collect();
    let (mean, stderr) = mean_and_stderr(&samples);

    println!("paths: {paths}");
    println!("E int_0^1 |W|^2 dt = {mean:.6} (exact 0.5, stderr {stderr:.2e})");
    println!("within 3 sigma: {}", (mean - 0.5).abs() <= 3.0 * stderr);
    println!("W(0) = 0 on every path: {}", (0..paths).all(|p| set.value(p, 0).norm_h() == 0.0));
}
