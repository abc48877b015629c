//! Pathwise continuity probe of the stochastic convolution: largest
//! one-step jump across an ensemble and an empirical Hoelder exponent
//! fitted to the RMS modulus of continuity.

use volterra_sde::convolution::{regularity_probe, stochastic_convolution_ensemble};
use volterra_sde::resolvent::build_resolvent;
use volterra_sde::stochastic::ConstantIntegrand;
use volterra_sde::{HVector, Kernel, SpectralOperator, TimeGrid};

fn main() {
    let op = SpectralOperator::dirichlet_laplacian(8);
    let dim = op.dim();
    let kernel = Kernel::exponential();
    let grid = TimeGrid::new(1.0, 800).unwrap();
    let table = build_resolvent(&op, &kernel, &grid, None).unwrap();
    let psi = ConstantIntegrand::new(vec![HVector::new(vec![1.0 / (dim as f64).sqrt(); dim])])
        .unwrap();

    let set = stochastic_convolution_ensemble(&table, &psi, 42, 64).unwrap();
    let report = regularity_probe(&set).unwrap();

    println!("paths: 64, dt = {:.2e}", grid.dt());
    println!("largest one-step jump: {:.6e}", report.max_jump);
    println!("empirical Hoelder exponent: {:.4} (Brownian scaling is 0.5)", report.holder_estimate);
    println!("RMS modulus of continuity:");
    for (lag, rms) in &report.moduli {
        println!("  lag {lag:.4e}: {rms:.6e}");
    }
}
