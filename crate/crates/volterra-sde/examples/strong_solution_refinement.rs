//! Residual of the strong solution identity X = a * AX + int Psi dW under
//! grid refinement: the quadrature residual should contract with an order
//! close to one for both the exponential and fractional kernels.

use volterra_sde::stochastic::ConstantIntegrand;
use volterra_sde::verify::strong_refinement_study;
use volterra_sde::{HVector, Kernel, SpectralOperator};

fn main() {
    let op = SpectralOperator::dirichlet_laplacian(8);
    let dim = op.dim();
    let psi = ConstantIntegrand::new(vec![HVector::new(vec![1.0 / (dim as f64).sqrt(); dim])])
        .unwrap();
    let steps = [200, 400, 800];

    for (name, kernel) in [
        ("exponential", Kernel::exponential()),
        ("fractional alpha=1.0", Kernel::fractional(1.0).unwrap()),
    ] {
        let study = strong_refinement_study(&op, &kernel, 1.0, &steps, &psi, 42, 128).unwrap();
        println!("{name}:");
        for (i, &n) in study.steps.iter().enumerate() {
            print!("  steps = {n:4}: residual sup mean = {:.6e}", study.sup_means[i]);
            if i > 0 {
                print!("  observed order = {:.3}", study.rates[i - 1]);
            }
            println!();
        }
    }
}
