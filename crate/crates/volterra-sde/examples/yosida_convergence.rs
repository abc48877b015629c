//! Yosida approximation suite: the resolvent error e1(n) = sup |S_n - S| v
//! and the strong convolution error e2(n) = E sup |A_n W_n - A W|^2 must
//! both decrease in n, and e2 must obey the decomposition bound
//! e2 <= 3 (N1^2 + N2^2).

use volterra_sde::stochastic::ConstantIntegrand;
use volterra_sde::verify::yosida_strong_convergence_suite;
use volterra_sde::{Kernel, SpectralOperator, TimeGrid};

fn main() {
    let op = SpectralOperator::dirichlet_laplacian(4);
    let kernel = Kernel::exponential();
    let grid = TimeGrid::new(1.0, 400).unwrap();
    let psi = ConstantIntegrand::new(vec![volterra_sde::HVector::new(vec![0.5; 4])]).unwrap();

    let report =
        yosida_strong_convergence_suite(&op, &kernel, &grid, &psi, 42, &[200, 2000, 20000], 128)
            .unwrap();

    println!("{:>8} {:>14} {:>14} {:>14} {:>14}", "n", "e1", "e2", "N1^2", "N2^2");
    for (i, &n) in report.n_list.iter().enumerate() {
        println!(
            "{n:>8} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}",
            report.e1[i], report.e2[i], report.n1_sq[i], report.n2_sq[i]
        );
    }
    println!("strictly decreasing: {}", report.strictly_decreasing());
    println!("e2 <= 3 (N1^2 + N2^2): {}", report.decomposition_bound_holds());
}
