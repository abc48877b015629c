//! Monte Carlo check of the Ito isometry E|int Psi dW|^2 = int sum_i
//! |Psi_i|^2 dt and of cross-orthogonality between distinct Wiener modes.

use volterra_sde::stochastic::{cross_orthogonality_test, ito_isometry_test, ConstantIntegrand};
use volterra_sde::TimeGrid;

fn main() {
    let grid = TimeGrid::new(1.0, 256).unwrap();
    let paths = 20000;
    let seed = 42;

    let unit = ConstantIntegrand::unit(4, 0);
    let report = ito_isometry_test(&unit, &grid, 1, paths, seed).unwrap();
    println!(
        "unit integrand:      E|I|^2 = {:.6}  exact = {:.6}  stderr = {:.2e}  within 3 sigma: {}",
        report.lhs,
        report.rhs,
        report.stderr,
        report.within_three_sigma()
    );

    let geometric = ConstantIntegrand::geometric(8, 4);
    let report = ito_isometry_test(&geometric, &grid, 8, paths, seed).unwrap();
    println!(
        "geometric integrand: E|I|^2 = {:.6}  exact = {:.6}  stderr = {:.2e}  within 3 sigma: {}",
        report.lhs,
        report.rhs,
        report.stderr,
        report.within_three_sigma()
    );

    let ortho = cross_orthogonality_test(&geometric, &grid, 0, 1, paths, seed).unwrap();
    println!(
        "cross-orthogonality: estimate = {:+.6}  stderr = {:.2e}  within 3 sigma of 0: {}",
        ortho.estimate,
        ortho.stderr,
        ortho.within_three_sigma()
    );
}
