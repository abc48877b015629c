//! Builds the resolvent table for the fractional kernel and compares each
//! scalar mode against the Mittag-Leffler closed form E_alpha(lambda t^alpha).

use volterra_sde::resolvent::build_resolvent;
use volterra_sde::{mittag_leffler, Kernel, SpectralOperator, TimeGrid};

fn main() {
    let alpha = 0.5;
    let op = SpectralOperator::from_eigenvalues(vec![-1.0, -4.0], "two modes").unwrap();
    let kernel = Kernel::fractional(alpha).unwrap();
    let grid = TimeGrid::new(1.0, 1000).unwrap();
    let table = build_resolvent(&op, &kernel, &grid, None).unwrap();

    for k in 0..op.dim() {
        let lambda = op.eigenvalue(k);
        let mut max_err = 0.0_f64;
        for j in 0..grid.len() {
            let t = grid.t(j);
            let oracle = mittag_leffler(alpha, lambda * t.powf(alpha)).unwrap();
            max_err = max_err.max((table.scalar(k, j) - oracle).abs());
        }
        println!(
            "lambda = {lambda:6.1}: sup |S_dt(t) - E_{alpha}(lambda t^{alpha})| = {max_err:.3e}"
        );
    }

    let (m, omega) = table.exponential_bound_fit();
    println!("exponential bound fit: |S(t)| <= {m:.4} exp({omega:.4} t)");
}
