//! Scalar special functions: the Mittag-Leffler function and the gamma
//! function it needs. `mittag_leffler` is kept independent of the Volterra
//! time-stepping machinery so it can serve as an oracle for it.

use crate::error::{Error, Result};

/// Largest |z| accepted at all.
pub const ML_MAX_SERIES_ARG: f64 = 50.0;

const MAX_SERIES_TERMS: usize = 400;
const MAX_ASYMPTOTIC_TERMS: usize = 40;

/// Gamma function on the real line (poles at 0, -1, -2, ... excluded).
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// One-parameter Mittag-Leffler function E_alpha(z) = sum_k z^k / Gamma(alpha*k + 1).
///
/// Direct power series with Kahan-compensated summation. The alternating
/// series cancels catastrophically for strongly negative z, so when the
/// estimated cancellation error becomes visible the algebraic expansion
/// E_alpha(z) ~ -sum_{k>=1} z^{-k} / Gamma(1 - alpha*k) takes over
/// (available for alpha in (0,1), z < 0).
pub fn mittag_leffler(alpha: f64, z: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::Unsupported(format!(
            "mittag_leffler: alpha = {alpha} outside (0, 2)"
        )));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z.abs() <= ML_MAX_SERIES_ARG {
        if let Some((sum, max_term)) = ml_series(alpha, z) {
            let cancellation = max_term * f64::EPSILON;
            if sum.is_finite() && cancellation <= 1e-8 * sum.abs().max(1e-3) {
                return Ok(sum);
            }
        }
        if z < 0.0 && alpha < 1.0 {
            return Ok(ml_asymptotic_negative(alpha, z));
        }
        return Err(Error::Numeric(format!(
            "mittag_leffler: series cancellation too severe at alpha = {alpha}, z = {z}"
        )));
    }
    if z < 0.0 && alpha < 1.0 {
        return Ok(ml_asymptotic_negative(alpha, z));
    }
    Err(Error::Unsupported(format!(
        "mittag_leffler: |z| = {} exceeds series range {} and no asymptotic \
         branch applies for alpha = {}",
        z.abs(),
        ML_MAX_SERIES_ARG,
        alpha
    )))
}

/// Returns (sum, largest term magnitude), or None when the series did not
/// converge within the term budget or overflowed.
fn ml_series(alpha: f64, z: f64) -> Option<(f64, f64)> {
    let mut sum = 1.0_f64; // k = 0 term
    let mut comp = 0.0_f64; // Kahan compensation
    let mut term = 1.0_f64;
    let mut max_term = 1.0_f64;
    let mut lg_prev = 0.0_f64; // ln Gamma(1)
    for k in 1..MAX_SERIES_TERMS {
        // term_k = term_{k-1} * z * Gamma(alpha(k-1)+1) / Gamma(alpha k + 1);
        // the ratio's logarithm is small, keeping per-term rounding tight
        let lg = statrs::function::gamma::ln_gamma(alpha * k as f64 + 1.0);
        term *= z * (lg_prev - lg).exp();
        lg_prev = lg;
        if !term.is_finite() {
            return None;
        }
        max_term = max_term.max(term.abs());
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if k > 4 && term.abs() < 1e-18 * sum.abs().max(1.0) {
            return Some((sum, max_term));
        }
    }
    None
}

fn ml_asymptotic_negative(alpha: f64, z: f64) -> f64 {
    debug_assert!(z < 0.0 && alpha < 1.0);
    let mut sum = 0.0_f64;
    let mut zk = 1.0_f64;
    let mut last_mag = f64::INFINITY;
    for k in 1..=MAX_ASYMPTOTIC_TERMS {
        zk *= z;
        let arg = 1.0 - alpha * k as f64;
        // at non-positive integer arguments Gamma has a pole and the term vanishes
        if (arg - arg.round()).abs() < 1e-12 && arg.round() <= 0.0 {
            continue;
        }
        let term = -1.0 / (zk * gamma(arg));
        let mag = term.abs();
        if mag > last_mag {
            break; // optimal truncation of the divergent expansion
        }
        sum += term;
        last_mag = mag;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gamma_reference_values() {
        assert_abs_diff_eq!(gamma(1.0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gamma(0.5), std::f64::consts::PI.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(gamma(5.0), 24.0, epsilon = 1e-9);
        // reflection below zero: Gamma(-0.5) = -2 sqrt(pi)
        assert_abs_diff_eq!(
            gamma(-0.5),
            -2.0 * std::f64::consts::PI.sqrt(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn ml_alpha_one_is_exponential() {
        // the alternating series at z = -10 carries ~exp(10) of summed term
        // magnitude, which caps the absolute accuracy around 1e-11
        for &z in &[-10.0, -1.0, -0.1, 0.0, 0.5, 3.0] {
            assert_abs_diff_eq!(mittag_leffler(1.0, z).unwrap(), f64::exp(z), epsilon = 1e-10);
        }
    }

    #[test]
    fn ml_at_zero_is_one() {
        for &alpha in &[0.3, 0.5, 1.0, 1.5] {
            assert_eq!(mittag_leffler(alpha, 0.0).unwrap(), 1.0);
        }
    }

    // E_{1/2}(-x) = exp(x^2) erfc(x); erfc comes from statrs which shares no
    // code with the series or asymptotic branches above.
    #[test]
    fn ml_half_matches_erfc_identity() {
        // near the series/asymptotic crossover (x ~ 4) both branches floor
        // out around 1e-7 absolute; at small x the statrs erfc itself is the
        // limiting factor (~1e-10)
        for &(x, eps) in &[(0.25_f64, 1e-9), (0.5, 1e-9), (1.0, 1e-9), (2.0, 1e-9), (4.0, 1e-6)] {
            let expected = (x * x).exp() * statrs::function::erf::erfc(x);
            assert_abs_diff_eq!(mittag_leffler(0.5, -x).unwrap(), expected, epsilon = eps);
        }
    }

    #[test]
    fn ml_half_at_minus_one_reference() {
        // exp(1)*erfc(1)
        assert_abs_diff_eq!(
            mittag_leffler(0.5, -1.0).unwrap(),
            0.4275835761558070,
            epsilon = 1e-12
        );
    }

    // the cancellation guard hands these arguments to the asymptotic branch;
    // the erfc identity still pins the value (via the scaled complementary
    // error function to avoid overflow in exp(x^2))
    #[test]
    fn ml_half_asymptotic_region() {
        for &x in &[8.0, 20.0, 45.0, 80.0] {
            let got = mittag_leffler(0.5, -x).unwrap();
            let expected = erfcx(x);
            let rel = (got - expected).abs() / expected;
            assert!(rel < 1e-6, "x = {x}: got {got}, expected {expected}");
        }
    }

    // erfcx(x) = exp(x^2) erfc(x) via its continued fraction (Lentz),
    // an independent route for the oracle above
    fn erfcx(x: f64) -> f64 {
        let mut f = x;
        let mut c = f;
        let mut d = 0.0_f64;
        // continued fraction x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))
        for i in 1..200 {
            let a = 0.5 * i as f64;
            d = x + a * d;
            if d.abs() < 1e-300 {
                d = 1e-300;
            }
            c = x + a / c;
            if c.abs() < 1e-300 {
                c = 1e-300;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        1.0 / (f * std::f64::consts::PI.sqrt())
    }

    #[test]
    fn ml_rejects_out_of_range_alpha() {
        assert!(mittag_leffler(0.0, -1.0).is_err());
        assert!(mittag_leffler(2.0, -1.0).is_err());
    }

    #[test]
    fn ml_rejects_large_positive_argument() {
        assert!(mittag_leffler(0.5, 100.0).is_err());
    }
}
