//! Standard normal CDF and quantile.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::SQRT_2;

/// Φ(x), accurate in both tails.
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Φ⁻¹(p); ±∞ at the endpoints.
pub fn quantile(p: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if p >= 1.0 {
        f64::INFINITY
    } else {
        -SQRT_2 * erfc_inv(2.0 * p)
    }
}

/// ln(Φ(b) − Φ(a)) for a ≤ b.
pub fn ln_interval_prob(a: f64, b: f64) -> f64 {
    // work on the side of zero with less cancellation
    let (a, b) = if a + b > 0.0 { (-b, -a) } else { (a, b) };
    (cdf(b) - cdf(a)).ln()
}
