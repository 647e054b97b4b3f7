//! Standard normal CDF and quantile.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::SQRT_2;

/// Φ(z), via the complementary error function so both tails keep full
/// relative precision.
pub fn cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Φ⁻¹(p) for p in (0, 1): an `erfc⁻¹` starting point polished by two
/// Newton steps against [`cdf`].
pub fn quantile(p: f64) -> f64 {
    let mut z = -SQRT_2 * erfc_inv(2.0 * p);
    for _ in 0..2 {
        let d = pdf(z);
        if d <= 0.0 || !z.is_finite() {
            break;
        }
        z -= (cdf(z) - p) / d;
    }
    z
}

/// Standard normal density, the default smoothing kernel.
pub fn pdf(z: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}
