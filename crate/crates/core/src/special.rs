//! Gamma function helpers.
//!
//! Backed by `libm`'s `tgamma`/`lgamma`, which are accurate to a few ulps
//! on the positive axis.

use crate::error::{check_range, Result};

/// Euler's gamma function for `z > 0`.
pub fn gamma_fn(z: f64) -> Result<f64> {
    check_range("z", z, z > 0.0 && z.is_finite(), "a positive finite real")?;
    Ok(libm::tgamma(z))
}

/// `1/Γ(z)` for `z >= 0`, continuous at the pole `z = 0` where it is 0.
pub(crate) fn recip_gamma(z: f64) -> f64 {
    if z == 0.0 {
        0.0
    } else {
        1.0 / libm::tgamma(z)
    }
}

/// `ln Γ(z)` for `z > 0`.
pub(crate) fn ln_gamma(z: f64) -> f64 {
    libm::lgamma(z)
}
