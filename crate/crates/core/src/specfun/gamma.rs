use crate::error::{Error, Result};
use crate::math::Real;

/// Euler's gamma function.
///
/// Backed by the `libm` implementation, which is accurate to a few ulps on
/// the positive axis and handles the reflection region for negative `x`.
///
/// # Errors
///
/// [`Error::Domain`] at the poles `x ∈ {0, −1, −2, …}` and for NaN input.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("gamma of NaN"));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::domain(alloc::format!("gamma has a pole at {x}")));
    }
    Ok(libm::tgamma(x))
}

/// `ln |Γ(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// The reciprocal gamma function `1/Γ(x)`, an entire function: zero at the
/// poles of `Γ` and free of overflow for large arguments.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x < 170.0 {
        return 1.0 / libm::tgamma(x);
    }
    let (lg, sign) = libm::lgamma_r(x);
    sign as f64 * (-lg).exp()
}
