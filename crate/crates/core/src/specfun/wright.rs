//! Mainardi's Wright-type function
//! `M_γ(θ) = Σ_k (−θ)^k / (k! Γ(1 − γ(k+1)))` and its moments.
//!
//! The alternating series loses all accuracy once its terms grow large
//! (for `γ = 0.9` the peak term at `θ = 3` exceeds `1e20`). In that regime
//! the Hankel integral `M_γ(θ) = (2πi)⁻¹ ∫ exp(σ − θσ^γ) σ^{γ−1} dσ` is
//! evaluated along its steepest-descent path through the saddle
//! `σ₀ = (γθ)^{1/(1−γ)}`, which turns it into a positive real integral over
//! `φ ∈ (0, π)`.

use core::f64::consts::PI;

use super::gamma::{gamma_fn, ln_gamma};
use super::quadrature::{adaptive_integrate, GaussLegendre, QuadratureSpec};
use super::rgamma;
use crate::error::{Error, Result};
use crate::math::{CompensatedSum, Real};

/// Below this size of `Σ|terms|` the series is summed directly.
const SERIES_MAX_MAGNITUDE: f64 = 1e2;

/// `M_γ(θ)` for `0 < γ < 1`, `θ ≥ 0`.
///
/// # Errors
///
/// [`Error::Domain`] for parameters outside the stated ranges and
/// [`Error::Accuracy`] if neither route converges.
pub fn mainardi_wright(gamma: f64, theta: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain(alloc::format!("Wright order {gamma} outside (0, 1)")));
    }
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::domain(alloc::format!("Wright argument {theta} must be finite and ≥ 0")));
    }
    if theta == 0.0 {
        return Ok(rgamma(1.0 - gamma));
    }
    if gamma == 0.5 {
        return Ok((-theta * theta / 4.0).exp() / PI.sqrt());
    }
    if let Some(v) = series(gamma, theta) {
        return Ok(v);
    }
    saddle_integral(gamma, theta)
}

/// Series with the reflection `1/Γ(1−x) = Γ(x) sin(πx)/π`, summed with
/// compensation and stopped once the terms fall below `1e-16` of the
/// largest partial sum. `None` if the terms grow too large for `f64`.
fn series(gamma: f64, theta: f64) -> Option<f64> {
    let ln_theta = theta.ln();
    let mut acc = CompensatedSum::new();
    let mut abs_sum = 0.0;
    let mut max_partial = 0.0f64;
    let mut past_peak = false;
    let mut prev_mag = f64::NEG_INFINITY;
    for k in 0..5000usize {
        let x = gamma * (k + 1) as f64;
        let log_mag = k as f64 * ln_theta + ln_gamma(x) - ln_gamma(k as f64 + 1.0);
        let s = (PI * x).sin();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * log_mag.exp() * s / PI;
        acc.add(term);
        abs_sum += term.abs();
        if abs_sum > SERIES_MAX_MAGNITUDE {
            return None;
        }
        max_partial = max_partial.max(acc.value().abs());
        if log_mag < prev_mag {
            past_peak = true;
        }
        prev_mag = log_mag;
        if past_peak && log_mag.exp() <= 1e-16 * max_partial.max(1e-300) {
            return Some(acc.value());
        }
    }
    None
}

fn saddle_integral(nu: f64, x: f64) -> Result<f64> {
    let lam = (x * nu).powf(1.0 / (1.0 - nu));
    let ln_lam = lam.ln();
    // The integrand peaks at φ = 0 with size λ^ν e^{λ(1 − 1/ν)}.
    let log_peak = nu * ln_lam + lam * (1.0 - 1.0 / nu);
    // Below e^{-650} the tolerances would turn subnormal; the value is
    // far beneath anything a caller can observe, so report zero.
    if log_peak < -650.0 {
        return Ok(0.0);
    }
    let integrand = |phi: f64| -> f64 {
        if phi <= 0.0 {
            return log_peak.exp();
        }
        let (a, da) = ratio_and_derivative(nu, phi);
        if !(a > 0.0) || !a.is_finite() {
            return 0.0;
        }
        let r = a.powf(1.0 / (1.0 - nu));
        let dr = r * da / (a * (1.0 - nu));
        let psi = r * phi.cos() - r.powf(nu) * (nu * phi).cos() / nu;
        let expo = nu * ln_lam + lam * psi;
        if expo < -745.0 {
            return 0.0;
        }
        expo.exp() * r.powf(nu - 1.0) * (dr * (nu * phi).sin() + r * (nu * phi).cos())
    };
    let rule = GaussLegendre::new(32);
    let scale = log_peak.exp();
    // The integrand is concentrated near φ = 0 on a scale ~ λ^{-1/2}.
    let width = (4.0 / lam.sqrt()).clamp(1e-3, PI);
    let (head, _) = adaptive_integrate(integrand, 0.0, width.min(PI), &rule, 1e-15 * scale, 1e-13, 30)?;
    let tail =
        if width < PI { adaptive_integrate(integrand, width, PI, &rule, 1e-15 * scale, 1e-13, 30)?.0 } else { 0.0 };
    Ok((head + tail) / PI)
}

/// `a(φ) = sin(νφ) / (ν sin φ)` and `a'(φ)`, with series near `φ = 0`.
fn ratio_and_derivative(nu: f64, phi: f64) -> (f64, f64) {
    if phi < 1e-4 {
        let c = (1.0 - nu * nu) / 6.0;
        return (1.0 + c * phi * phi, 2.0 * c * phi);
    }
    let (s, c) = (phi.sin(), phi.cos());
    let (sn, cn) = ((nu * phi).sin(), (nu * phi).cos());
    if s <= 0.0 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let a = sn / (nu * s);
    let da = (nu * cn * s - sn * c) / (nu * s * s);
    (a, da)
}

/// `∫_0^∞ θ^c M_γ(θ) dθ = Γ(1+c)/Γ(1+γc)` for `c > −1`.
///
/// # Errors
///
/// [`Error::Domain`] for `c ≤ −1` or `γ ∉ (0, 1)`.
pub fn wright_moment(gamma: f64, c: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain(alloc::format!("Wright order {gamma} outside (0, 1)")));
    }
    if !(c > -1.0) {
        return Err(Error::domain(alloc::format!("moment exponent {c} must exceed -1")));
    }
    Ok(gamma_fn(1.0 + c)? / gamma_fn(1.0 + gamma * c)?)
}

/// Which `θ`-integral of the subordination formulas to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubordinationKind {
    /// `∫ M_γ(θ) cos(zθ) dθ`, the cosine-family mode factor.
    Cosine,
    /// `∫ γθ M_γ(θ) sin(zθ) dθ`, the sine-family mode factor times `n`.
    SineWeighted,
}

/// Direct quadrature of the subordination integrals, used as an oracle
/// independent of the Mittag-Leffler code: the cosine kind equals
/// `E_{2γ,1}(−z²)` and the sine-weighted kind equals `z·E_{2γ,2γ}(−z²)`.
///
/// # Errors
///
/// [`Error::Domain`] for `z < 0`; quadrature and Wright-function failures
/// propagate.
pub fn subordination_oracle(gamma: f64, kind: SubordinationKind, z: f64, q: &QuadratureSpec) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::domain(alloc::format!("oracle frequency {z} must be ≥ 0")));
    }
    q.validate()?;
    let mut failure = None;
    let value = q.integrate_truncated(|theta| {
        let m = match mainardi_wright(gamma, theta) {
            Ok(m) => m,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        match kind {
            SubordinationKind::Cosine => m * (z * theta).cos(),
            SubordinationKind::SineWeighted => gamma * theta * m * (z * theta).sin(),
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_at_origin() {
        for g in [0.3, 0.6, 0.75] {
            let v = mainardi_wright(g, 0.0).unwrap();
            assert!((v - 1.0 / gamma_fn(1.0 - g).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn half_order_closed_form_on_both_routes() {
        for &x in &[0.1, 0.7, 2.0, 5.0, 9.0] {
            let exact = (-x * x / 4.0).exp() / PI.sqrt();
            assert!((saddle_integral(0.5, x).unwrap() - exact).abs() < 1e-14, "saddle x={x}");
            if let Some(s) = series(0.5, x) {
                assert!((s - exact).abs() < 1e-13, "series x={x}");
            }
        }
    }

    #[test]
    fn routes_agree_where_both_are_valid() {
        for &g in &[0.55, 0.6, 0.75, 0.9] {
            for &x in &[0.3, 0.8, 1.5] {
                let s = series(g, x).expect("series valid");
                let i = saddle_integral(g, x).unwrap();
                assert!((s - i).abs() < 1e-12, "g={g} x={x}: {s} vs {i}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(mainardi_wright(1.0, 1.0).is_err());
        assert!(mainardi_wright(0.5, -1.0).is_err());
        assert!(wright_moment(0.5, -1.0).is_err());
    }

    #[test]
    fn moment_identity_examples() {
        assert!((wright_moment(0.4, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((wright_moment(0.75, 1.0).unwrap() - 1.0 / gamma_fn(1.75).unwrap()).abs() < 1e-15);
        assert!((wright_moment(0.6, 2.0).unwrap() - 2.0 / gamma_fn(2.2).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn oracle_trivial_cases() {
        let q = QuadratureSpec::default();
        let mass = subordination_oracle(0.75, SubordinationKind::Cosine, 0.0, &q).unwrap();
        assert!((mass - 1.0).abs() < 1e-10);
        let zero = subordination_oracle(0.75, SubordinationKind::SineWeighted, 0.0, &q).unwrap();
        assert_eq!(zero, 0.0);
        assert!(subordination_oracle(0.75, SubordinationKind::Cosine, -1.0, &q).is_err());
    }
}
