use alloc::vec::Vec;

use crate::math::Real;
use crate::specfun::rgamma;
use crate::{Error, Result};

/// Inputs of the contraction condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CndInputs {
    /// `M ≥ sup ‖C_γ(t)‖`.
    pub m: f64,
    /// `M̃ = ‖B‖`.
    pub m_tilde: f64,
    /// Horizon `T`.
    pub horizon: f64,
    /// `γ = α/2`.
    pub gamma: f64,
    /// Growth exponent `δ ∈ [0, γ]`, `δ < 1`.
    pub delta: f64,
    /// Phase-space constant `K₂`.
    pub k2: f64,
    /// Growth constant `ζ` of the nonlinearity.
    pub zeta: f64,
    /// Number of impulses `p`.
    pub impulses: usize,
    /// `λ > 0`.
    pub lambda: f64,
}

impl CndInputs {
    /// # Errors
    ///
    /// [`Error::Validation`] naming the first invalid field.
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("cnd.m", self.m > 0.0),
            ("cnd.m_tilde", self.m_tilde >= 0.0),
            ("cnd.horizon", self.horizon > 0.0),
            ("cnd.gamma", self.gamma > 0.5 && self.gamma <= 1.0),
            ("cnd.delta", self.delta >= 0.0 && self.delta <= self.gamma && self.delta < 1.0),
            ("cnd.k2", self.k2 >= 0.0),
            ("cnd.zeta", self.zeta >= 0.0),
            ("cnd.lambda", self.lambda > 0.0),
        ];
        for (field, ok) in checks {
            if !ok {
                return Err(Error::invalid(field, "out of range"));
            }
        }
        Ok(())
    }

    /// `R = 2T^{3γ}/(3γλ) · (M M̃/Γ(2γ))²`.
    pub fn r(&self) -> f64 {
        let g = self.gamma;
        let q = self.m * self.m_tilde * rgamma(2.0 * g);
        2.0 * self.horizon.powf(3.0 * g) / (3.0 * g * self.lambda) * q * q
    }

    /// `c = (2γ − δ)/(1 − δ)`.
    pub fn c(&self) -> f64 {
        (2.0 * self.gamma - self.delta) / (1.0 - self.delta)
    }

    /// `2M T^{2γ−δ}/(Γ(2γ) c^{1−δ})`, the factor shared by the condition
    /// and the bounds `N_j`.
    pub fn forcing_factor(&self) -> f64 {
        let g = self.gamma;
        2.0 * self.m * self.horizon.powf(2.0 * g - self.delta) * rgamma(2.0 * g) / self.c().powf(1.0 - self.delta)
    }
}

/// Left-hand side of the contraction condition
/// `2MT^{2γ−δ}K₂ζ/(Γ(2γ)c^{1−δ}) · {1 + (p+1)(p+2)R/2
///  + p(p+1)R²/2 · Σ_{k<p} e^{(p+k)(p−k−1)R/2}}`; existence needs it `< 1`.
///
/// # Errors
///
/// [`Error::Validation`] for invalid inputs.
pub fn cnd_check(inputs: &CndInputs) -> Result<f64> {
    inputs.validate()?;
    let r = inputs.r();
    let p = inputs.impulses as f64;
    let tail: f64 = (0..inputs.impulses)
        .map(|k| {
            let k = k as f64;
            ((p + k) * (p - k - 1.0) * r / 2.0).exp()
        })
        .sum();
    let braces = 1.0 + (p + 1.0) * (p + 2.0) * r / 2.0 + p * (p + 1.0) * r * r / 2.0 * tail;
    Ok(inputs.forcing_factor() * inputs.k2 * inputs.zeta * braces)
}

/// Data entering the a-priori bounds `N_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsInputs {
    /// Constants shared with the condition (`p` is `xi_norms.len() − 1`).
    pub cnd: CndInputs,
    /// `‖ξ_j‖`, `j = 0..=p`.
    pub xi_norms: Vec<f64>,
    /// `‖ψ(0)‖`.
    pub psi0_norm: f64,
    /// `‖η‖`.
    pub eta_norm: f64,
    /// `‖φ_{r'}‖`, the bound of the nonlinearity on the ball.
    pub phi_norm: f64,
    /// `κ_j`, `j = 1..=p`.
    pub kappa: Vec<f64>,
    /// `ϑ_j`, `j = 1..=p`.
    pub theta: Vec<f64>,
}

/// `(N_0..N_p, C_0..C_p)` with `C_0 = N_0` and
/// `C_j = N_j + R Σ_{k<j} N_k e^{(j+k)(j−k−1)R/2}`.
///
/// # Errors
///
/// [`Error::Validation`] for inconsistent lengths or invalid constants.
pub fn bounds_nj_cj(b: &BoundsInputs) -> Result<(Vec<f64>, Vec<f64>)> {
    b.cnd.validate()?;
    let p = b.xi_norms.len().checked_sub(1).ok_or(Error::invalid("targets", "need ξ_0"))?;
    if b.kappa.len() != p || b.theta.len() != p {
        return Err(Error::invalid("schedule.impulse", "κ and ϑ need one entry per impulse"));
    }
    let m = b.cnd.m;
    let t = b.cnd.horizon;
    let forcing = b.cnd.forcing_factor() * b.phi_norm;
    let mut n = Vec::with_capacity(p + 1);
    n.push(b.xi_norms[0] + m * b.psi0_norm + m * t * b.eta_norm + forcing);
    for j in 1..=p {
        n.push(b.xi_norms[j] + m * b.kappa[j - 1] + m * t * b.theta[j - 1] + forcing);
    }
    let r = b.cnd.r();
    let c = (0..=p)
        .map(|j| {
            let jf = j as f64;
            n[j] + r
                * (0..j)
                    .map(|k| {
                        let kf = k as f64;
                        n[k] * ((jf + kf) * (jf - kf - 1.0) * r / 2.0).exp()
                    })
                    .sum::<f64>()
        })
        .collect();
    Ok((n, c))
}

/// `B_n = g_n + Σ_{k<n} g_k w_k exp(Σ_{k<j<n} w_j)`: any `f` with
/// `f_n ≤ g_n + Σ_{k<n} w_k f_k` satisfies `f_n ≤ B_n`.
///
/// # Errors
///
/// [`Error::Validation`] for unequal lengths or negative/non-finite entries.
pub fn discrete_gronwall_bound(g: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    if g.len() != w.len() {
        return Err(Error::invalid("gronwall", "sequences differ in length"));
    }
    if g.iter().chain(w).any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::invalid("gronwall", "entries must be finite and non-negative"));
    }
    Ok((0..g.len())
        .map(|n| {
            g[n] + (0..n)
                .map(|k| {
                    let s: f64 = w[k + 1..n].iter().sum();
                    g[k] * w[k] * s.exp()
                })
                .sum::<f64>()
        })
        .collect())
}
