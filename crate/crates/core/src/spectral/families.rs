//! Classical and fractional solution families as diagonal mode maps.
//!
//! With `A w_n = −n² w_n` every family acts on the `n`-th coefficient by a
//! scalar factor. Writing `g_β(u) = E_{2γ,β}(−u²)` and `σ = t^γ`:
//!
//! | family | factor |
//! |---|---|
//! | `C_γ(t)` | `g_1(nσ)` |
//! | `T_γ(t) = ∫₀ᵗ C_γ` | `t·g_2(nσ)` |
//! | `S_γ(t)` | `σ·g_{2γ}(nσ)` |
//!
//! At `γ = 1` these are `cos nt`, `sin(nt)/n` and `sin(nt)/n`.

use alloc::vec::Vec;

use super::SpectralField;
use crate::math::Real;
use crate::specfun::{gamma_fn, ml_value, MLParams, MlTable};
use crate::{Error, Result};

/// Fractional order `α ∈ (1, 2]` with `γ = α/2` and the cosine-family
/// bound `M` (equal to 1 for the Dirichlet Laplacian).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalParams {
    /// Order of the Caputo derivative.
    pub alpha: f64,
    /// `α / 2`.
    pub gamma: f64,
    /// `sup ‖C(t)‖`.
    pub cosine_bound_m: f64,
}

impl FractionalParams {
    /// Validates `α ∈ (1, 2]`; `α = 2` is the classical wave equation.
    ///
    /// # Errors
    ///
    /// [`Error::Validation`] naming `fractional.alpha`.
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha <= 2.0) {
            return Err(Error::invalid("fractional.alpha", alloc::format!("{alpha} outside (1, 2]")));
        }
        Ok(Self { alpha, gamma: alpha / 2.0, cosine_bound_m: 1.0 })
    }

    /// Convenience constructor from `γ ∈ (1/2, 1]`.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        Self::new(2.0 * gamma)
    }

    /// `true` for the classical wave limit `α = 2`.
    pub fn is_classical(&self) -> bool {
        self.gamma == 1.0
    }

    /// `1/Γ(2γ)`, the limit of `S_γ(t)/t^γ` as `t ↓ 0`.
    pub fn sine_limit(&self) -> f64 {
        1.0 / gamma_fn(2.0 * self.gamma).expect("2γ ∈ (1, 2] is not a pole")
    }
}

#[inline]
fn g_direct(gamma: f64, beta: f64, u: f64) -> f64 {
    if gamma == 1.0 {
        return if beta == 1.0 { u.cos() } else { sinc(u) };
    }
    ml_value(2.0 * gamma, beta, -u * u)
}

#[inline]
fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// `E_{2γ,1}(−n² t^{2γ})`, the `C_γ(t)` factor of mode `n`.
pub fn c_factor(p: &FractionalParams, n: usize, t: f64) -> f64 {
    g_direct(p.gamma, 1.0, n as f64 * t.powf(p.gamma))
}

/// `t·E_{2γ,2}(−n² t^{2γ})`, the `T_γ(t)` factor of mode `n`.
pub fn t_factor(p: &FractionalParams, n: usize, t: f64) -> f64 {
    t * g_direct(p.gamma, 2.0, n as f64 * t.powf(p.gamma))
}

/// `t^γ·E_{2γ,2γ}(−n² t^{2γ})`, the `S_γ(t)` factor of mode `n`.
pub fn s_factor(p: &FractionalParams, n: usize, t: f64) -> f64 {
    let sigma = t.powf(p.gamma);
    sigma * g_direct(p.gamma, 2.0 * p.gamma, n as f64 * sigma)
}

/// Classical cosine family `C(t)`: `c_n ↦ cos(nt)·c_n`.
pub fn cosine_family(t: f64, x: &SpectralField) -> SpectralField {
    x.map_modes(|n, c| (n as f64 * t).cos() * c)
}

/// Classical sine family `S(t)`: `c_n ↦ sin(nt)/n·c_n`.
pub fn sine_family(t: f64, x: &SpectralField) -> SpectralField {
    x.map_modes(|n, c| (n as f64 * t).sin() / n as f64 * c)
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(alloc::format!("family time {t} must be finite and ≥ 0")));
    }
    Ok(())
}

/// Fractional cosine family `C_γ(t)`.
///
/// # Errors
///
/// [`Error::Domain`] for negative or non-finite `t`.
pub fn c_gamma(t: f64, x: &SpectralField, p: &FractionalParams) -> Result<SpectralField> {
    check_time(t)?;
    Ok(x.map_modes(|n, c| c_factor(p, n, t) * c))
}

/// `T_γ(t) = ∫₀ᵗ C_γ(s) ds`.
///
/// # Errors
///
/// [`Error::Domain`] for negative or non-finite `t`.
pub fn t_gamma(t: f64, x: &SpectralField, p: &FractionalParams) -> Result<SpectralField> {
    check_time(t)?;
    Ok(x.map_modes(|n, c| t_factor(p, n, t) * c))
}

/// Fractional sine family `S_γ(t)`.
///
/// # Errors
///
/// [`Error::Domain`] for negative or non-finite `t`.
pub fn s_gamma(t: f64, x: &SpectralField, p: &FractionalParams) -> Result<SpectralField> {
    check_time(t)?;
    Ok(x.map_modes(|n, c| s_factor(p, n, t) * c))
}

/// `S_γ(T − t)x* / (T − t)^γ`, whose coefficients tend to
/// `2γ/Γ(1+2γ)·⟨x*, w_n⟩` as `t ↑ T`.
///
/// # Errors
///
/// [`Error::Domain`] unless `0 ≤ t < T`.
pub fn limit_5_4_ratio(t: f64, horizon: f64, xstar: &SpectralField, p: &FractionalParams) -> Result<SpectralField> {
    if !(t >= 0.0 && t < horizon) {
        return Err(Error::domain(alloc::format!("ratio needs 0 ≤ t < T, got t = {t}, T = {horizon}")));
    }
    let sigma = (horizon - t).powf(p.gamma);
    Ok(xstar.map_modes(|n, c| g_direct(p.gamma, 2.0 * p.gamma, n as f64 * sigma) * c))
}

/// Tabulated mode factors for every `n ≤ N` and `t` up to a horizon.
///
/// The three functions `g_1, g_2, g_{2γ}` are stored as Chebyshev tables on
/// `u ∈ [0, N·horizon^γ]`; at `γ = 1` the closed forms are used instead.
#[derive(Debug, Clone)]
pub struct Families {
    params: FractionalParams,
    modes: usize,
    horizon: f64,
    tables: Option<[MlTable; 3]>,
}

impl Families {
    /// Builds tables for `modes` modes and times in `[0, horizon]`.
    ///
    /// # Errors
    ///
    /// Rejects a non-positive horizon; propagates table construction errors.
    pub fn new(params: FractionalParams, modes: usize, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::invalid("horizon", "must be positive and finite"));
        }
        let tables = if params.is_classical() {
            None
        } else {
            let a = 2.0 * params.gamma;
            let upper = modes as f64 * horizon.powf(params.gamma) * (1.0 + 1e-12);
            Some([
                MlTable::new(MLParams::new(a, 1.0)?, upper)?,
                MlTable::new(MLParams::new(a, 2.0)?, upper)?,
                MlTable::new(MLParams::new(a, a)?, upper)?,
            ])
        };
        Ok(Self { params, modes, horizon, tables })
    }

    /// The fractional parameters.
    pub fn params(&self) -> &FractionalParams {
        &self.params
    }

    /// `γ`.
    pub fn gamma(&self) -> f64 {
        self.params.gamma
    }

    /// Number of tabulated modes.
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Largest tabulated time.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    #[inline]
    fn g(&self, which: usize, u: f64) -> f64 {
        match &self.tables {
            Some(t) => t[which].eval(u),
            None => {
                if which == 0 {
                    u.cos()
                } else {
                    sinc(u)
                }
            }
        }
    }

    /// `C_γ(t)` factor of mode `n`.
    #[inline]
    pub fn c(&self, n: usize, t: f64) -> f64 {
        self.g(0, n as f64 * t.powf(self.params.gamma))
    }

    /// `T_γ(t)` factor of mode `n`.
    #[inline]
    pub fn tt(&self, n: usize, t: f64) -> f64 {
        t * self.g(1, n as f64 * t.powf(self.params.gamma))
    }

    /// `S_γ(t)` factor of mode `n`.
    #[inline]
    pub fn s(&self, n: usize, t: f64) -> f64 {
        self.s_sigma(n, t.powf(self.params.gamma))
    }

    /// `S_γ` factor of mode `n` in the variable `σ = t^γ`.
    #[inline]
    pub fn s_sigma(&self, n: usize, sigma: f64) -> f64 {
        sigma * self.g(2, n as f64 * sigma)
    }

    /// All `S_γ` factors at `σ`, modes `1..=N`.
    pub fn s_sigma_all(&self, sigma: f64) -> Vec<f64> {
        (1..=self.modes).map(|n| self.s_sigma(n, sigma)).collect()
    }

    /// Applies `C_γ(t)`.
    pub fn apply_c(&self, t: f64, x: &SpectralField) -> SpectralField {
        x.map_modes(|n, c| self.c(n, t) * c)
    }

    /// Applies `T_γ(t)`.
    pub fn apply_t(&self, t: f64, x: &SpectralField) -> SpectralField {
        x.map_modes(|n, c| self.tt(n, t) * c)
    }

    /// Applies `S_γ(t)`.
    pub fn apply_s(&self, t: f64, x: &SpectralField) -> SpectralField {
        x.map_modes(|n, c| self.s(n, t) * c)
    }
}
