use alloc::vec::Vec;

use crate::banach::{exp_linear_weights, lp_norm, HistorySegment, LebesgueSpace};
use crate::evolution::Trajectory;
use crate::math::Real;
use crate::spectral::SpectralField;
use crate::{Error, Result};

/// Registry of memory kernels `b` on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MemoryKernel {
    /// `b ≡ 0`: no delayed forcing.
    None,
    /// `b(s) = scale · e^{−rate·s}`.
    Exponential {
        /// Amplitude (equals the certificate `L`).
        scale: f64,
        /// Decay rate; must be at least `−a`.
        rate: f64,
    },
}

/// Registry of delay magnitudes `β ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayBeta {
    /// `β ≡ 0`.
    Zero,
    /// `β ≡ c`.
    Constant(f64),
    /// `β(r) = scale · r/(1 + r)`.
    Rational {
        /// Saturation value.
        scale: f64,
    },
}

impl DelayBeta {
    /// `β(r)`.
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            DelayBeta::Zero => 0.0,
            DelayBeta::Constant(c) => c,
            DelayBeta::Rational { scale } => scale * r / (1.0 + r),
        }
    }
}

/// The state-dependent delay: memory kernel, delay magnitude and the weight
/// `g(θ) = e^{aθ}` of the phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayLaw {
    kernel: MemoryKernel,
    beta: DelayBeta,
    weight_rate: f64,
}

impl DelayLaw {
    /// # Errors
    ///
    /// [`Error::Validation`] naming the offending `delay.*` key when `a ≥ 0`,
    /// `β` can be negative, or `sup_{θ≤0} |b(−θ)| g(θ)` is infinite
    /// (`rate < −a`).
    pub fn new(kernel: MemoryKernel, beta: DelayBeta, weight_rate: f64) -> Result<Self> {
        if !(weight_rate < 0.0) || !weight_rate.is_finite() {
            return Err(Error::invalid("delay.a", "weight rate must be negative"));
        }
        if let MemoryKernel::Exponential { scale, rate } = kernel {
            if !(scale >= 0.0) || !scale.is_finite() {
                return Err(Error::invalid("delay.kernel.scale", "must be finite and ≥ 0"));
            }
            if !(rate >= -weight_rate) || !rate.is_finite() {
                return Err(Error::invalid(
                    "delay.kernel.rate",
                    alloc::format!("rate {rate} < −a = {}: the memory certificate L is infinite", -weight_rate),
                ));
            }
        }
        match beta {
            DelayBeta::Constant(c) if !(c >= 0.0) || !c.is_finite() => {
                return Err(Error::invalid("delay.beta.value", "must be finite and ≥ 0"));
            }
            DelayBeta::Rational { scale } if !(scale >= 0.0) || !scale.is_finite() => {
                return Err(Error::invalid("delay.beta.scale", "must be finite and ≥ 0"));
            }
            _ => {}
        }
        Ok(Self { kernel, beta, weight_rate })
    }

    /// No delayed forcing at all.
    pub fn none(weight_rate: f64) -> Result<Self> {
        Self::new(MemoryKernel::None, DelayBeta::Zero, weight_rate)
    }

    /// The memory kernel.
    pub fn kernel(&self) -> &MemoryKernel {
        &self.kernel
    }

    /// The delay magnitude.
    pub fn beta(&self) -> &DelayBeta {
        &self.beta
    }

    /// `a`.
    pub fn weight_rate(&self) -> f64 {
        self.weight_rate
    }

    /// `true` when `f ≡ 0`.
    pub fn is_none(&self) -> bool {
        match self.kernel {
            MemoryKernel::None => true,
            MemoryKernel::Exponential { scale, .. } => scale == 0.0,
        }
    }

    /// `L = sup_{θ≤0} |b(−θ)| g(θ)`.
    pub fn certificate(&self) -> f64 {
        match self.kernel {
            MemoryKernel::None => 0.0,
            MemoryKernel::Exponential { scale, .. } => scale,
        }
    }
}

/// `ϱ(t, ψ) = t − β(‖ψ(0)‖_p)`; negative values reach into the history.
pub fn delay_rho(t: f64, seg: &HistorySegment, law: &DelayLaw, sp: &LebesgueSpace) -> f64 {
    t - law.beta.eval(lp_norm(seg.at_zero(), sp))
}

/// `f(ψ) = ∫_{−∞}^0 b(−θ) ψ(θ) dθ`.
///
/// The piecewise-linear segment is integrated against the exponential
/// kernel exactly; left of the window the segment's constant extension
/// contributes `ψ(θ_min)·scale·e^{rate θ_min}/rate`.
pub fn delay_functional_f(seg: &HistorySegment, law: &DelayLaw) -> SpectralField {
    let grid = seg.at_zero().grid();
    let MemoryKernel::Exponential { scale, rate } = law.kernel else {
        return SpectralField::zero(grid);
    };
    let th = seg.theta();
    let vals = seg.values();
    let mut out = vals[0].scale(scale * (rate * th[0]).exp() / rate);
    for k in 1..th.len() {
        let (w0, w1) = exp_linear_weights(rate, th[k - 1], th[k]);
        out.axpy(scale * w0, &vals[k - 1]);
        out.axpy(scale * w1, &vals[k]);
    }
    out
}

/// Evaluates `t ↦ f(t, x_{ϱ(t, x_t)})` along a fixed trajectory, working on
/// mode coefficients with the same exact product integration as
/// [`delay_functional_f`], but without materializing segments.
#[derive(Debug, Clone)]
pub struct DelayContext {
    law: DelayLaw,
    times: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
}

impl DelayContext {
    /// Splices the history (nodes `θ < 0`) with the trajectory samples.
    pub fn new(traj: &Trajectory, hist: &HistorySegment, law: &DelayLaw) -> Self {
        let mut times = Vec::new();
        let mut coeffs = Vec::new();
        for (t, v) in hist.theta().iter().zip(hist.values()) {
            if *t < 0.0 {
                times.push(*t);
                coeffs.push(v.coeffs().to_vec());
            }
        }
        for (t, v) in traj.samples() {
            times.push(t);
            coeffs.push(v.coeffs().to_vec());
        }
        Self { law: *law, times, coeffs }
    }

    /// `f` at the delayed time `ϱ` (mode coefficients).
    pub fn f_at(&self, rho: f64) -> Vec<f64> {
        let n = self.coeffs[0].len();
        let mut out = alloc::vec![0.0; n];
        let MemoryKernel::Exponential { scale, rate } = self.law.kernel else {
            return out;
        };
        let axpy = |out: &mut Vec<f64>, a: f64, x: &[f64]| {
            for (o, v) in out.iter_mut().zip(x) {
                *o += a * v;
            }
        };
        let t0 = self.times[0];
        if rho <= t0 {
            axpy(&mut out, scale / rate, &self.coeffs[0]);
            return out;
        }
        axpy(&mut out, scale * (rate * (t0 - rho)).exp() / rate, &self.coeffs[0]);
        for k in 1..self.times.len() {
            let (a, b) = (self.times[k - 1], self.times[k]);
            if a >= rho {
                break;
            }
            if b <= rho {
                let (w0, w1) = exp_linear_weights(rate, a - rho, b - rho);
                axpy(&mut out, scale * w0, &self.coeffs[k - 1]);
                axpy(&mut out, scale * w1, &self.coeffs[k]);
            } else {
                // partial interval ending at ϱ, value there interpolated
                let w = (rho - a) / (b - a);
                let (w0, w1) = exp_linear_weights(rate, a - rho, 0.0);
                axpy(&mut out, scale * (w0 + w1 * (1.0 - w)), &self.coeffs[k - 1]);
                axpy(&mut out, scale * w1 * w, &self.coeffs[k]);
                break;
            }
        }
        out
    }

    /// `f(t, x_{ϱ(t, x_t)})` given the current state `x(t)`.
    pub fn forcing(&self, t: f64, state: &SpectralField, sp: &LebesgueSpace) -> Vec<f64> {
        self.f_at(t - self.law.beta.eval(lp_norm(state, sp)))
    }
}
