use alloc::vec::Vec;

use crate::banach::{lp_norm, LebesgueSpace};
use crate::math::Real;
use crate::spectral::SpectralField;
use crate::{Error, Result};

/// Registry of impulse kernels `ρ_j(t, ξ, z)` with their time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImpulseKernel {
    /// `ρ ≡ 0`.
    Zero,
    /// `ρ(t, ξ, z) = A(1 + r t) sin(kξ) cos(ℓz)`, so `∂ρ/∂t = A r sin(kξ) cos(ℓz)`.
    Trig {
        /// `A`.
        amplitude: f64,
        /// `r`.
        rate: f64,
        /// `k ≥ 1`, at most the mode count so `h_j` stays band-limited.
        wavenumber: usize,
        /// `ℓ`.
        z_frequency: f64,
    },
}

impl ImpulseKernel {
    /// `ρ(t, ξ, z)`.
    pub fn eval(&self, t: f64, xi: f64, z: f64) -> f64 {
        match *self {
            ImpulseKernel::Zero => 0.0,
            ImpulseKernel::Trig { amplitude, rate, wavenumber, z_frequency } => {
                amplitude * (1.0 + rate * t) * (wavenumber as f64 * xi).sin() * (z_frequency * z).cos()
            }
        }
    }

    /// `∂ρ/∂t (t, ξ, z)`.
    pub fn eval_dt(&self, _t: f64, xi: f64, z: f64) -> f64 {
        match *self {
            ImpulseKernel::Zero => 0.0,
            ImpulseKernel::Trig { amplitude, rate, wavenumber, z_frequency } => {
                amplitude * rate * (wavenumber as f64 * xi).sin() * (z_frequency * z).cos()
            }
        }
    }
}

/// The breakpoints `0 = s₀ < τ₁ < s₁ < τ₂ < … < τ_p < s_p < τ_{p+1} = T` and
/// one impulse kernel per impulse interval `(τ_j, s_j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseSchedule {
    tau: Vec<f64>,
    s: Vec<f64>,
    horizon: f64,
    kernels: Vec<ImpulseKernel>,
}

impl ImpulseSchedule {
    /// A schedule without impulses on `[0, T]`.
    ///
    /// # Errors
    ///
    /// [`Error::Validation`] for a non-positive horizon.
    pub fn empty(horizon: f64) -> Result<Self> {
        Self::new(Vec::new(), horizon, Vec::new(), usize::MAX)
    }

    /// `breakpoints = [τ₁, s₁, τ₂, s₂, …]`.
    ///
    /// # Errors
    ///
    /// [`Error::Validation`] naming `schedule.breakpoints` unless the chain is
    /// strictly increasing inside `(0, T)`, or `schedule.impulse` for a kernel
    /// count mismatch or a wavenumber outside `1..=modes`.
    pub fn new(breakpoints: Vec<f64>, horizon: f64, kernels: Vec<ImpulseKernel>, modes: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::invalid("time.horizon", "must be positive and finite"));
        }
        if !breakpoints.len().is_multiple_of(2) {
            return Err(Error::invalid("schedule.breakpoints", "expected pairs τ_j, s_j"));
        }
        let mut prev = 0.0;
        for &b in &breakpoints {
            if !(b > prev) {
                return Err(Error::invalid(
                    "schedule.breakpoints",
                    alloc::format!("need 0 < τ₁ < s₁ < … < s_p < T; {b} does not exceed {prev}"),
                ));
            }
            prev = b;
        }
        if !(prev < horizon) && !breakpoints.is_empty() {
            return Err(Error::invalid("schedule.breakpoints", alloc::format!("s_p = {prev} must be < T = {horizon}")));
        }
        let p = breakpoints.len() / 2;
        if kernels.len() != p {
            return Err(Error::invalid(
                "schedule.impulse",
                alloc::format!("{} kernels for {p} impulse intervals", kernels.len()),
            ));
        }
        for k in &kernels {
            if let ImpulseKernel::Trig { amplitude, rate, wavenumber, z_frequency } = *k {
                if wavenumber == 0 || wavenumber > modes {
                    return Err(Error::invalid(
                        "schedule.impulse",
                        alloc::format!("wavenumber {wavenumber} outside 1..={modes}"),
                    ));
                }
                if !(amplitude.is_finite() && rate.is_finite() && z_frequency.is_finite()) {
                    return Err(Error::invalid("schedule.impulse", "parameters must be finite"));
                }
            }
        }
        let tau = breakpoints.iter().step_by(2).copied().collect();
        let s = breakpoints.iter().skip(1).step_by(2).copied().collect();
        Ok(Self { tau, s, horizon, kernels })
    }

    /// Number of impulses `p`.
    pub fn count(&self) -> usize {
        self.tau.len()
    }

    /// Final time `T`.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `τ_j` for `1 ≤ j ≤ p + 1` (with `τ_{p+1} = T`).
    pub fn tau(&self, j: usize) -> f64 {
        assert!(j >= 1 && j <= self.count() + 1, "τ index {j} out of range");
        if j == self.count() + 1 {
            self.horizon
        } else {
            self.tau[j - 1]
        }
    }

    /// `s_j` for `0 ≤ j ≤ p` (with `s₀ = 0`).
    pub fn s(&self, j: usize) -> f64 {
        assert!(j <= self.count(), "s index {j} out of range");
        if j == 0 {
            0.0
        } else {
            self.s[j - 1]
        }
    }

    /// The controlled interval `[s_j, τ_{j+1}]`, `0 ≤ j ≤ p`.
    pub fn active_interval(&self, j: usize) -> (f64, f64) {
        (self.s(j), self.tau(j + 1))
    }

    /// The impulse interval `(τ_j, s_j]`, `1 ≤ j ≤ p`.
    pub fn impulse_interval(&self, j: usize) -> (f64, f64) {
        (self.tau(j), self.s(j))
    }

    /// Kernel of impulse `j ≥ 1`.
    pub fn kernel(&self, j: usize) -> &ImpulseKernel {
        &self.kernels[j - 1]
    }

    /// `κ_j ≥ sup ‖h_j(t, x)‖_p` over `t ∈ (τ_j, s_j]` and all `x`.
    pub fn kappa(&self, j: usize, sp: &LebesgueSpace) -> f64 {
        match *self.kernel(j) {
            ImpulseKernel::Zero => 0.0,
            ImpulseKernel::Trig { amplitude, rate, .. } => {
                let (a, b) = self.impulse_interval(j);
                let amp = (amplitude * (1.0 + rate * a)).abs().max((amplitude * (1.0 + rate * b)).abs());
                amp * self.shape_bound(j, sp)
            }
        }
    }

    /// `ϑ_j ≥ sup ‖h'_j(t, x)‖_p`.
    pub fn theta(&self, j: usize, sp: &LebesgueSpace) -> f64 {
        match *self.kernel(j) {
            ImpulseKernel::Zero => 0.0,
            ImpulseKernel::Trig { amplitude, rate, .. } => (amplitude * rate).abs() * self.shape_bound(j, sp),
        }
    }

    // ‖sin k·‖_p · ∫|cos ℓz| dz, both with the grid's quadrature
    fn shape_bound(&self, j: usize, sp: &LebesgueSpace) -> f64 {
        let ImpulseKernel::Trig { wavenumber, z_frequency, .. } = *self.kernel(j) else {
            return 0.0;
        };
        let g = sp.grid();
        let shape = SpectralField::mode(g, wavenumber).scale(core::f64::consts::FRAC_PI_2.sqrt());
        let mass: f64 = g.nodes().iter().zip(g.weights()).map(|(z, w)| w * (z_frequency * z).cos().abs()).sum();
        lp_norm(&shape, sp) * mass
    }
}

fn impulse_field(kernel: &ImpulseKernel, amp: f64, x_left: &SpectralField) -> SpectralField {
    let g = x_left.grid();
    let ImpulseKernel::Trig { wavenumber, z_frequency, .. } = *kernel else {
        return SpectralField::zero(g);
    };
    let integral: f64 = g
        .nodes()
        .iter()
        .zip(g.weights())
        .zip(x_left.values())
        .map(|((&z, w), &x)| {
            let c = (x * z).cos();
            w * (z_frequency * z).cos() * c * c
        })
        .sum();
    // sin(kξ) = √(π/2)·w_k(ξ)
    SpectralField::mode(g, wavenumber).scale(amp * integral * core::f64::consts::FRAC_PI_2.sqrt())
}

fn check_window(j: usize, t: f64, sched: &ImpulseSchedule) -> Result<()> {
    if j == 0 || j > sched.count() {
        return Err(Error::domain(alloc::format!("impulse index {j} outside 1..={}", sched.count())));
    }
    let (a, b) = sched.impulse_interval(j);
    if !(t > a && t <= b) {
        return Err(Error::domain(alloc::format!("t = {t} outside the impulse interval ({a}, {b}]")));
    }
    Ok(())
}

/// Right-continuous extension of `h_j` to the closed interval `[τ_j, s_j]`.
pub(crate) fn impulse_value(j: usize, t: f64, x_left: &SpectralField, sched: &ImpulseSchedule) -> SpectralField {
    let k = sched.kernel(j);
    let amp = match *k {
        ImpulseKernel::Zero => 0.0,
        ImpulseKernel::Trig { amplitude, rate, .. } => amplitude * (1.0 + rate * t),
    };
    impulse_field(k, amp, x_left)
}

pub(crate) fn impulse_derivative(j: usize, x_left: &SpectralField, sched: &ImpulseSchedule) -> SpectralField {
    let k = sched.kernel(j);
    let amp = match *k {
        ImpulseKernel::Zero => 0.0,
        ImpulseKernel::Trig { amplitude, rate, .. } => amplitude * rate,
    };
    impulse_field(k, amp, x_left)
}

/// `h_j(t, x)(ξ) = ∫₀^π ρ_j(t, ξ, z) cos²(x(τ_j⁻)(z)·z) dz`, by the grid's
/// trapezoid rule in `z`.
///
/// # Errors
///
/// [`Error::Domain`] for `t ∉ (τ_j, s_j]` or an invalid index.
pub fn impulse_h(j: usize, t: f64, x_left: &SpectralField, sched: &ImpulseSchedule) -> Result<SpectralField> {
    check_window(j, t, sched)?;
    Ok(impulse_value(j, t, x_left, sched))
}

/// `∂h_j/∂t`, the same quadrature applied to `∂ρ_j/∂t`.
///
/// # Errors
///
/// As [`impulse_h`].
pub fn impulse_h_prime(j: usize, t: f64, x_left: &SpectralField, sched: &ImpulseSchedule) -> Result<SpectralField> {
    check_window(j, t, sched)?;
    Ok(impulse_derivative(j, x_left, sched))
}
