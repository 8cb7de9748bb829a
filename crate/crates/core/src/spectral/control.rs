use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{SpatialGrid, SpectralField};
use crate::math::Real;
use crate::{Error, Result};

/// Built-in symmetric kernels `K(ζ, ξ)` for the integral control operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlKernel {
    /// `K ≡ 0`.
    Zero,
    /// `K(ζ, ξ) = e^{r(ζ+ξ)}`; rank one, so `B` is far from injective.
    Exponential {
        /// The rate `r`.
        rate: f64,
    },
}

impl ControlKernel {
    /// Evaluates the kernel.
    pub fn eval(&self, zeta: f64, xi: f64) -> f64 {
        match *self {
            ControlKernel::Zero => 0.0,
            ControlKernel::Exponential { rate } => (rate * (zeta + xi)).exp(),
        }
    }
}

/// Which control operator is in use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlKind {
    /// `B = I` on the mode space.
    Identity,
    /// `(Bu)(ξ) = ∫₀^π K(ζ, ξ) u(ζ) dζ` for a registry kernel.
    Kernel(ControlKernel),
    /// A kernel supplied as samples (tests and experiments).
    Sampled,
}

/// The control operator `B: U → X` (with `U = X`), its mode matrix and norm.
///
/// Kernels must be symmetric, so `B* = B`. The mode matrix is
/// `Bm_{nm} = ⟨w_n, B w_m⟩` with both integrals done by the grid's trapezoid
/// rule, which makes [`apply`](Self::apply) and `Bm` agree exactly on
/// band-limited inputs.
#[derive(Debug, Clone)]
pub struct ControlOperatorSpec {
    kind: ControlKind,
    grid: Arc<SpatialGrid>,
    // kernel[i * n + j] = K(ξ_i, ξ_j)
    kernel: Option<Vec<f64>>,
    mode_matrix: DMatrix<f64>,
    mtilde: f64,
}

impl ControlOperatorSpec {
    /// `B = I`.
    pub fn identity(grid: &Arc<SpatialGrid>) -> Self {
        Self {
            kind: ControlKind::Identity,
            grid: grid.clone(),
            kernel: None,
            mode_matrix: DMatrix::identity(grid.modes(), grid.modes()),
            mtilde: 1.0,
        }
    }

    /// Integral operator with a registry kernel.
    ///
    /// # Errors
    ///
    /// [`Error::Validation`] for non-finite kernel parameters.
    pub fn kernel(grid: &Arc<SpatialGrid>, k: ControlKernel) -> Result<Self> {
        if let ControlKernel::Exponential { rate } = k {
            if !rate.is_finite() {
                return Err(Error::invalid("control.rate", "must be finite"));
            }
        }
        let mut spec = Self::from_kernel_fn(grid, |z, x| k.eval(z, x))?;
        spec.kind = ControlKind::Kernel(k);
        Ok(spec)
    }

    /// Integral operator with an arbitrary kernel sampled on the grid.
    ///
    /// # Errors
    ///
    /// [`Error::Validation`] if the samples are non-finite or asymmetric
    /// beyond `1e-12` (relative to the largest sample).
    pub fn from_kernel_fn(grid: &Arc<SpatialGrid>, k: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let x = grid.nodes();
        let m = x.len();
        let mut kernel = Vec::with_capacity(m * m);
        for &xi in x {
            for &zj in x {
                kernel.push(k(xi, zj));
            }
        }
        let scale = kernel.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if !scale.is_finite() {
            return Err(Error::invalid("control.kernel", "non-finite kernel samples"));
        }
        for i in 0..m {
            for j in 0..i {
                if (kernel[i * m + j] - kernel[j * m + i]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::invalid(
                        "control.kernel",
                        alloc::format!("kernel not symmetric at ({}, {})", x[i], x[j]),
                    ));
                }
            }
        }
        let w = grid.weights();
        let n = grid.modes();
        // P_{ni} = wt_i w_n(ξ_i)
        let p = DMatrix::from_fn(n, m, |r, i| w[i] * grid.basis(r + 1)[i]);
        let kmat = DMatrix::from_row_slice(m, m, &kernel);
        let mode_matrix = &p * &kmat * p.transpose();
        // ‖B‖ on L²: spectral radius of D^{1/2} K D^{1/2}
        let sym = DMatrix::from_fn(m, m, |i, j| w[i].sqrt() * kmat[(i, j)] * w[j].sqrt());
        let eig = SymmetricEigen::new(sym);
        let mtilde = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        Ok(Self { kind: ControlKind::Sampled, grid: grid.clone(), kernel: Some(kernel), mode_matrix, mtilde })
    }

    /// Which operator this is.
    pub fn kind(&self) -> ControlKind {
        self.kind
    }

    /// `true` for `B = I`.
    pub fn is_identity(&self) -> bool {
        self.kind == ControlKind::Identity
    }

    /// `M̃ = ‖B‖`.
    pub fn mtilde(&self) -> f64 {
        self.mtilde
    }

    /// `Bm_{nm} = ⟨w_n, B w_m⟩`.
    pub fn mode_matrix(&self) -> &DMatrix<f64> {
        &self.mode_matrix
    }

    /// `BB*` in mode coordinates.
    pub fn bb_star(&self) -> DMatrix<f64> {
        &self.mode_matrix * self.mode_matrix.transpose()
    }

    /// `Bu`: the identity, or the kernel integral re-projected onto the modes.
    pub fn apply(&self, u: &SpectralField) -> SpectralField {
        let Some(kernel) = &self.kernel else {
            return u.clone();
        };
        let m = self.grid.n_points();
        let w = self.grid.weights();
        let uv = u.values();
        let out: Vec<f64> = (0..m).map(|i| (0..m).map(|j| kernel[i * m + j] * w[j] * uv[j]).sum()).collect();
        SpectralField::from_coeffs(&self.grid, self.grid.project(&out)).expect("grid lengths agree")
    }

    /// `B*u`; kernels are symmetric so this equals [`apply`](Self::apply).
    pub fn apply_adjoint(&self, u: &SpectralField) -> SpectralField {
        self.apply(u)
    }

    /// `Bm·c` for a coefficient vector.
    pub fn apply_coeffs(&self, c: &[f64]) -> Vec<f64> {
        if self.is_identity() {
            return c.to_vec();
        }
        (0..c.len()).map(|r| (0..c.len()).map(|k| self.mode_matrix[(r, k)] * c[k]).sum()).collect()
    }

    /// `Bmᵀ·c`.
    pub fn apply_adjoint_coeffs(&self, c: &[f64]) -> Vec<f64> {
        if self.is_identity() {
            return c.to_vec();
        }
        (0..c.len()).map(|r| (0..c.len()).map(|k| self.mode_matrix[(k, r)] * c[k]).sum()).collect()
    }
}

/// `apply_B` in free-function form.
pub fn apply_b(u: &SpectralField, spec: &ControlOperatorSpec) -> SpectralField {
    spec.apply(u)
}

/// `apply_B_adjoint` in free-function form.
pub fn apply_b_adjoint(u: &SpectralField, spec: &ControlOperatorSpec) -> SpectralField {
    spec.apply_adjoint(u)
}
