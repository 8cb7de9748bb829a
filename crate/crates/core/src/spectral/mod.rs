//! The sine eigenbasis of the Dirichlet Laplacian on `[0, π]`, states as
//! spectral fields, the solution families and the control operator `B`.

mod control;
mod families;
mod field;
mod grid;

pub use control::{apply_b, apply_b_adjoint, ControlKernel, ControlKind, ControlOperatorSpec};
pub use families::{
    c_factor, c_gamma, cosine_family, limit_5_4_ratio, s_factor, s_gamma, sine_family, t_factor, t_gamma, Families,
    FractionalParams,
};
pub use field::{sine_transform, SpectralField};
pub use grid::SpatialGrid;
