//! Numerics for approximate controllability of fractional wave equations of
//! order `1 < α ≤ 2` on `[0, π]` with Dirichlet walls, non-instantaneous
//! impulses and a state-dependent delay.
//!
//! The crate is `no_std` (it needs `alloc`) so it can be embedded anywhere;
//! file formats, configuration parsing and the command-line driver live in the
//! companion `fracctl` crate.
//!
//! Layering, bottom to top:
//!
//! * [`specfun`] — gamma, Mittag-Leffler and Mainardi–Wright functions plus
//!   Gauss–Legendre quadrature.
//! * [`spectral`] — the sine eigenbasis on a uniform grid, the classical and
//!   fractional cosine/sine families and the control operator `B`.
//! * [`banach`] — `L^p` norms, the duality mapping and the weighted history
//!   phase space.
//! * [`gramian`] — controllability Gramians and the regularized resolvent
//!   equation `λz + Φ𝒥[z] = λh`.
//! * [`evolution`] — mild solutions, feedback and impulsive controls, the
//!   Picard solver and the a-priori bounds.
//! * [`scenario`] / [`experiments`] — problem descriptions and λ-sweeps.

#![no_std]
#![forbid(unsafe_code)]
#![warn(missing_docs)]
// `math::Real` supplies float methods on toolchains whose `core` lacks them;
// newer ones shadow it with inherent methods.
#![allow(unused_imports)]

extern crate alloc;

pub mod banach;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod gramian;
pub mod math;
pub mod scenario;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
