//! Special functions and quadrature.
//!
//! Everything here is a pure function of its arguments. Accuracy targets:
//!
//! | function | range | relative error |
//! |---|---|---|
//! | [`gamma_fn`] | `x ∈ [0.1, 50]` | `1e-12` |
//! | [`mittag_leffler`] | `z ∈ [-1e4, 10]`, `α ∈ (0, 2]` | `1e-9` |
//! | [`mainardi_wright`] | `θ ≥ 0`, `γ ∈ (0, 1)` | `~1e-12` absolute |

mod gamma;
mod mittag_leffler;
mod quadrature;
mod wright;

pub use gamma::{gamma_fn, ln_gamma, rgamma};
pub use mittag_leffler::{mittag_leffler, MLParams, MlTable};
pub use quadrature::{adaptive_integrate, GaussLegendre, QuadratureScheme, QuadratureSpec};
pub use wright::{mainardi_wright, subordination_oracle, wright_moment, SubordinationKind};

pub(crate) use mittag_leffler::ml_value;
