//! The controllability Gramian and the regularized resolvent `R(λ, Φ)`.

mod operator;
mod quadrature;
mod resolvent;

pub use operator::{assemble_gramian, gramian_quadratic_form, GramianOperator};
pub use quadrature::TimeQuadrature;
pub use resolvent::{h0_lambda_sweep, solve_resolvent_eq, solve_resolvent_eq_with, ResolventOptions, ResolventSolve};
