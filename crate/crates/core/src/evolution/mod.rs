//! Mild solutions, controls, the Picard solver and the a-priori diagnostics.

mod bounds;
mod control;
mod delay;
mod feedback;
mod picard;
mod schedule;
mod system;
mod trajectory;

pub use bounds::{bounds_nj_cj, cnd_check, discrete_gronwall_bound, BoundsInputs, CndInputs};
pub use control::{ControlPiece, ControlSignal, Perturbation};
pub use delay::{delay_functional_f, delay_rho, DelayBeta, DelayContext, DelayLaw, MemoryKernel};
pub use feedback::{
    cost_functional, linear_feedback_control, steering_defect, terminal_identity_check, TerminalIdentity,
};
pub use picard::{impulsive_control, picard_solve, ControlProblem, PicardOptions, PicardOutcome};
pub use schedule::{impulse_h, impulse_h_prime, ImpulseKernel, ImpulseSchedule};
pub use system::{evaluate_mild, Forcing, PieceLayout, System, TimeGrid};
pub(crate) use trajectory::interpolate;
pub use trajectory::{PieceKind, Trajectory, TrajectoryPiece};
