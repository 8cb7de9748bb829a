//! λ-sweeps over a scenario.

use alloc::string::String;
use alloc::vec::Vec;

use crate::banach::lp_norm;
use crate::evolution::{cost_functional, linear_feedback_control, picard_solve, steering_defect};
use crate::math::Real;
use crate::scenario::Scenario;
use crate::{Error, Result};

/// One row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    /// `λ`.
    pub lambda: f64,
    /// `‖x(T) − ξ_p‖_p`.
    pub terminal_error: f64,
    /// The regulator cost of the run.
    pub cost: f64,
    /// Picard sweeps (1 for linear runs).
    pub picard_iters: usize,
    /// Largest resolvent residual among the interval solves.
    pub resolvent_residual: f64,
    /// Left-hand side of the contraction condition at this `λ`.
    pub cnd_lhs: f64,
    /// Per-mode prediction `(Σ (λ/(λ+Φ_n))² ℓ_n²)^{1/2}` when `p = 2` and `B = I`.
    pub predicted_error: Option<f64>,
    /// The error message if the row failed.
    pub failure: Option<String>,
}

/// Run metadata that makes a report reproducible.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    /// Hash of the configuration text (filled in by the caller).
    pub config_hash: String,
    /// Picard tolerance used.
    pub picard_tol: f64,
    /// Time-quadrature panels per unit.
    pub panels_per_unit: f64,
    /// Trajectory steps per unit time.
    pub steps_per_unit: f64,
}

/// Rows in `λ` order plus provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// One row per `λ`.
    pub rows: Vec<RunRow>,
    /// Reproducibility metadata.
    pub provenance: Provenance,
}

fn provenance(s: &Scenario) -> Provenance {
    let c = s.config();
    Provenance {
        config_hash: String::new(),
        picard_tol: c.picard_tol,
        panels_per_unit: c.panels_per_unit,
        steps_per_unit: c.steps_per_unit,
    }
}

fn failed_row(lambda: f64, cnd: f64, e: Error) -> RunRow {
    RunRow {
        lambda,
        terminal_error: f64::NAN,
        cost: f64::NAN,
        picard_iters: 0,
        resolvent_residual: f64::NAN,
        cnd_lhs: cnd,
        predicted_error: None,
        failure: Some(alloc::format!("{e}")),
    }
}

/// The linear regulator at one `λ`.
///
/// # Errors
///
/// [`Error::Validation`] unless the scenario has no impulses and no delayed
/// forcing; propagated solver errors.
pub fn linear_row(s: &Scenario, lambda: f64) -> Result<RunRow> {
    let sys = s.system();
    if sys.schedule().count() != 0 || !s.problem().delay().is_none() {
        return Err(Error::invalid("schedule.breakpoints", "the linear sweep needs no impulses and no delay"));
    }
    let target = &s.problem().targets()[0];
    let gram = &s.problem().gramians()[0];
    let (u, sol) = linear_feedback_control(sys, target, lambda, gram)?;
    let x_t = sys.evaluate_terminal(&u, None, None)?;
    let sp = sys.space();
    let predicted = (sp.is_hilbert() && sys.control().is_identity()).then(|| {
        let ell = steering_defect(sys, target);
        gram.diagonal()
            .iter()
            .zip(ell.coeffs())
            .map(|(phi, l)| {
                let r = lambda / (lambda + phi) * l;
                r * r
            })
            .sum::<f64>()
            .sqrt()
    });
    Ok(RunRow {
        lambda,
        terminal_error: lp_norm(&x_t.sub(&target.band_limited()), sp),
        cost: cost_functional(sys, &x_t, &u, target),
        picard_iters: 1,
        resolvent_residual: sol.residual,
        cnd_lhs: s.cnd(lambda)?,
        predicted_error: predicted,
        failure: None,
    })
}

/// The semilinear impulsive problem at one `λ`; failures are recorded in
/// the row instead of aborting.
pub fn impulsive_row(s: &Scenario, lambda: f64) -> RunRow {
    let cnd = s.cnd(lambda).unwrap_or(f64::NAN);
    let out = match picard_solve(s.problem(), lambda, &s.picard_options()) {
        Ok(o) => o,
        Err(e) => return failed_row(lambda, cnd, e),
    };
    let sys = s.system();
    let target = s.problem().targets().last().expect("at least ξ_0");
    let x_t = out.trajectory.terminal();
    RunRow {
        lambda,
        terminal_error: lp_norm(&x_t.sub(&target.band_limited()), sys.space()),
        cost: cost_functional(sys, x_t, &out.control, target),
        picard_iters: out.iterations,
        resolvent_residual: out.solves.iter().map(|r| r.residual).fold(0.0, f64::max),
        cnd_lhs: cnd,
        predicted_error: None,
        failure: None,
    }
}

/// Feedback control, simulation and cost for every `λ`.
///
/// # Errors
///
/// As [`linear_row`].
pub fn run_linear_sweep(s: &Scenario) -> Result<RunReport> {
    let rows = s.lambdas().iter().map(|&l| linear_row(s, l)).collect::<Result<Vec<_>>>()?;
    Ok(RunReport { rows, provenance: provenance(s) })
}

/// Picard solve for every `λ`.
pub fn run_impulsive_sweep(s: &Scenario) -> RunReport {
    RunReport { rows: s.lambdas().iter().map(|&l| impulsive_row(s, l)).collect(), provenance: provenance(s) }
}

/// Assembles a report from rows computed elsewhere (e.g. in parallel).
pub fn report_from_rows(s: &Scenario, rows: Vec<RunRow>) -> RunReport {
    RunReport { rows, provenance: provenance(s) }
}
