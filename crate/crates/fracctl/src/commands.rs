//! The experiments behind each subcommand, returning CSV tables.

use fracctl_core::evolution::terminal_identity_check;
use fracctl_core::experiments::{impulsive_row, linear_row, report_from_rows, RunReport};
use fracctl_core::gramian::assemble_gramian;
use fracctl_core::scenario::Scenario;
use fracctl_core::specfun::{
    gamma_fn, mainardi_wright, mittag_leffler, subordination_oracle, wright_moment, MLParams, QuadratureSpec,
    SubordinationKind,
};
use fracctl_core::spectral::{c_factor, s_factor};
use rayon::prelude::*;
use toml::{Table, Value};

use crate::report::{num, report_table, CsvTable};

/// One experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Special functions against closed forms and quadrature oracles.
    CheckSpecfun,
    /// Diagonal of the Gramian on `[0, T]`.
    Gramian,
    /// Linear feedback regulator over the λ grid.
    LinearSweep,
    /// Picard solve of the full problem over the λ grid.
    ImpulsiveSweep,
    /// The contraction condition over the λ grid.
    Cnd,
    /// Simulated terminal miss against the resolvent prediction.
    TerminalIdentity,
}

impl Command {
    /// Every command, in CLI order.
    pub const ALL: [Command; 6] = [
        Command::CheckSpecfun,
        Command::Gramian,
        Command::LinearSweep,
        Command::ImpulsiveSweep,
        Command::Cnd,
        Command::TerminalIdentity,
    ];

    /// The subcommand name, also the default output file stem.
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckSpecfun => "check-specfun",
            Command::Gramian => "gramian",
            Command::LinearSweep => "linear-sweep",
            Command::ImpulsiveSweep => "impulsive-sweep",
            Command::Cnd => "cnd",
            Command::TerminalIdentity => "terminal-identity",
        }
    }

    /// Runs the experiment. Metadata for the sidecar goes into `meta`.
    ///
    /// # Errors
    ///
    /// Propagated numerical errors; sweep rows that fail are recorded instead.
    pub fn run(self, s: &Scenario, meta: &mut Table) -> anyhow::Result<CsvTable> {
        match self {
            Command::CheckSpecfun => check_specfun(s),
            Command::Gramian => gramian(s),
            Command::LinearSweep => {
                let rep = linear_sweep(s)?;
                describe_report(s, &rep, meta);
                Ok(report_table(&rep))
            }
            Command::ImpulsiveSweep => {
                let rep = impulsive_sweep(s);
                describe_report(s, &rep, meta);
                Ok(report_table(&rep))
            }
            Command::Cnd => cnd(s),
            Command::TerminalIdentity => terminal_identity(s),
        }
    }
}

/// [`fracctl_core::experiments::run_linear_sweep`] with rows computed in parallel.
///
/// # Errors
///
/// The first failing row's error.
pub fn linear_sweep(s: &Scenario) -> fracctl_core::Result<RunReport> {
    let rows = s.lambdas().par_iter().map(|&l| linear_row(s, l)).collect::<fracctl_core::Result<Vec<_>>>()?;
    Ok(report_from_rows(s, rows))
}

/// [`fracctl_core::experiments::run_impulsive_sweep`] with rows computed in parallel.
pub fn impulsive_sweep(s: &Scenario) -> RunReport {
    report_from_rows(s, s.lambdas().par_iter().map(|&l| impulsive_row(s, l)).collect())
}

fn describe_report(s: &Scenario, rep: &RunReport, meta: &mut Table) {
    let p = &rep.provenance;
    meta.insert("picard_tol".into(), Value::Float(p.picard_tol));
    meta.insert("panels_per_unit".into(), Value::Float(p.panels_per_unit));
    meta.insert("steps_per_unit".into(), Value::Float(p.steps_per_unit));
    // the condition is hardest to meet at the smallest λ
    if let Some(&l) = s.lambdas().last() {
        meta.insert("cnd_lambda".into(), Value::Float(l));
        meta.insert("cnd_lhs".into(), Value::Float(s.cnd(l).unwrap_or(f64::NAN)));
    }
    let failures: Vec<Value> = rep
        .rows
        .iter()
        .filter_map(|r| r.failure.as_ref().map(|f| Value::String(format!("lambda {}: {f}", num(r.lambda)))))
        .collect();
    if !failures.is_empty() {
        meta.insert("failures".into(), Value::Array(failures));
    }
}

fn check_specfun(s: &Scenario) -> anyhow::Result<CsvTable> {
    let mut t = CsvTable::new(&["check", "gamma", "x", "value", "reference", "abs_error"]);
    let row = |t: &mut CsvTable, check: &str, gamma: f64, x: f64, v: f64, r: f64| {
        t.push(vec![check.into(), num(gamma), num(x), num(v), num(r), num((v - r).abs())]);
    };
    let cos = MLParams::new(2.0, 1.0)?;
    let sinc = MLParams::new(2.0, 2.0)?;
    for k in 1..=20 {
        let x = 0.5 * k as f64;
        row(&mut t, "ml_cos", 1.0, x, mittag_leffler(cos, -x * x)?, x.cos());
        row(&mut t, "ml_sinc", 1.0, x, mittag_leffler(sinc, -x * x)?, x.sin() / x);
    }
    let params = s.system().families().params();
    let gamma = params.gamma;
    if gamma < 1.0 {
        let q = QuadratureSpec::default();
        for c in [0.0, 1.0, 2.0] {
            let v = q.integrate_truncated(|th| th.powf(c) * mainardi_wright(gamma, th).unwrap_or(f64::NAN))?;
            row(&mut t, "wright_moment", gamma, c, v, wright_moment(gamma, c)?);
        }
        for n in 1..=s.system().modes().min(8) {
            for time in [0.1f64, 0.5, 1.0] {
                let z = n as f64 * time.powf(gamma);
                let c = subordination_oracle(gamma, SubordinationKind::Cosine, z, &q)?;
                row(&mut t, "cosine_factor", gamma, z, c_factor(params, n, time), c);
                let sw = subordination_oracle(gamma, SubordinationKind::SineWeighted, z, &q)? / n as f64;
                row(&mut t, "sine_factor", gamma, z, s_factor(params, n, time), sw);
            }
        }
    }
    row(&mut t, "gamma", 1.0, 0.5, gamma_fn(0.5)?, std::f64::consts::PI.sqrt());
    Ok(t)
}

fn gramian(s: &Scenario) -> anyhow::Result<CsvTable> {
    let sys = s.system();
    let g = assemble_gramian(0.0, sys.horizon(), sys.control(), sys.families(), sys.quadrature(), sys.grid())?;
    let mut t = CsvTable::new(&["mode", "Phi_n"]);
    for (n, d) in g.diagonal().iter().enumerate() {
        t.push(vec![(n + 1).to_string(), num(*d)]);
    }
    Ok(t)
}

fn cnd(s: &Scenario) -> anyhow::Result<CsvTable> {
    let mut t = CsvTable::new(&["lambda", "cnd_lhs", "r", "forcing_factor"]);
    for &l in s.lambdas() {
        let c = s.cnd_inputs(l);
        t.push(vec![num(l), num(s.cnd(l)?), num(c.r()), num(c.forcing_factor())]);
    }
    Ok(t)
}

fn terminal_identity(s: &Scenario) -> anyhow::Result<CsvTable> {
    let sys = s.system();
    let target = s.problem().targets().last().expect("terminal target");
    let g = &s.problem().gramians()[0];
    let rows = s
        .lambdas()
        .par_iter()
        .map(|&l| terminal_identity_check(sys, target, l, g).map(|r| (l, r)))
        .collect::<fracctl_core::Result<Vec<_>>>()?;
    let mut t = CsvTable::new(&["lambda", "gap", "prediction_norm", "relative_gap"]);
    for (l, r) in rows {
        let pn = fracctl_core::banach::lp_norm(&r.rhs, sys.space());
        t.push(vec![num(l), num(r.gap), num(pn), num(if pn > 0.0 { r.gap / pn } else { r.gap })]);
    }
    Ok(t)
}
