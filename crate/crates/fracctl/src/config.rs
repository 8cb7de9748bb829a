//! Scenario files: TOML with a fixed set of dotted keys.
//!
//! Every key is optional; absent keys take the defaults of
//! [`ScenarioConfig::default`]. Unknown keys and type mismatches are
//! collected and reported together, each naming the dotted key.

use std::fmt;
use std::path::Path;

use fracctl_core::evolution::{DelayBeta, ImpulseKernel, MemoryKernel};
use fracctl_core::scenario::{ControlChoice, Scenario, ScenarioConfig};
use fracctl_core::spectral::ControlKernel;
use toml::{Table, Value};

/// One problem with one key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    /// Dotted key, e.g. `schedule.breakpoints`.
    pub key: String,
    /// What is wrong with it.
    pub reason: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`: {}", self.key, self.reason)
    }
}

/// Why a scenario file could not be turned into a [`Scenario`].
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    /// The file could not be read.
    #[error("cannot read {path}: {source}")]
    Io {
        /// The path given.
        path: String,
        /// The underlying error.
        source: std::io::Error,
    },
    /// Not valid TOML.
    #[error("syntax error: {0}")]
    Syntax(#[from] toml::de::Error),
    /// Unknown keys or wrongly typed values.
    #[error("invalid configuration:\n{}", .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Fields(Vec<FieldError>),
    /// Values that parse but violate an invariant.
    #[error(transparent)]
    Scenario(#[from] fracctl_core::Error),
}

impl ConfigError {
    /// The dotted keys blamed by this error, if any.
    pub fn keys(&self) -> Vec<String> {
        match self {
            ConfigError::Fields(v) => v.iter().map(|e| e.key.clone()).collect(),
            ConfigError::Scenario(fracctl_core::Error::Validation { field, .. }) => vec![field.clone()],
            _ => Vec::new(),
        }
    }
}

// Walks one table, remembering which keys were consumed.
struct Section<'a> {
    prefix: String,
    table: Option<&'a Table>,
    seen: Vec<&'static str>,
}

struct Reader {
    errors: Vec<FieldError>,
}

impl Reader {
    fn fail(&mut self, key: String, reason: impl Into<String>) {
        self.errors.push(FieldError { key, reason: reason.into() });
    }

    fn section<'a>(&mut self, parent: &'a Table, prefix: &str, name: &'static str) -> Section<'a> {
        let key = join(prefix, name);
        let table = match parent.get(name) {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(_) => {
                self.fail(key.clone(), "expected a table");
                None
            }
        };
        Section { prefix: key, table, seen: Vec::new() }
    }

    fn finish(&mut self, s: Section<'_>) {
        if let Some(t) = s.table {
            for k in t.keys() {
                if !s.seen.contains(&k.as_str()) {
                    self.fail(join(&s.prefix, k), "unknown key");
                }
            }
        }
    }

    fn get<'a>(&mut self, s: &mut Section<'a>, name: &'static str) -> Option<&'a Value> {
        s.seen.push(name);
        s.table.and_then(|t| t.get(name))
    }

    fn float(&mut self, s: &mut Section<'_>, name: &'static str, slot: &mut f64) {
        match self.get(s, name) {
            None => {}
            Some(Value::Float(v)) => *slot = *v,
            Some(Value::Integer(v)) => *slot = *v as f64,
            Some(_) => self.fail(join(&s.prefix, name), "expected a number"),
        }
    }

    fn uint(&mut self, s: &mut Section<'_>, name: &'static str, slot: &mut usize) {
        match self.get(s, name) {
            None => {}
            Some(Value::Integer(v)) if *v >= 0 => *slot = *v as usize,
            Some(_) => self.fail(join(&s.prefix, name), "expected a non-negative integer"),
        }
    }

    fn floats(&mut self, s: &mut Section<'_>, name: &'static str, slot: &mut Vec<f64>) {
        let key = join(&s.prefix, name);
        match self.get(s, name) {
            None => {}
            Some(v) => match as_floats(v) {
                Some(xs) => *slot = xs,
                None => self.fail(key, "expected an array of numbers"),
            },
        }
    }

    fn string<'a>(&mut self, s: &mut Section<'a>, name: &'static str) -> Option<&'a str> {
        match self.get(s, name) {
            None => None,
            Some(Value::String(v)) => Some(v.as_str()),
            Some(_) => {
                self.fail(join(&s.prefix, name), "expected a string");
                None
            }
        }
    }
}

fn join(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

fn as_floats(v: &Value) -> Option<Vec<f64>> {
    v.as_array()?
        .iter()
        .map(|x| match x {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            _ => None,
        })
        .collect()
}

/// Parses scenario text into plain parameters.
///
/// # Errors
///
/// [`ConfigError::Syntax`] or [`ConfigError::Fields`].
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let root: Table = text.parse()?;
    let mut cfg = ScenarioConfig::default();
    let mut r = Reader { errors: Vec::new() };
    let mut top = Section { prefix: String::new(), table: Some(&root), seen: Vec::new() };

    match r.get(&mut top, "seed") {
        None => {}
        Some(Value::Integer(v)) if *v >= 0 => cfg.seed = *v as u64,
        Some(_) => r.fail("seed".into(), "expected a non-negative integer"),
    }

    let mut s = r.section(&root, "", "fractional");
    r.float(&mut s, "alpha", &mut cfg.alpha);
    r.finish(s);
    top.seen.push("fractional");

    let mut s = r.section(&root, "", "grid");
    r.uint(&mut s, "modes", &mut cfg.modes);
    let mut points = usize::MAX;
    r.uint(&mut s, "points", &mut points);
    cfg.points = (points != usize::MAX).then_some(points);
    r.finish(s);
    top.seen.push("grid");

    let mut s = r.section(&root, "", "space");
    r.float(&mut s, "p", &mut cfg.p);
    r.finish(s);
    top.seen.push("space");

    let mut s = r.section(&root, "", "time");
    r.float(&mut s, "horizon", &mut cfg.horizon);
    r.finish(s);
    top.seen.push("time");

    let mut s = r.section(&root, "", "control");
    let mut rate = 1.0;
    r.float(&mut s, "rate", &mut rate);
    match r.string(&mut s, "kind") {
        None | Some("identity") => {}
        Some("zero") => cfg.control = ControlChoice::Kernel(ControlKernel::Zero),
        Some("exponential") => cfg.control = ControlChoice::Kernel(ControlKernel::Exponential { rate }),
        Some(other) => r.fail("control.kind".into(), format!("unknown kind `{other}` (identity, zero, exponential)")),
    }
    r.finish(s);
    top.seen.push("control");

    let mut s = r.section(&root, "", "schedule");
    r.floats(&mut s, "breakpoints", &mut cfg.breakpoints);
    s.seen.push("impulse");
    if let Some(t) = s.table {
        let mut imp = r.section(t, "schedule", "impulse");
        let (mut amplitude, mut rate, mut z_frequency, mut wavenumber) = (0.1, 0.5, 1.0, 1usize);
        r.float(&mut imp, "amplitude", &mut amplitude);
        r.float(&mut imp, "rate", &mut rate);
        r.float(&mut imp, "z_frequency", &mut z_frequency);
        r.uint(&mut imp, "wavenumber", &mut wavenumber);
        match r.string(&mut imp, "kind") {
            None | Some("zero") => {}
            Some("trig") => cfg.impulse = ImpulseKernel::Trig { amplitude, rate, wavenumber, z_frequency },
            Some(other) => r.fail("schedule.impulse.kind".into(), format!("unknown kind `{other}` (zero, trig)")),
        }
        r.finish(imp);
    }
    r.finish(s);
    top.seen.push("schedule");

    let mut s = r.section(&root, "", "delay");
    r.float(&mut s, "a", &mut cfg.weight_rate);
    r.float(&mut s, "tail_tol", &mut cfg.tail_tol);
    s.seen.extend(["kernel", "beta"]);
    if let Some(t) = s.table {
        let mut k = r.section(t, "delay", "kernel");
        let (mut scale, mut rate) = (0.0, 1.0);
        r.float(&mut k, "scale", &mut scale);
        r.float(&mut k, "rate", &mut rate);
        match r.string(&mut k, "kind") {
            None | Some("none") => {}
            Some("exponential") => cfg.memory = MemoryKernel::Exponential { scale, rate },
            Some(other) => r.fail("delay.kernel.kind".into(), format!("unknown kind `{other}` (none, exponential)")),
        }
        r.finish(k);

        let mut b = r.section(t, "delay", "beta");
        let (mut value, mut scale) = (0.0, 0.0);
        r.float(&mut b, "value", &mut value);
        r.float(&mut b, "scale", &mut scale);
        match r.string(&mut b, "kind") {
            None | Some("zero") => {}
            Some("constant") => cfg.beta = DelayBeta::Constant(value),
            Some("rational") => cfg.beta = DelayBeta::Rational { scale },
            Some(other) => {
                r.fail("delay.beta.kind".into(), format!("unknown kind `{other}` (zero, constant, rational)"))
            }
        }
        r.finish(b);
    }
    r.finish(s);
    top.seen.push("delay");

    let mut s = r.section(&root, "", "initial");
    r.floats(&mut s, "psi_modes", &mut cfg.psi_modes);
    r.float(&mut s, "mu", &mut cfg.psi_rate);
    r.floats(&mut s, "eta_modes", &mut cfg.eta_modes);
    r.finish(s);
    top.seen.push("initial");

    let mut s = r.section(&root, "", "targets");
    r.floats(&mut s, "terminal", &mut cfg.target_modes);
    match r.get(&mut s, "intermediate") {
        None => {}
        Some(v) => match v.as_array().and_then(|a| a.iter().map(as_floats).collect::<Option<Vec<_>>>()) {
            Some(t) => cfg.intermediate_targets = t,
            None => r.fail("targets.intermediate".into(), "expected an array of number arrays"),
        },
    }
    r.finish(s);
    top.seen.push("targets");

    let mut s = r.section(&root, "", "lambda");
    r.floats(&mut s, "grid", &mut cfg.lambdas);
    r.finish(s);
    top.seen.push("lambda");

    let mut s = r.section(&root, "", "numerics");
    r.float(&mut s, "panels_per_unit", &mut cfg.panels_per_unit);
    r.uint(&mut s, "gauss_order", &mut cfg.gauss_order);
    r.float(&mut s, "steps_per_unit", &mut cfg.steps_per_unit);
    r.uint(&mut s, "impulse_samples", &mut cfg.impulse_samples);
    r.uint(&mut s, "history_nodes", &mut cfg.history_nodes);
    r.float(&mut s, "picard_tol", &mut cfg.picard_tol);
    r.uint(&mut s, "picard_max_iter", &mut cfg.picard_max_iter);
    r.finish(s);
    top.seen.push("numerics");

    r.finish(top);
    if r.errors.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Fields(r.errors))
    }
}

/// Parses and validates scenario text.
///
/// # Errors
///
/// As [`parse_config`], plus [`ConfigError::Scenario`] for invariant
/// violations.
pub fn scenario_from_str(text: &str) -> Result<Scenario, ConfigError> {
    Ok(Scenario::build(&parse_config(text)?)?)
}

/// Reads, parses and validates a scenario file.
///
/// # Errors
///
/// As [`scenario_from_str`], plus [`ConfigError::Io`].
pub fn parse_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    scenario_from_str(&read_config(path)?)
}

/// Reads a scenario file to a string.
///
/// # Errors
///
/// [`ConfigError::Io`].
pub fn read_config(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })
}
