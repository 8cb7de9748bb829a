//! CSV output with a fixed, byte-deterministic number format.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use fracctl_core::experiments::RunReport;
use sha2::{Digest, Sha256};

/// Columns of every sweep report, in order.
pub const SWEEP_COLUMNS: [&str; 6] =
    ["lambda", "terminal_error", "cost", "picard_iters", "resolvent_residual", "cnd_lhs"];

/// A header plus rows of already formatted cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvTable {
    /// Column names.
    pub header: Vec<String>,
    /// One entry per data row.
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    /// An empty table with the given columns.
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    /// Appends a row; panics if its width differs from the header's.
    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    /// The file contents: header line, then one line per row, `\n` endings.
    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    /// Writes [`render`](Self::render) to `path`, creating parent directories.
    ///
    /// # Errors
    ///
    /// I/O failures, unchanged.
    pub fn write(&self, path: &Path) -> io::Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.render())
    }
}

/// 17 significant digits in scientific notation; `NaN`/`inf` spelled out.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// The sweep report as a table with [`SWEEP_COLUMNS`].
pub fn report_table(report: &RunReport) -> CsvTable {
    let mut t = CsvTable::new(&SWEEP_COLUMNS);
    for r in &report.rows {
        t.push(vec![
            num(r.lambda),
            num(r.terminal_error),
            num(r.cost),
            r.picard_iters.to_string(),
            num(r.resolvent_residual),
            num(r.cnd_lhs),
        ]);
    }
    t
}

/// Writes a sweep report as CSV.
///
/// # Errors
///
/// I/O failures, unchanged.
pub fn emit_csv(report: &RunReport, path: &Path) -> io::Result<()> {
    report_table(report).write(path)
}

/// Lower-case hex SHA-256 of `bytes`.
pub fn config_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// `dir/name.csv` → `dir/name.meta.toml`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    csv.with_file_name(format!("{stem}.meta.toml"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
        assert_eq!(num(f64::NAN), "NaN");
        assert_eq!("1.0000000000000001e-1".parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn header_only_and_single_row() {
        let mut t = CsvTable::new(&SWEEP_COLUMNS);
        assert_eq!(t.render().lines().count(), 1);
        t.push(vec!["1".into(); 6]);
        assert_eq!(t.render(), "lambda,terminal_error,cost,picard_iters,resolvent_residual,cnd_lhs\n1,1,1,1,1,1\n");
    }

    #[test]
    fn known_digest() {
        assert_eq!(config_hash(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("out/run.csv")), Path::new("out/run.meta.toml"));
    }
}
