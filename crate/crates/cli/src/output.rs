use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// 17 significant digits, `.` separator, independent of locale.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders a CSV with LF line endings.
pub fn render_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_value(v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// `<out>.report.json`
pub fn report_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".report.json");
    PathBuf::from(s)
}
