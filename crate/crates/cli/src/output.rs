use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use srpol::document::Problem;

use crate::error::CliError;

pub const PLOT_SCRIPT: &str = include_str!("plot.py");
pub const PLOT_SCRIPT_NAME: &str = "plot.py";

/// 15 significant digits, exponent form.
pub fn num(x: f64) -> String {
    format!("{x:.14e}")
}

/// One-line `#` comment with the fully resolved inputs.
pub fn provenance(command: &str, problem: &Problem) -> String {
    let record = json!({
        "tool": concat!("srpol ", env!("CARGO_PKG_VERSION")),
        "command": command,
        "document": problem.document,
        "canonical_params": problem.params,
        "canonical_medium": problem.medium,
    });
    format!("# {record}")
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Computation(format!("writing {}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("output directory {}: {e}", dir.display())))
}

/// Write a CSV whose first line is `header_comment`.
pub fn write_csv(
    path: &Path,
    header_comment: &str,
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<PathBuf, CliError> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{header_comment}").map_err(|e| io_error(path, e))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns).map_err(|e| io_error(path, e))?;
    for row in rows {
        w.write_record(row).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))?;
    Ok(path.to_path_buf())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_error(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_error(path, e))?;
    Ok(path.to_path_buf())
}

pub fn write_plot_script(dir: &Path) -> Result<PathBuf, CliError> {
    let path = dir.join(PLOT_SCRIPT_NAME);
    fs::write(&path, PLOT_SCRIPT).map_err(|e| io_error(&path, e))?;
    Ok(path)
}
