use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: ToolInfo = ToolInfo {
    name: "idi-phase",
    version: env!("CARGO_PKG_VERSION"),
};

/// Seventeen significant digits, enough to round-trip an `f64`.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn ensure_parent(path: &Path) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        }
    }
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// CSV with `# `-prefixed provenance lines ahead of the header.
pub fn write_csv<C: Serialize>(
    path: &Path,
    config: &C,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), CliError> {
    ensure_parent(path)?;
    let mut file =
        fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    writeln!(file, "# tool {} {}", TOOL.name, TOOL.version)?;
    writeln!(file, "# config {}", serde_json::to_string(config)?)?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}
