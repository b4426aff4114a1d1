use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::CliError;

/// A float with 17 significant digits, enough to round-trip an `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text with a `#` provenance line followed by a header row.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(command_line: &str, seed: u64, columns: &[&str]) -> Self {
        let mut text = format!("# qfi-lab {} | command: {} | seed: {}\n", env!("CARGO_PKG_VERSION"), command_line, seed);
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Writes `contents` to a temporary file next to `path`, then renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
