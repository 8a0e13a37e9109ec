//! CSV and JSON emission. CSV uses a single header line, comma separators,
//! `.` decimal points, LF line endings and full-precision (round-trip)
//! number rendering; no quoting is ever needed for numeric-only data.

use std::io::Write;
use std::path::Path;

use crate::manifest::RunManifest;
use crate::AppError;

pub struct CsvWriter {
    buf: Vec<u8>,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = Vec::new();
        let _ = writeln!(buf, "{}", header.join(","));
        Self { buf }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.buf, "{}", cells.join(","));
    }

    pub fn write_to(&self, path: &Path) -> Result<(), AppError> {
        std::fs::write(path, &self.buf)
            .map_err(|e| AppError::Io(format!("cannot write {}: {e}", path.display())))
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

/// Writes `<output>.manifest.json` next to a CSV output.
pub fn write_sidecar_manifest(csv_path: &Path, manifest: &RunManifest) -> Result<(), AppError> {
    let mut path = csv_path.as_os_str().to_owned();
    path.push(".manifest.json");
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| AppError::Internal(format!("manifest serialization failed: {e}")))?;
    std::fs::write(&path, text + "\n")
        .map_err(|e| AppError::Io(format!("cannot write {}: {e}", Path::new(&path).display())))
}
