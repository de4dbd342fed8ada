//! Scan and table files. Numbers are written with 12 significant digits so a
//! file read back and written again is byte-identical.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;
use trifringe_core::{FringeScan, ScanKind};

use crate::error::{CliError, CliResult};

pub const SCAN_HEADER: [&str; 2] = ["phase_rad", "value"];

pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn scan_csv(scan: &FringeScan) -> String {
    let mut out = format!("{}\n", SCAN_HEADER.join(","));
    for (p, v) in scan.phases().iter().zip(scan.values()) {
        out.push_str(&format!("{},{}\n", num(*p), num(*v)));
    }
    out
}

/// Parsed scan rows, before a scan kind is chosen.
pub struct ScanRows {
    pub phases: Vec<f64>,
    pub values: Vec<f64>,
}

impl ScanRows {
    /// Counts when every value is a whole number, model rates otherwise.
    pub fn inferred_kind(&self) -> ScanKind {
        if self.values.iter().all(|v| v.fract() == 0.0) {
            ScanKind::Counts
        } else {
            ScanKind::ModelRate
        }
    }

    pub fn into_scan(self, kind: ScanKind) -> CliResult<FringeScan> {
        Ok(FringeScan::new(self.phases, self.values, kind)?)
    }
}

pub fn read_scan(path: &Path) -> CliResult<ScanRows> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    parse_scan(&text).map_err(|msg| CliError::Data(format!("{}: {msg}", path.display())))
}

pub fn parse_scan(text: &str) -> Result<ScanRows, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| format!("line 1: {e}"))?;
    if header.iter().collect::<Vec<_>>() != SCAN_HEADER {
        return Err(format!("line 1: expected header `{}`", SCAN_HEADER.join(",")));
    }
    let mut rows = ScanRows {
        phases: Vec::new(),
        values: Vec::new(),
    };
    for record in reader.records() {
        let record = record.map_err(|e| match e.position() {
            Some(pos) => format!("line {}: {}", pos.line(), e.kind_message()),
            None => e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &str| -> Result<f64, String> {
            let raw = record.get(i).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("line {line}: {name} `{raw}` is not a finite number"))
        };
        rows.phases.push(field(0, "phase")?);
        rows.values.push(field(1, "value")?);
    }
    if rows.phases.is_empty() {
        return Err("no data rows".into());
    }
    Ok(rows)
}

trait KindMessage {
    fn kind_message(&self) -> String;
}

impl KindMessage for csv::Error {
    fn kind_message(&self) -> String {
        match self.kind() {
            csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
                format!("expected {expected_len} fields, found {len}")
            }
            _ => self.to_string(),
        }
    }
}

/// Resolves relative output paths against `TRIFRINGE_OUT_DIR` when it is set.
pub fn output_path(path: &Path) -> PathBuf {
    match std::env::var_os("TRIFRINGE_OUT_DIR") {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let ctx = || format!("writing {}", path.display());
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(ctx(), e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| CliError::io(ctx(), e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(ctx(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(ctx(), e.error))?;
    Ok(())
}

/// Writes to `path`, or to standard output when there is none.
pub fn emit(path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) => write_atomic(&output_path(p), contents),
        None => std::io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|e| CliError::io("writing standard output", e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_byte_identical() {
        let scan = FringeScan::sample(37, ScanKind::ModelRate, |p| 1e-4 * (1.0 + (3.0 * p).cos()) / 7.0).unwrap();
        let text = scan_csv(&scan);
        let again = parse_scan(&text).unwrap().into_scan(ScanKind::ModelRate).unwrap();
        assert_eq!(scan_csv(&again), text);
    }

    #[test]
    fn truncated_row_names_line() {
        let err = parse_scan("phase_rad,value\n0.0,1.0\n0.5\n").err().unwrap();
        assert!(err.starts_with("line 3:"), "{err}");
        let err = parse_scan("phase_rad,value\n0.0,1.0\n0.5,abc\n").err().unwrap();
        assert!(err.starts_with("line 3:"), "{err}");
        assert!(parse_scan("phase,value\n0,1\n").is_err());
    }

    #[test]
    fn kind_inference() {
        let rows = parse_scan("phase_rad,value\n0,3\n1,4.0\n").unwrap();
        assert_eq!(rows.inferred_kind(), ScanKind::Counts);
        let rows = parse_scan("phase_rad,value\n0,3.5\n1,4\n").unwrap();
        assert_eq!(rows.inferred_kind(), ScanKind::ModelRate);
    }
}
