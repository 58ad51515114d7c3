//! Deterministic output formatting: fixed-width significant digits, LF line
//! endings, no locale dependence.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Artifact float format: 12 significant digits, scientific. Chosen so every
/// emitted row re-satisfies its defining equation within 1e-8 when re-parsed.
pub fn sig(x: f64) -> String {
    format!("{x:.11e}")
}

/// Stdout float format.
pub fn human(x: f64) -> String {
    format!("{x:.6}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutFormat {
    #[default]
    Csv,
    Json,
}

impl OutFormat {
    pub fn parse(s: Option<&str>) -> Result<Self, CliError> {
        match s {
            None | Some("csv") => Ok(OutFormat::Csv),
            Some("json") => Ok(OutFormat::Json),
            Some(other) => Err(CliError::Usage(format!("unknown format {other:?} (csv | json)"))),
        }
    }
}

/// Write `content` to the path, or to stdout when no path is given.
pub fn write_output(path: Option<&str>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(Path::new(p), content)
            .map_err(|e| CliError::Internal(format!("cannot write {p}: {e}"))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())
                .map_err(|e| CliError::Internal(format!("stdout: {e}")))
        }
    }
}
