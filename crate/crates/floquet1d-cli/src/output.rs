//! Deterministic serialization helpers.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Full double precision: 17 significant digits, fixed scientific layout,
/// so identical configs produce byte-identical files.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `content` to `out`, or to stdout when no path is given. The
/// content is assembled beforehand so a failing run never leaves a partial
/// file.
pub fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            file.write_all(content.as_bytes())?;
            Ok(())
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}
