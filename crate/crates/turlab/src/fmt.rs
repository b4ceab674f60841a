//! Deterministic float formatting for file outputs.

/// Format with 17 significant digits in scientific notation. This always
/// round-trips an `f64` exactly, so emitted CSV and summary lines are stable
/// under re-parsing and byte-identical across runs.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
