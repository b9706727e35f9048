//! Deterministic decimal formatting for CSV artifacts.
//!
//! Every real is written with 17 significant digits in scientific notation,
//! which round-trips any f64 exactly and keeps golden files byte-stable
//! across runs and platforms.

/// Formats an `f64` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}
