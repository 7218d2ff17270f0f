//! Seventeen-significant-digit number printing.
//!
//! Seventeen digits are enough to round-trip any `f64`, so every number the
//! crate writes parses back to the identical bit pattern.

/// `v` in scientific notation with 17 significant digits.
pub fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}
