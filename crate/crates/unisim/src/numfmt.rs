//! Number formatting shared by the emitters.

/// Decimal notation with `digits` significant digits, trailing zeros trimmed.
///
/// ```
/// use unisim::numfmt::sig;
/// assert_eq!(sig(3.14159265358979, 9), "3.14159265");
/// assert_eq!(sig(-0.000123456789012, 9), "-0.000123456789");
/// assert_eq!(sig(0.0, 9), "0");
/// ```
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    let exponent = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - exponent).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.truncate(s.trim_end_matches('0').trim_end_matches('.').len());
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

/// Shortest decimal string that parses back to exactly `x`.
pub fn exact(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}
