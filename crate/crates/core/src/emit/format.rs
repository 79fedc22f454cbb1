//! Fixed decimal formatting so that reruns emit identical bytes.

use crate::scalar::Scalar;

pub const MISSING: &str = "NA";

/// Four significant digits in plain decimal notation.
pub fn ratio<T: Scalar>(x: T) -> String {
    let x = x.as_f64();
    if !x.is_finite() {
        return MISSING.to_string();
    }
    if x == 0.0 {
        return "0.000".to_string();
    }
    let decimals = |v: f64| (3 - v.abs().log10().floor() as i32).max(0) as usize;
    let mut d = decimals(x);
    let mut s = format!("{x:.d$}");
    // rounding can carry into a new leading digit (9.9996 -> 10.000)
    let rounded: f64 = s.parse().unwrap_or(x);
    if rounded != 0.0 && decimals(rounded) < d {
        d = decimals(rounded);
        s = format!("{rounded:.d$}");
    }
    if d == 0 && x.abs() >= 1e4 {
        let scale = 10f64.powi(x.abs().log10().floor() as i32 - 3);
        s = format!("{:.0}", (x / scale).round() * scale);
    }
    negative_zero(s)
}

/// Watts and ops/W: one decimal.
pub fn one_decimal<T: Scalar>(x: T) -> String {
    let x = x.as_f64();
    if !x.is_finite() {
        return MISSING.to_string();
    }
    negative_zero(format!("{x:.1}"))
}

pub fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map_or_else(|| MISSING.to_string(), f)
}

fn negative_zero(s: String) -> String {
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}
