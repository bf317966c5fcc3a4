//! Fixed-precision rendering of floating-point output.

/// Significant digits used for every number the CLI emits and for exponent keys.
pub const SIG_DIGITS: usize = 12;

/// Rounds `x` to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    s.parse().unwrap_or(x)
}

/// Shortest decimal string for `x` after rounding to 12 significant digits.
pub fn format_sig(x: f64) -> String {
    format!("{}", round_sig(x, SIG_DIGITS))
}

/// Rounds every number inside a JSON value to 12 significant digits.
pub fn round_json(value: &mut serde_json::Value) {
    use serde_json::Value;
    match value {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64() {
                    if let Some(r) = serde_json::Number::from_f64(round_sig(x, SIG_DIGITS)) {
                        *n = r;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}
