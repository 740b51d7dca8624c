//! Fixed-precision number formatting shared by the JSON, CSV and table outputs.

/// Significant digits used for every reported number.
pub const SIG_DIGITS: usize = 12;

/// Rounds `x` to `digits` significant digits. Non-finite values pass through.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    let r: f64 = s.parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Shortest text for `x` after rounding to [`SIG_DIGITS`]; exponent form
/// below `1e-4` and from `1e15` up.
pub fn fmt_sig(x: f64) -> String {
    let r = round_sig(x, SIG_DIGITS);
    if r != 0.0 && r.is_finite() && (r.abs() < 1e-4 || r.abs() >= 1e15) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// Rounds every float inside a JSON document to [`SIG_DIGITS`].
pub fn round_json(v: &mut serde_json::Value) {
    use serde_json::Value;
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(|x| round_sig(x, SIG_DIGITS)) {
                if let Some(num) = serde_json::Number::from_f64(r) {
                    *n = num;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.1 + 0.2, 12), 0.3);
        assert_eq!(round_sig(-2.0_f64.sqrt(), 3), -1.41);
        assert_eq!(round_sig(1e-20, 12), 1e-20);
        assert_eq!(round_sig(-0.0, 12), 0.0);
        assert_eq!(fmt_sig(2.0 * 2.0_f64.sqrt()), "2.82842712475");
        assert_eq!(fmt_sig(4.0), "4");
        assert_eq!(fmt_sig(4.440892098500626e-16), "4.4408920985e-16");
        assert_eq!(fmt_sig(-0.0), "0");
    }

    #[test]
    fn json_rounding() {
        let mut v = serde_json::json!({"a": [0.1 + 0.2, 1], "b": {"c": 1.0 / 3.0}});
        round_json(&mut v);
        assert_eq!(v.to_string(), r#"{"a":[0.3,1],"b":{"c":0.333333333333}}"#);
    }
}
