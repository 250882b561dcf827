//! Deterministic number formatting for emitted files.

/// Scientific notation with nine significant digits and a two-digit signed
/// exponent: `-1.23456789e-04`. Locale-independent, total ordering of
/// formatting decisions, so emitters are byte-stable.
pub fn sci9(x: f64) -> String {
    if x == 0.0 {
        // normalizes -0.0 as well
        return "0.00000000e+00".to_string();
    }
    let s = format!("{x:.8e}");
    let (mantissa, exp) = s.split_once('e').expect("{:e} always contains an exponent");
    let e: i32 = exp.parse().expect("exponent is an integer");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", e.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_are_stable_and_parse_back() {
        assert_eq!(sci9(0.0), "0.00000000e+00");
        assert_eq!(sci9(-0.0), "0.00000000e+00");
        assert_eq!(sci9(1.0), "1.00000000e+00");
        assert_eq!(sci9(-0.000123456789), "-1.23456789e-04");
        assert_eq!(sci9(29.0795), "2.90795000e+01");
        assert_eq!(sci9(1.5e-123), "1.50000000e-123");
        for x in [3.14159e-7, -2.5e9, 4.185, 1.001] {
            let parsed: f64 = sci9(x).parse().unwrap();
            assert!((parsed - x).abs() <= 1e-8 * x.abs());
        }
    }
}
