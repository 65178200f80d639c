//! Text formatting shared by the CSV and JSON emitters.

/// Formats `x` with nine significant digits, switching to exponent notation
/// for very small or very large magnitudes (the `%.9g` convention).
pub fn sig9(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // Round first so the exponent reflects the printed mantissa (0.9999999999 -> 1).
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (DIGITS - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::sig9;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(std::f64::consts::PI / (6.0 * 3f64.sqrt())), "0.302299894");
        assert_eq!(sig9(0.25), "0.25");
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(-1.5), "-1.5");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(511.5), "511.5");
        assert_eq!(sig9(1.0e-7), "1e-07");
        assert_eq!(sig9(3.141592653589793e12), "3.14159265e+12");
        assert_eq!(sig9(0.99999999999), "1");
        assert_eq!(sig9(123456789.4), "123456789");
    }
}
