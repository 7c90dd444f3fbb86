//! Number rendering for tabular output.

/// Renders `x` with `digits` significant digits, rounding ties to even, in
/// plain notation for moderate magnitudes and `e` notation otherwise.
/// Trailing zeros are dropped. `digits == 0` gives the shortest string that
/// round-trips.
pub fn sig_digits(x: f64, digits: usize) -> String {
    if digits == 0 || !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let significand: String = mantissa.chars().filter(|c| *c != '.').collect();
    if !(-5..15).contains(&exp) {
        let m = trim_fraction(mantissa);
        return format!("{sign}{m}e{exp}");
    }
    let body = if exp >= 0 {
        let split = exp as usize + 1;
        if significand.len() <= split {
            format!("{significand}{}", "0".repeat(split - significand.len()))
        } else {
            format!("{}.{}", &significand[..split], &significand[split..])
        }
    } else {
        format!("0.{}{significand}", "0".repeat((-exp - 1) as usize))
    };
    format!("{sign}{}", trim_fraction(&body))
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Formatter closure for a precision setting.
pub fn formatter(digits: usize) -> impl Fn(f64) -> String + Copy {
    move |x| sig_digits(x, digits)
}
