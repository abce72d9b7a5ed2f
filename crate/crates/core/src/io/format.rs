/// Formats `x` with `digits` significant digits in the style of C's `%g`:
/// fixed notation for moderate exponents, scientific otherwise, with
/// trailing zeros removed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    // round first so the exponent reflects the rounded value
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Index values as printed by the command-line tool: 12 significant digits.
pub fn format_index(x: f64) -> String {
    format_significant(x, 12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (1.5, "1.5"),
            (1.0, "1"),
            (0.1 + 0.2, "0.3"),
            (2f64.powf(7.0 / 12.0), "1.49830707688"),
            (1.0585365853658536, "1.05853658537"),
            (123456789012345.0, "1.23456789012e+14"),
            (0.00001234, "1.234e-05"),
            (0.0001234, "0.0001234"),
            (-2.5, "-2.5"),
            (9.9999999999999, "10"),
            (0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(format_index(x), want, "{x}");
        }
    }
}
