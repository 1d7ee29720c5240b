//! Locale-independent number formatting for reports and CSV files.

use oracle_games::MixedStrategy;

/// Significant digits in CSV output.
pub const CSV_DIGITS: usize = 12;

/// `v` rounded to `digits` significant digits, in the style of C's `%g`.
pub fn sig(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn csv_num(v: f64) -> String {
    sig(v, CSV_DIGITS)
}

/// `(p1, p2, ...)` with `digits` significant digits.
pub fn strategy(s: &MixedStrategy, digits: usize) -> String {
    let parts: Vec<String> = s.probs().iter().map(|&p| sig(p, digits)).collect();
    format!("({})", parts.join(", "))
}

/// Quotes a CSV field when it contains a separator, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
