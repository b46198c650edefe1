//! Output rendering: every numeric value is rounded to 9 significant
//! digits before emission so identical configurations produce
//! byte-identical artifacts.

use serde_json::Value;

/// Round to 9 significant digits via a format/parse round trip.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap()
}

/// Recursively round every fractional number in a JSON value.
pub fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                let f = n.as_f64().unwrap();
                if let Some(rounded) = serde_json::Number::from_f64(round_sig9(f)) {
                    *v = Value::Number(rounded);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// 9-significant-digit text for CSV cells: plain decimal in a readable
/// range, scientific outside it, trailing zeros trimmed.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let s = format!("{x:.8e}");
        let (mantissa, exponent) = s.split_once('e').unwrap();
        format!("{}e{}", trim_zeros(mantissa.to_string()), exponent)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

/// Assemble a CSV document: header plus rows, comma-separated, LF endings.
pub fn csv_document(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
