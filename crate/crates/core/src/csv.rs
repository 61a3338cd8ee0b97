//! Plain CSV rendering shared by the table emitters.
//!
//! Numbers are written with 17 significant digits in scientific notation so
//! that re-parsing recovers the exact `f64`. Infinities are written as `inf`
//! and `-inf`; missing values as `NA`.

use std::fmt::Write;

pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn format_optional(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), format_number)
}

/// Parses a field written by [`format_number`] / [`format_optional`].
pub fn parse_number(field: &str) -> Option<f64> {
    match field.trim() {
        "NA" => None,
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        other => other.parse().ok(),
    }
}

/// Header plus rows, each row already rendered field by field.
pub fn render(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_sentinels() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0, -0.0, f64::MAX] {
            assert_eq!(parse_number(&format_number(x)), Some(x));
        }
        assert_eq!(format_number(f64::INFINITY), "inf");
        assert_eq!(parse_number("-inf"), Some(f64::NEG_INFINITY));
        assert_eq!(format_optional(None), "NA");
        assert_eq!(parse_number("NA"), None);
        assert_eq!(format_number(0.5), "5.0000000000000000e-1");
    }
}
