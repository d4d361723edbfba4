//! Byte-stable CSV and JSON rendering.

use serde::Serialize;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_header(dim: usize, prefix: &str, extra: &[&str]) -> String {
    let mut cols: Vec<String> = (0..dim).map(|i| format!("{prefix}{i}")).collect();
    cols.extend(extra.iter().map(|s| s.to_string()));
    cols.join(",") + "\n"
}

pub fn csv_row(coords: &[f64], values: &[f64], labels: &[&str]) -> String {
    let mut cells: Vec<String> = coords.iter().chain(values).map(|&v| float(v)).collect();
    cells.extend(labels.iter().map(|s| s.to_string()));
    cells.join(",") + "\n"
}

pub fn json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, -2.0 / 3.0, 1e-300, 12_345.678_901_234_567, 0.0] {
            let s = float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
    }

    #[test]
    fn rows_have_no_trailing_space() {
        assert_eq!(csv_header(2, "x", &["envelope_value"]), "x0,x1,envelope_value\n");
        let row = csv_row(&[1.0, -0.5], &[0.25], &["parallel"]);
        assert_eq!(
            row,
            "1.0000000000000000e0,-5.0000000000000000e-1,2.5000000000000000e-1,parallel\n"
        );
    }
}
