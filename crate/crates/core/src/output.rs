//! Deterministic CSV/JSON emission: comma-separated, header row, LF line
//! endings, UTF-8; numbers as the shortest representation that round-trips
//! at the configured significant-digit precision.

use std::io::Write;

use crate::error::Result;

/// Rounds to `precision` significant digits, then prints the shortest
/// decimal that round-trips to the rounded value.
pub fn format_sig(v: f64, precision: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let rounded: f64 = format!("{:.*e}", precision.saturating_sub(1), v)
        .parse()
        .expect("exponent form always parses");
    format!("{rounded}")
}

/// Writes one CSV row from already-formatted cells.
pub fn write_row<W: Write>(w: &mut W, cells: &[String]) -> Result<()> {
    writeln!(w, "{}", cells.join(",")).map_err(Into::into)
}

/// Writes a full CSV document (header plus rows) to `sink`.
pub fn write_csv<W: Write>(sink: &mut W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    writeln!(sink, "{}", header.join(","))?;
    for row in rows {
        write_row(sink, row)?;
    }
    Ok(())
}

/// Serializes a JSON document with a trailing newline.
pub fn to_json_document<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| crate::error::Error::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Writes `text` to the path, or to stdout when the path is None.
pub fn emit(path: Option<&str>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(Into::into),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_round_trip_at_precision() {
        assert_eq!(format_sig(0.1 + 0.2, 12), "0.3");
        assert_eq!(format_sig(0.1 + 0.2, 17), "0.30000000000000004");
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(-2.5e-5, 12), "-0.000025");
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(-0.0, 12), "0");
        assert_eq!(format_sig(123456.789, 6), "123457");
    }

    #[test]
    fn formatted_value_reparses_to_rounded() {
        let vals = [std::f64::consts::PI, 2.17, 1.25e-5, 9655349.149005609];
        for v in vals {
            let s = format_sig(v, 12);
            let back: f64 = s.parse().unwrap();
            assert!((back - v).abs() <= 1e-11 * v.abs());
        }
    }

    #[test]
    fn csv_uses_lf_only() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &["a", "b"], &[vec!["1".into(), "2".into()]]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "a,b\n1,2\n");
        assert!(!text.contains('\r'));
    }
}
