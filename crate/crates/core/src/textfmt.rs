//! Number formatting and line parsing shared by the CSV writers and the
//! versioned model files.

use crate::error::{Error, Result};

/// Formats with 17 significant digits, enough for an `f64` to round-trip
/// bit-exactly through its decimal form.
pub fn exact(v: f64) -> String {
    format!("{v:.16e}")
}

/// Formats with 6 significant digits in the style of C's `%g`.
pub fn sig6(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    // Round to 6 significant digits first so the exponent reflects carries
    // like 999999.7 -> 1.00000e6.
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn join_exact(values: &[f64]) -> String {
    values.iter().map(|&v| exact(v)).collect::<Vec<_>>().join(",")
}

pub fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::ModelFormat(format!("not a number: {s:?}")))
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_f64).collect()
}

/// Line-oriented reader for `key=value` model files.
pub(crate) struct ModelLines<'a> {
    lines: std::iter::Peekable<std::str::Lines<'a>>,
}

impl<'a> ModelLines<'a> {
    pub fn new(text: &'a str, magic: &str) -> Result<Self> {
        let mut lines = text.lines().peekable();
        match lines.next() {
            Some(first) if first.trim() == magic => Ok(Self { lines }),
            other => Err(Error::ModelFormat(format!(
                "expected header `{magic}`, found {other:?}"
            ))),
        }
    }

    pub fn next_line(&mut self) -> Option<&'a str> {
        loop {
            let line = self.lines.next()?;
            if !line.trim().is_empty() {
                return Some(line);
            }
        }
    }

    pub fn peek_key(&mut self) -> Option<&'a str> {
        while let Some(line) = self.lines.peek() {
            if line.trim().is_empty() {
                self.lines.next();
                continue;
            }
            return line.split_once('=').map(|(k, _)| k.trim());
        }
        None
    }

    /// Reads the next line and requires it to be `key=value`.
    pub fn value(&mut self, key: &str) -> Result<&'a str> {
        let line = self
            .next_line()
            .ok_or_else(|| Error::ModelFormat(format!("missing `{key}=` line")))?;
        match line.split_once('=') {
            Some((k, v)) if k.trim() == key => Ok(v.trim()),
            _ => Err(Error::ModelFormat(format!(
                "expected `{key}=`, found {line:?}"
            ))),
        }
    }

    pub fn f64(&mut self, key: &str) -> Result<f64> {
        parse_f64(self.value(key)?)
    }

    pub fn f64_list(&mut self, key: &str) -> Result<Vec<f64>> {
        parse_f64_list(self.value(key)?)
    }

    /// Reads `key=value` if it is the next line, leaving the reader untouched
    /// otherwise.
    pub fn optional_f64(&mut self, key: &str) -> Result<Option<f64>> {
        if self.peek_key() == Some(key) {
            self.f64(key).map(Some)
        } else {
            Ok(None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_matches_percent_g() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1234.5678), "1234.57");
        assert_eq!(sig6(0.7), "0.7");
        assert_eq!(sig6(-2.5), "-2.5");
        assert_eq!(sig6(1000.5), "1000.5");
        assert_eq!(sig6(123456789.0), "1.23457e8");
        assert_eq!(sig6(0.000012345678), "1.23457e-5");
        assert_eq!(sig6(999999.7), "1e6");
    }

    #[test]
    fn exact_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(parse_f64(&exact(v)).unwrap().to_bits(), v.to_bits());
        }
    }
}
