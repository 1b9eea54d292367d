//! Output formats: CSV with `#` comment headers, 16-bit binary PGM and
//! JSON Lines. Numbers are written in the shortest form `%.17g` produces,
//! so every `f64` survives a round trip.

use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;

/// C `printf("%.17g", x)`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if !(-4..17).contains(&exp) {
        let frac = digits[1..].trim_end_matches('0');
        let exp_sign = if exp < 0 { '-' } else { '+' };
        let body = if frac.is_empty() {
            digits[..1].to_string()
        } else {
            format!("{}.{}", &digits[..1], frac)
        };
        return format!("{sign}{body}e{exp_sign}{:02}", exp.abs());
    }
    let (int_part, frac_part) = if exp >= 0 {
        let split = exp as usize + 1;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        ("0".to_string(), format!("{}{}", "0".repeat((-exp - 1) as usize), digits))
    };
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// CSV writer: `#` comment lines first, then a column header, then rows.
pub struct CsvWriter<W: Write> {
    out: W,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    pub fn comment(&mut self, line: &str) -> Result<()> {
        writeln!(self.out, "# {line}")?;
        Ok(())
    }

    pub fn header(&mut self, columns: &[&str]) -> Result<()> {
        writeln!(self.out, "{}", columns.join(","))?;
        Ok(())
    }

    /// One row of already formatted fields; fields containing separators
    /// or quotes are quoted.
    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) -> Result<()> {
        let line: Vec<String> = fields.iter().map(|f| quote(f.as_ref())).collect();
        writeln!(self.out, "{}", line.join(","))?;
        Ok(())
    }

    pub fn numbers(&mut self, values: &[f64]) -> Result<()> {
        let line: Vec<String> = values.iter().map(|&v| fmt_g17(v)).collect();
        writeln!(self.out, "{}", line.join(","))?;
        Ok(())
    }

    pub fn into_inner(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Affine map from 16-bit samples back to values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub lo: f64,
    pub hi: f64,
}

impl AffineMap {
    pub fn fit(values: &[f64]) -> Self {
        let finite = values.iter().copied().filter(|v| v.is_finite());
        let lo = finite.clone().fold(f64::INFINITY, f64::min);
        let hi = finite.fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() {
            Self { lo, hi }
        } else {
            Self { lo: 0.0, hi: 0.0 }
        }
    }

    pub fn encode(&self, v: f64) -> u16 {
        if !(self.hi > self.lo) || !v.is_finite() {
            return 0;
        }
        ((v - self.lo) / (self.hi - self.lo) * 65535.0).round().clamp(0.0, 65535.0) as u16
    }

    pub fn decode(&self, s: u16) -> f64 {
        self.lo + (self.hi - self.lo) * s as f64 / 65535.0
    }
}

/// Binary 16-bit PGM with big-endian samples. `rows[0]` is the top row.
/// The comment line records the affine map so values can be recovered.
pub fn write_pgm16<W: Write>(mut out: W, width: usize, rows: &[Vec<f64>], map: AffineMap) -> Result<()> {
    writeln!(out, "P5")?;
    writeln!(
        out,
        "# affine value = {} + ({} - {}) * sample / 65535",
        fmt_g17(map.lo),
        fmt_g17(map.hi),
        fmt_g17(map.lo)
    )?;
    writeln!(out, "{} {}", width, rows.len())?;
    writeln!(out, "65535")?;
    let mut bytes = Vec::with_capacity(2 * width * rows.len());
    for row in rows {
        for &v in row {
            bytes.extend_from_slice(&map.encode(v).to_be_bytes());
        }
    }
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

/// One JSON document per line.
pub fn write_jsonl<W: Write, T: Serialize>(mut out: W, items: &[T]) -> Result<()> {
    for item in items {
        let line = serde_json::to_string(item).map_err(|e| crate::Error::Io(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn complex_fields(z: Complex64) -> [String; 2] {
    [fmt_g17(z.re), fmt_g17(z.im)]
}
