use std::io::Write;

use ramsey_moments::arith::ExactValue;
use serde::Serialize;

use crate::args::OutputMode;

/// Text forms of a command result; JSON comes from `Serialize`.
pub trait Render: Serialize {
    fn pretty(&self) -> String;
    fn csv(&self) -> String;
}

pub fn emit<R: Render>(r: &R, mode: OutputMode, out: &mut dyn Write) -> std::io::Result<()> {
    let text = match mode {
        OutputMode::Pretty => r.pretty(),
        OutputMode::Csv => r.csv(),
        OutputMode::Json => serde_json::to_string_pretty(r).map_err(std::io::Error::other)? + "\n",
    };
    out.write_all(text.as_bytes())
}

/// A float with 17 significant digits, enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        format!("{x:.16e}")
    }
}

/// An exact rational as `p/q`, or `p` when the denominator is 1.
pub fn frac(v: &ExactValue) -> String {
    if v.denominator == "1" {
        v.numerator.clone()
    } else {
        format!("{}/{}", v.numerator, v.denominator)
    }
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_else(|| "-".to_string())
}

/// Quotes a CSV field when it needs it.
pub fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_rows<I, R>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut out = format!("{header}\n");
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(|c| field(&c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
