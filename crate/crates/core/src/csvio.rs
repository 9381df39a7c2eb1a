//! CSV helpers shared by the artifact writers.
//!
//! Floats are written in scientific notation with 17 significant digits,
//! which round-trips every finite `f64` exactly.

use std::io::Write;

use csv::{Writer, WriterBuilder};

use crate::error::Result;

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn parse_f64(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

pub fn writer<W: Write>(w: W) -> Writer<W> {
    WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(w)
}

pub(crate) fn finish<W: Write>(w: Writer<W>) -> Result<()> {
    w.into_inner()
        .map_err(|e| crate::Error::Io(e.into_error()))?
        .flush()?;
    Ok(())
}
