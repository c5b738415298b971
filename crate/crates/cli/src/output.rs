use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A record that can be emitted as a JSON line or a CSV row.
pub trait Row: Serialize {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

/// `x` with at most 10 significant digits, trailing zeros dropped.
pub fn sig10(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn opt_cell(x: Option<f64>) -> String {
    x.map(sig10).unwrap_or_default()
}

pub fn render<R: Row>(rows: &[R], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut out = String::new();
            for r in rows {
                out.push_str(&serde_json::to_string(r).map_err(|e| CliError::Io(e.to_string()))?);
                out.push('\n');
            }
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Io(e.to_string());
            w.write_record(R::HEADER).map_err(io)?;
            for r in rows {
                w.write_record(r.cells()).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Print to stdout and, when given, write the same bytes to `out`.
pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
    stdout.flush().map_err(|e| CliError::Io(e.to_string()))?;
    if let Some(path) = out {
        std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
