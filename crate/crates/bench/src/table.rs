//! CSV, Markdown and JSON rendering of sweep tables.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{BenchError, Result};
use crate::sweep::SweepTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Markdown,
    Json,
}

impl FromStr for OutputFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            "json" => Ok(OutputFormat::Json),
            other => Err(BenchError::Config(format!(
                "unknown format '{other}' (expected csv, markdown or json)"
            ))),
        }
    }
}

/// `%.4E`-style scientific notation: four decimals, signed two-digit exponent.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let raw = format!("{x:.4E}");
    let (mantissa, exp) = raw.split_once('E').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sci).unwrap_or_default()
}

pub const CSV_HEADER: &str = "T,energy,energy_rate,unorm,unorm_rate";

pub fn emit_table(table: &SweepTable, format: OutputFormat) -> Result<String> {
    let mut out = String::new();
    match format {
        OutputFormat::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for r in &table.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    format_sci(r.t_final),
                    format_sci(r.energy),
                    opt(r.energy_rate),
                    format_sci(r.unorm),
                    opt(r.unorm_rate)
                );
            }
        }
        OutputFormat::Markdown => {
            out.push_str("| T | energy | rate | unorm | rate |\n");
            out.push_str("|---|---|---|---|---|\n");
            for r in &table.rows {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} |",
                    format_sci(r.t_final),
                    format_sci(r.energy),
                    r.energy_rate.map(|x| format!("{x:.3}")).unwrap_or_default(),
                    format_sci(r.unorm),
                    r.unorm_rate.map(|x| format!("{x:.3}")).unwrap_or_default()
                );
            }
        }
        OutputFormat::Json => {
            out = serde_json::to_string_pretty(table)?;
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn parse_json_table(text: &str) -> Result<SweepTable> {
    Ok(serde_json::from_str(text)?)
}
