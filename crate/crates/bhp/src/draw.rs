//! CSV exchange of simulated draws and single filtered series.

use std::io::{Read, Write};

use bhp_core::dgp::SimulatedDraw;
use bhp_core::FilterResult;

use crate::error::{CliError, CliResult};

/// Columns `t, f, cycle, y` with `t` counted from 1. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_draw<W: Write>(out: W, draw: &SimulatedDraw) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "f", "cycle", "y"])?;
    for (t, ((f, c), y)) in draw.trend.iter().zip(&draw.cycle).zip(&draw.y).enumerate() {
        w.write_record([
            (t + 1).to_string(),
            f.to_string(),
            c.to_string(),
            y.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One column of a CSV with its first-column labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSeries {
    pub name: String,
    pub labels: Vec<String>,
    pub values: Vec<f64>,
}

/// Reads a header-first CSV whose first column holds dates (or any labels)
/// and picks one value column, by name or the first one after the labels.
pub fn read_series<R: Read>(input: R, column: Option<&str>) -> CliResult<LabeledSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 {
        return Err(CliError::data(
            "expected a label column and at least one value column",
        ));
    }
    let idx = match column {
        None => 1,
        Some(name) => headers
            .iter()
            .position(|h| h.trim() == name)
            .filter(|&i| i > 0)
            .ok_or_else(|| CliError::usage(format!("no value column named '{name}'")))?,
    };
    let name = headers[idx].trim().to_string();
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = r + 2;
        let cell = rec.get(idx).unwrap_or("").trim();
        let v: f64 = cell.parse().map_err(|_| {
            if crate::panel_io::is_missing(cell) {
                CliError::data(format!(
                    "row {row}, column '{name}': missing value (filter needs a complete series)"
                ))
            } else {
                CliError::data(format!(
                    "row {row}, column '{name}': cannot parse '{cell}' as a number"
                ))
            }
        })?;
        if !v.is_finite() {
            return Err(CliError::data(format!(
                "row {row}, column '{name}': non-finite value"
            )));
        }
        labels.push(rec.get(0).unwrap_or("").trim().to_string());
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::data("no data rows"));
    }
    Ok(LabeledSeries {
        name,
        labels,
        values,
    })
}

/// Columns `date, raw, trend, cycle, method, m_hat`. Undefined positions
/// (AR start-up) have empty trend and cycle cells.
pub fn write_filtered<W: Write>(
    out: W,
    series: &LabeledSeries,
    result: &FilterResult,
    method: &str,
) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "raw", "trend", "cycle", "method", "m_hat"])?;
    let m_hat = result.iterations.to_string();
    for t in 0..series.values.len() {
        let (f, c) = if result.is_defined(t) {
            (result.trend[t].to_string(), result.cycle[t].to_string())
        } else {
            (String::new(), String::new())
        };
        w.write_record([
            series.labels[t].clone(),
            series.values[t].to_string(),
            f,
            c,
            method.to_string(),
            m_hat.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
