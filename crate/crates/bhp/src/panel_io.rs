//! Panel CSV input and the tidy, index and test outputs.
//!
//! Input layout: a header row, optional metadata rows (FRED-MD carries one
//! transform-code row, FRED-QD a factor row and a transform row), then one
//! row per date. The date column comes first unless configured otherwise.
//! Empty cells, `NA`, `NaN` and `.` are missing. Series ids are 1-based
//! column positions among the data columns.

use std::io::{Read, Write};

use bhp_core::actest::{AcTestResult, JOINT_STATISTIC};
use bhp_core::panel::{prepare_series, AggregateIndex, PanelCycles, PanelDataset};
use bhp_core::Frequency;
use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    pub date_column: usize,
    pub skip_metadata_rows: usize,
    pub frequency: Frequency,
    pub interpolate_interior: bool,
}

impl LoadOptions {
    pub fn new(frequency: Frequency) -> Self {
        LoadOptions {
            date_column: 0,
            skip_metadata_rows: 0,
            frequency,
            interpolate_interior: false,
        }
    }
}

pub fn is_missing(cell: &str) -> bool {
    matches!(cell.trim(), "" | "NA" | "N/A" | "NaN" | "nan" | ".")
}

/// Accepts ISO dates, US `m/d/yyyy`, `yyyy-mm`, `yyyyQn`/`yyyy:Qn` and
/// `yyyyMmm`.
pub fn parse_date(s: &str) -> bool {
    let s = s.trim();
    if NaiveDate::parse_from_str(s, "%Y-%m-%d").is_ok()
        || NaiveDate::parse_from_str(s, "%m/%d/%Y").is_ok()
    {
        return true;
    }
    if NaiveDate::parse_from_str(&format!("{s}-01"), "%Y-%m-%d").is_ok() {
        return true;
    }
    let upper = s.to_ascii_uppercase().replace(':', "");
    for (tag, max) in [('Q', 4u32), ('M', 12)] {
        if let Some((y, p)) = upper.split_once(tag) {
            let ok_year = y.len() == 4 && y.chars().all(|c| c.is_ascii_digit());
            if ok_year && p.parse::<u32>().is_ok_and(|p| (1..=max).contains(&p)) {
                return true;
            }
        }
    }
    false
}

pub fn load_panel<R: Read>(reader: R, options: &LoadOptions) -> CliResult<PanelDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if options.date_column >= headers.len() {
        return Err(CliError::data(format!(
            "date column {} does not exist (header has {} columns)",
            options.date_column + 1,
            headers.len()
        )));
    }
    let names: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != options.date_column)
        .map(|(i, h)| (i, h.trim().to_string()))
        .collect();
    if names.is_empty() {
        return Err(CliError::data("no data columns besides the date column"));
    }

    let mut dates = Vec::new();
    let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::new(); names.len()];
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = r + 2;
        if r < options.skip_metadata_rows {
            continue;
        }
        if record.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        let date = record.get(options.date_column).unwrap_or("").trim();
        if !parse_date(date) {
            return Err(CliError::data(format!(
                "row {row}, column 1: '{date}' is not a date (declare metadata rows to skip them)"
            )));
        }
        dates.push(date.to_string());
        for (k, (col, name)) in names.iter().enumerate() {
            let cell = record.get(*col).unwrap_or("");
            let value = if is_missing(cell) {
                None
            } else {
                let v: f64 = cell.trim().parse().map_err(|_| {
                    CliError::data(format!(
                        "row {row}, column '{name}': cannot parse '{cell}' as a number"
                    ))
                })?;
                if !v.is_finite() {
                    return Err(CliError::data(format!(
                        "row {row}, column '{name}': non-finite value"
                    )));
                }
                Some(v)
            };
            columns[k].push(value);
        }
    }
    if dates.is_empty() {
        return Err(CliError::data("no data rows"));
    }

    let mut series = Vec::new();
    let mut excluded = Vec::new();
    for (k, ((_, name), raw)) in names.iter().zip(&columns).enumerate() {
        match prepare_series(k as u32 + 1, name, raw, options.interpolate_interior) {
            Ok(s) => series.push(s),
            Err(e) => excluded.push(e),
        }
    }
    let panel = PanelDataset {
        dates,
        frequency: options.frequency,
        series,
        excluded,
    };
    panel.validate()?;
    Ok(panel)
}

/// Rows `(date, series_id, trend, cycle, standardized_cycle)` for
/// every position where the filter produced an estimate.
pub fn write_tidy<W: Write>(
    out: W,
    dates: &[String],
    cycles: &PanelCycles,
    standardized: &PanelCycles,
) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "series_id", "trend", "cycle", "standardized_cycle"])?;
    for s in &cycles.series {
        let st = standardized.series.iter().find(|x| x.id == s.id);
        for (j, (&f, &c)) in s.trend.iter().zip(&s.cycle).enumerate() {
            if c.is_nan() {
                continue;
            }
            let z = st.map(|x| x.cycle[j].to_string()).unwrap_or_default();
            w.write_record([
                dates[s.start + j].clone(),
                s.id.to_string(),
                f.to_string(),
                c.to_string(),
                z,
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Rows `(date, index, coverage)`; uncovered dates have an empty index.
pub fn write_index<W: Write>(out: W, dates: &[String], index: &AggregateIndex) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "index", "coverage"])?;
    for ((d, v), c) in dates.iter().zip(&index.values).zip(&index.coverage) {
        let v = if v.is_nan() {
            String::new()
        } else {
            v.to_string()
        };
        w.write_record([d.clone(), v, c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct AcTestReport<'a> {
    pub schema_version: u32,
    pub statistic: &'static str,
    pub method: &'a str,
    pub observations: usize,
    pub first_date: &'a str,
    pub last_date: &'a str,
    #[serde(rename = "K")]
    pub lags: usize,
    pub t_stats: &'a [f64],
    pub joint_stat: f64,
    pub critical_value_5pct: f64,
    pub reject: bool,
}

/// Longest run of covered dates, the sample the test is run on.
pub fn covered_span(index: &AggregateIndex) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for (t, v) in index
        .values
        .iter()
        .enumerate()
        .chain([(index.values.len(), &f64::NAN)])
    {
        match (v.is_nan(), start) {
            (false, None) => start = Some(t),
            (true, Some(s)) => {
                if best.is_none_or(|(a, b)| t - s > b - a) {
                    best = Some((s, t));
                }
                start = None;
            }
            _ => {}
        }
    }
    best
}

pub fn ac_report<'a>(
    result: &'a AcTestResult,
    method: &'a str,
    dates: &'a [String],
    span: (usize, usize),
) -> AcTestReport<'a> {
    AcTestReport {
        schema_version: SCHEMA_VERSION,
        statistic: JOINT_STATISTIC,
        method,
        observations: span.1 - span.0,
        first_date: &dates[span.0],
        last_date: &dates[span.1 - 1],
        lags: result.lags,
        t_stats: &result.t_stats,
        joint_stat: result.joint_stat,
        critical_value_5pct: result.critical_value_5pct,
        reject: result.reject,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FRED_LIKE: &str = "\
sasdate,A,B,C
Transform:,5,2,1
1/1/1959,1.0,NA,3
2/1/1959,2.0,5,
3/1/1959,3.5,6,4
4/1/1959,4.0,,5
";

    #[test]
    fn dates() {
        for ok in [
            "1959-01-01",
            "1/1/1959",
            "1959-03",
            "1959Q1",
            "1959:Q4",
            "2001M12",
        ] {
            assert!(parse_date(ok), "{ok}");
        }
        for bad in ["", "Transform:", "1959Q5", "factors", "13/1/1959"] {
            assert!(!parse_date(bad), "{bad}");
        }
    }

    #[test]
    fn metadata_rows_must_be_declared() {
        let err =
            load_panel(FRED_LIKE.as_bytes(), &LoadOptions::new(Frequency::Monthly)).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }

    #[test]
    fn trims_edges_and_excludes_gaps() {
        let mut opts = LoadOptions::new(Frequency::Monthly);
        opts.skip_metadata_rows = 1;
        let p = load_panel(FRED_LIKE.as_bytes(), &opts).unwrap();
        assert_eq!(p.dates.len(), 4);
        assert_eq!(p.series.len(), 2);
        assert_eq!(p.series[0].usable, (0, 4));
        assert_eq!((p.series[1].id, p.series[1].usable), (2, (1, 3)));
        assert_eq!(p.excluded.len(), 1);
        assert_eq!(p.excluded[0].id, 3);

        opts.interpolate_interior = true;
        let p = load_panel(FRED_LIKE.as_bytes(), &opts).unwrap();
        assert_eq!(p.series.len(), 3);
        assert_eq!(p.series[2].usable_values(), &[3.0, 3.5, 4.0, 5.0]);
    }

    #[test]
    fn bad_cells_report_position() {
        let text = "date,x\n2000-01-01,1\n2000-02-01,abc\n";
        let err = load_panel(text.as_bytes(), &LoadOptions::new(Frequency::Monthly)).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("row 3, column 'x'"));
    }

    #[test]
    fn longest_covered_run() {
        let idx = AggregateIndex {
            values: vec![f64::NAN, 1.0, 2.0, f64::NAN, 1.0, 2.0, 3.0],
            coverage: vec![0, 1, 1, 0, 1, 1, 1],
            method: "x".into(),
        };
        assert_eq!(covered_span(&idx), Some((4, 7)));
    }
}
