//! Minimal static SVG 1.1 line charts: raw series with trend overlay on top,
//! cycle below, optional shaded date ranges on both panels.

use std::fmt::Write as _;

const WIDTH: f64 = 900.0;
const PANEL_HEIGHT: f64 = 260.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const GAP: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Line<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub values: &'a [f64],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel<'a> {
    pub title: &'a str,
    pub lines: Vec<Line<'a>>,
    /// Draw a horizontal line at zero when it is inside the range.
    pub zero_line: bool,
}

/// Half-open index ranges on the date axis to shade.
pub type Bands = [(usize, usize)];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn range(lines: &[Line<'_>]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in lines
        .iter()
        .flat_map(|l| l.values.iter())
        .filter(|v| v.is_finite())
    {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

pub fn render(dates: &[String], panels: &[Panel<'_>], bands: &Bands) -> String {
    let len = dates.len().max(2);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let height = MARGIN_TOP + panels.len() as f64 * (PANEL_HEIGHT + GAP);
    let x = |t: f64| MARGIN_LEFT + plot_w * t / (len - 1) as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">
<rect width="100%" height="100%" fill="white"/>"#
    );
    for (p, panel) in panels.iter().enumerate() {
        let top = MARGIN_TOP + p as f64 * (PANEL_HEIGHT + GAP);
        let (lo, hi) = range(&panel.lines);
        let y = |v: f64| top + PANEL_HEIGHT * (hi - v) / (hi - lo);

        for &(a, b) in bands {
            if a >= b || a >= dates.len() {
                continue;
            }
            let b = b.min(dates.len());
            let _ = writeln!(
                s,
                r##"<rect x="{:.2}" y="{top:.2}" width="{:.2}" height="{PANEL_HEIGHT}" fill="#d9d9d9" fill-opacity="0.6"/>"##,
                x(a as f64),
                (x((b - 1) as f64) - x(a as f64)).max(1.0)
            );
        }
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN_LEFT}" y="{top:.2}" width="{plot_w}" height="{PANEL_HEIGHT}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN_LEFT}" y="{:.2}" font-size="13">{}</text>"#,
            top - 8.0,
            escape(panel.title)
        );
        for k in 0..=4 {
            let v = lo + (hi - lo) * k as f64 / 4.0;
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 5.0,
                y(v) + 4.0,
                format_tick(v)
            );
        }
        if panel.zero_line && lo < 0.0 && hi > 0.0 {
            let _ = writeln!(
                s,
                r##"<line x1="{MARGIN_LEFT}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="#888" stroke-dasharray="4 3"/>"##,
                y(0.0),
                MARGIN_LEFT + plot_w
            );
        }
        for (i, line) in panel.lines.iter().enumerate() {
            // missing values break the polyline
            let mut segment = String::new();
            for (t, v) in line.values.iter().enumerate() {
                if v.is_finite() {
                    let _ = write!(segment, "{:.2},{:.2} ", x(t as f64), y(*v));
                } else if !segment.is_empty() {
                    push_polyline(&mut s, &segment, line.color);
                    segment.clear();
                }
            }
            if !segment.is_empty() {
                push_polyline(&mut s, &segment, line.color);
            }
            let lx = MARGIN_LEFT + plot_w - 150.0;
            let ly = top + 14.0 + 14.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="{2}" stroke-width="2"/><text x="{3}" y="{4:.2}">{5}</text>"#,
                ly - 4.0,
                lx + 20.0,
                line.color,
                lx + 25.0,
                ly,
                escape(line.label)
            );
        }
        let bottom = top + PANEL_HEIGHT;
        for k in 0..5 {
            let t = (k * (dates.len().saturating_sub(1))) / 4;
            if let Some(d) = dates.get(t) {
                let _ = writeln!(
                    s,
                    r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                    x(t as f64),
                    bottom + 15.0,
                    escape(d)
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

fn push_polyline(s: &mut String, points: &str, color: &str) {
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
        points.trim_end()
    );
}

fn format_tick(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 0.01 && v.abs() < 1e5) {
        format!("{v:.2}")
    } else {
        format!("{v:.2e}")
    }
}

/// Reads shading bands from CSV rows `start,end` (dates on the axis; rows
/// whose dates are not on the axis are clipped to it).
pub fn bands_from_csv(text: &str, dates: &[String]) -> Result<Vec<(usize, usize)>, String> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        if rec.len() < 2 {
            return Err(format!("shading row {}: expected start,end", r + 1));
        }
        let (a, b) = (rec[0].trim(), rec[1].trim());
        if r == 0 && !crate::panel_io::parse_date(a) {
            continue;
        }
        let start = dates
            .iter()
            .position(|d| d.as_str() >= a)
            .unwrap_or(dates.len());
        let end = dates
            .iter()
            .rposition(|d| d.as_str() <= b)
            .map(|i| i + 1)
            .unwrap_or(0);
        if start < end {
            out.push((start, end));
        }
    }
    Ok(out)
}
