//! CSV, JSON and SVG writers with a provenance header.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Result, SlitError};

pub const TOOL: &str = "slitlab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits round-trip every f64
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Renders a CSV table: schema comment line, header row, LF line endings.
pub fn render_csv(command: &str, config_hash: &str, columns: &[&str], rows: &[Vec<Cell>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| SlitError::Io(e.to_string());
    w.write_record(columns).map_err(io)?;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != columns.len() {
            return Err(SlitError::domain(format!(
                "row {i} has {} cells, expected {}",
                row.len(),
                columns.len()
            )));
        }
        w.write_record(row.iter().map(Cell::render)).map_err(io)?;
    }
    let body = w.into_inner().map_err(|e| SlitError::Io(e.to_string()))?;
    let body = String::from_utf8(body).map_err(|e| SlitError::Io(e.to_string()))?;
    Ok(format!(
        "# {TOOL} {VERSION} {command} config={config_hash} schema={}\n{body}",
        columns.join(",")
    ))
}

/// Wraps `payload` in the metadata envelope. Keys are sorted.
pub fn envelope<T: Serialize>(command: &str, config_hash: &str, timestamp: &str, payload: &T) -> Result<Value> {
    let payload = serde_json::to_value(payload).map_err(|e| SlitError::Io(e.to_string()))?;
    Ok(json!({
        "metadata": {
            "tool": TOOL,
            "version": VERSION,
            "configHash": config_hash,
            "command": command,
            "timestamp": timestamp,
        },
        "payload": payload,
    }))
}

pub fn render_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON value serializes");
    s.push('\n');
    s
}

pub fn now_timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Writes `contents` to `dir/name`, creating `dir`.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

/// A named polyline for [`render_svg`].
pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#7f7f7f"];

/// Minimal line plot. Non-finite points are dropped.
pub fn render_svg(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>]) -> String {
    let (w, h, m) = (800.0, 500.0, 60.0);
    let finite = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x0 < x1) {
        x0 = 0.0;
        x1 = 1.0;
    }
    if !(y0 < y1) {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
        w - 2.0 * m,
        h - 2.0 * m
    );
    let _ = writeln!(out, r#"<text x="{}" y="30" text-anchor="middle" font-size="16">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{} [{x0:.4}, {x1:.4}]</text>"#,
        w / 2.0,
        h - 20.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{}" font-size="12" transform="rotate(-90 15 {})" text-anchor="middle">{} [{y0:.4}, {y1:.4}]</text>"#,
        h / 2.0,
        h / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"><title>{}</title></polyline>"#,
            pts.join(" "),
            escape(s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
