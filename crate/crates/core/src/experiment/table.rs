//! Result tables and their CSV / SVG renderings.
//!
//! Both writers are pure functions of the table, so identical runs produce
//! byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// How a column is drawn in the SVG chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesStyle {
    Line,
    Markers,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    /// Index into [`ResultTable::columns`].
    pub column: usize,
    pub style: SeriesStyle,
}

/// A vertical reference line at `x`, e.g. a policy threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub label: String,
    pub x: f64,
}

/// Column-oriented numeric table; column 0 is the x axis. Missing values
/// (columns of a disabled mode) are `None` and print as empty cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    /// `key: value` lines of the metadata block, in order.
    pub metadata: Vec<(String, String)>,
    /// Verbatim text echoed into the metadata block (the run config).
    pub echo: String,
    pub series: Vec<Series>,
    pub markers: Vec<Marker>,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    /// Fixed y range; `None` fits the data.
    pub y_range: Option<(f64, f64)>,
}

impl ResultTable {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        ResultTable {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn push_row(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of one column with missing cells skipped.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().filter_map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.title);
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        if !self.echo.is_empty() {
            out.push_str("# config:\n");
            for line in self.echo.lines() {
                let _ = writeln!(out, "#   {line}");
            }
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.map(|v| v.to_string()).unwrap_or_default()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_svg(&self) -> String {
        SvgChart::new(self).render()
    }
}

pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<()> {
    write_file(path, &table.to_csv())
}

pub fn emit_svg(table: &ResultTable, path: &Path) -> Result<()> {
    write_file(path, &table.to_svg())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] =
    ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

struct SvgChart<'a> {
    table: &'a ResultTable,
    x_range: (f64, f64),
    y_range: (f64, f64),
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

impl<'a> SvgChart<'a> {
    fn new(table: &'a ResultTable) -> Self {
        let xs: Vec<f64> = table
            .rows
            .iter()
            .filter_map(|r| r.first().copied().flatten())
            .filter(|x| !table.log_x || *x > 0.0)
            .chain(table.markers.iter().map(|m| m.x))
            .collect();
        let x_range = span(&xs, table.log_x);
        let y_range = table.y_range.unwrap_or_else(|| {
            let ys: Vec<f64> =
                table.series.iter().flat_map(|s| table.rows.iter().filter_map(move |r| r[s.column])).collect();
            let (lo, hi) = span(&ys, false);
            (lo.min(0.0), hi)
        });
        SvgChart { table, x_range, y_range }
    }

    fn tx(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        let f = if self.table.log_x { (x.ln() - lo.ln()) / (hi.ln() - lo.ln()) } else { (x - lo) / (hi - lo) };
        LEFT + f * (WIDTH - LEFT - RIGHT)
    }

    fn ty(&self, y: f64) -> f64 {
        let (lo, hi) = self.y_range;
        HEIGHT - BOTTOM - (y - lo) / (hi - lo) * (HEIGHT - TOP - BOTTOM)
    }

    fn render(&self) -> String {
        let t = self.table;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            (LEFT + WIDTH - RIGHT) / 2.0,
            escape(&t.title)
        );
        self.axes(&mut s);
        for m in &t.markers {
            let x = self.tx(m.x);
            let _ = writeln!(
                s,
                r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#555" stroke-dasharray="5,4"/>"##,
                TOP,
                HEIGHT - BOTTOM
            );
            let _ = writeln!(
                s,
                r##"<text x="{:.2}" y="{:.2}" fill="#555">{}</text>"##,
                x + 4.0,
                TOP + 14.0,
                escape(&m.label)
            );
        }
        for (k, series) in t.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let points: Vec<(f64, f64)> = t
                .rows
                .iter()
                .filter_map(|r| Some((r[0]?, r[series.column]?)))
                .filter(|(x, _)| !t.log_x || *x > 0.0)
                .map(|(x, y)| (self.tx(x), self.ty(y)))
                .collect();
            match series.style {
                SeriesStyle::Line if !points.is_empty() => {
                    let path: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                    let _ = writeln!(
                        s,
                        r#"<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{}"/>"#,
                        path.join(" ")
                    );
                }
                SeriesStyle::Markers => {
                    for (x, y) in &points {
                        let _ =
                            writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="none" stroke="{color}"/>"#);
                    }
                }
                SeriesStyle::Line => {}
            }
            let ly = TOP + 10.0 + 18.0 * k as f64;
            let lx = WIDTH - RIGHT + 16.0;
            match series.style {
                SeriesStyle::Line => {
                    let _ = writeln!(
                        s,
                        r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.8"/>"#,
                        lx + 22.0
                    );
                }
                SeriesStyle::Markers => {
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{:.2}" cy="{ly:.2}" r="3" fill="none" stroke="{color}"/>"#,
                        lx + 11.0
                    );
                }
            }
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 28.0,
                ly + 4.0,
                escape(&t.columns[series.column])
            );
        }
        s.push_str("</svg>\n");
        s
    }

    fn axes(&self, s: &mut String) {
        let t = self.table;
        let (x0, x1) = (LEFT, WIDTH - RIGHT);
        let (y0, y1) = (HEIGHT - BOTTOM, TOP);
        let _ = writeln!(
            s,
            r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#
        );
        for v in ticks(self.x_range, t.log_x) {
            let x = self.tx(v);
            let _ =
                writeln!(s, r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
            let _ = writeln!(
                s,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                y0 + 19.0,
                tick_label(v)
            );
        }
        for v in ticks(self.y_range, false) {
            let y = self.ty(v);
            let _ =
                writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 8.0,
                y + 4.0,
                tick_label(v)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 16.0,
            escape(&t.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(&t.y_label)
        );
    }
}

fn span(values: &[f64], log: bool) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) {
        return if log { (0.1, 10.0) } else { (0.0, 1.0) };
    }
    if lo == hi {
        return if log { (lo / 2.0, hi * 2.0) } else { (lo - 0.5, hi + 0.5) };
    }
    (lo, hi)
}

/// Roughly five round tick values inside `range`; decades on a log axis.
fn ticks((lo, hi): (f64, f64), log: bool) -> Vec<f64> {
    if log {
        let mut out = Vec::new();
        let mut e = lo.log10().floor() as i32;
        while 10f64.powi(e) <= hi * (1.0 + 1e-12) {
            let v = 10f64.powi(e);
            if v >= lo * (1.0 - 1e-12) {
                out.push(v);
            }
            e += 1;
        }
        return out;
    }
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let mut v = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while v <= hi + 1e-9 * step {
        out.push(if v.abs() < 1e-12 * step { 0.0 } else { v });
        v += step;
    }
    out
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new("demo <chart>", &["x", "a", "b"]);
        t.push_row(vec![Some(0.1), Some(0.2), None]);
        t.push_row(vec![Some(1.0), Some(0.5), Some(0.4)]);
        t.push_row(vec![Some(10.0), Some(0.9), Some(0.8)]);
        t.meta("seed", 7);
        t.echo = "mode = \"both\"\n[sim]\ntrials = 3".into();
        t.series = vec![
            Series { column: 1, style: SeriesStyle::Line },
            Series { column: 2, style: SeriesStyle::Markers },
        ];
        t.markers = vec![Marker { label: "policy".into(), x: 2.0 }];
        t.log_x = true;
        t.y_range = Some((0.0, 1.0));
        t
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# demo <chart>");
        assert_eq!(lines[1], "# seed: 7");
        assert_eq!(lines[2], "# config:");
        assert_eq!(lines[3], "#   mode = \"both\"");
        assert_eq!(lines[6], "x,a,b");
        assert_eq!(lines[7], "0.1,0.2,");
        assert_eq!(lines[9], "10,0.9,0.8");
    }

    #[test]
    fn empty_table_has_header_and_metadata_only() {
        let mut t = ResultTable::new("empty", &["x", "y"]);
        t.meta("seed", 1);
        assert_eq!(t.to_csv(), "# empty\n# seed: 1\nx,y\n");
        assert!(t.to_svg().starts_with("<svg"));
    }

    #[test]
    fn svg_is_escaped_and_stable() {
        let svg = sample().to_svg();
        assert!(svg.contains("demo &lt;chart&gt;"));
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("<circle"));
        assert_eq!(svg, sample().to_svg());
    }

    #[test]
    fn tick_generation() {
        assert_eq!(ticks((0.1, 10.0), true), vec![0.1, 1.0, 10.0]);
        assert_eq!(ticks((0.0, 1.0), false), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(tick_label(0.6000000000000001), "0.6");
        assert_eq!(tick_label(10.0), "10");
    }

    #[test]
    fn io_error_carries_path() {
        let err = emit_csv(&sample(), Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
