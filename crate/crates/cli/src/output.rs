//! Deterministic file emission: CSV/JSON tables with shortest round-trip
//! float formatting, minimal static SVG plots, and atomic writes
//! (write-temp-then-rename).

use crate::config::TableFormat;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Writes to a sibling temp file, then renames into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// One value cell: floats use Rust's shortest round-trip decimal form.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Bool(bool),
    Int(i64),
    Str(String),
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Float(x) => write!(f, "{x}"),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Str(s) => write!(f, "{s}"),
        }
    }
}

/// A table with a fixed header, rendered as CSV (LF newlines) or as a JSON
/// array of objects.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: TableFormat) -> String {
        match format {
            TableFormat::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            TableFormat::Json => {
                let mut items = Vec::with_capacity(self.rows.len());
                for row in &self.rows {
                    let mut obj = serde_json::Map::new();
                    for (name, cell) in self.columns.iter().zip(row) {
                        let v = match cell {
                            Cell::Float(x) => serde_json::json!(x),
                            Cell::Bool(b) => serde_json::json!(b),
                            Cell::Int(i) => serde_json::json!(i),
                            Cell::Str(s) => serde_json::json!(s),
                        };
                        obj.insert((*name).to_string(), v);
                    }
                    items.push(serde_json::Value::Object(obj));
                }
                let mut text = serde_json::to_string_pretty(&items).expect("table serialization");
                text.push('\n');
                text
            }
        }
    }

    pub fn file_name(&self, stem: &str, format: TableFormat) -> String {
        match format {
            TableFormat::Csv => format!("{stem}.csv"),
            TableFormat::Json => format!("{stem}.json"),
        }
    }
}

/// Minimal static line plot. `log_y` plots log10 of the values clamped at
/// `floor`.
pub fn line_plot_svg(
    title: &str,
    x_label: &str,
    y_label: &str,
    points: &[(f64, f64)],
    log_y: bool,
) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const ML: f64 = 70.0;
    const MR: f64 = 20.0;
    const MT: f64 = 40.0;
    const MB: f64 = 50.0;
    let floor = 1e-16;

    let transformed: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| (x, if log_y { y.max(floor).log10() } else { y }))
        .collect();
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &transformed {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() || x1 <= x0 {
        x0 = 0.0;
        x1 = 1.0;
    }
    if !y0.is_finite() || y1 <= y0 {
        y0 -= 0.5;
        y1 = y0 + 1.0;
    }
    let px = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let py = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);

    let mut path = String::new();
    for (i, &(x, y)) in transformed.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        path.push_str(&format!("{cmd}{:.2} {:.2} ", px(x), py(y)));
    }

    let y_axis_label = if log_y {
        format!("log10({y_label})")
    } else {
        y_label.to_string()
    };
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\" ",
            "font-family=\"monospace\" font-size=\"12\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<text x=\"{tx}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{title}</text>\n",
            "<rect x=\"{ml}\" y=\"{mt}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"black\"/>\n",
            "<text x=\"{tx}\" y=\"{xl_y}\" text-anchor=\"middle\">{x_label}</text>\n",
            "<text x=\"16\" y=\"{yl_y}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {yl_y})\">{y_label}</text>\n",
            "<text x=\"{ml}\" y=\"{xt_y}\" text-anchor=\"middle\">{x0}</text>\n",
            "<text x=\"{xr}\" y=\"{xt_y}\" text-anchor=\"middle\">{x1}</text>\n",
            "<text x=\"{ylx}\" y=\"{yb}\" text-anchor=\"end\">{y0}</text>\n",
            "<text x=\"{ylx}\" y=\"{yt}\" text-anchor=\"end\">{y1}</text>\n",
            "<path d=\"{path}\" fill=\"none\" stroke=\"#1965b0\" stroke-width=\"1.5\"/>\n",
            "</svg>\n"
        ),
        w = W,
        h = H,
        tx = (ML + W - MR) / 2.0,
        title = title,
        ml = ML,
        mt = MT,
        pw = W - ML - MR,
        ph = H - MT - MB,
        x_label = x_label,
        y_label = y_axis_label,
        xl_y = H - 12.0,
        yl_y = (MT + H - MB) / 2.0,
        xt_y = H - MB + 16.0,
        x0 = format_tick(x0),
        x1 = format_tick(x1),
        xr = W - MR,
        ylx = ML - 6.0,
        yb = H - MB + 4.0,
        yt = MT + 4.0,
        y0 = format_tick(y0),
        y1 = format_tick(y1),
        path = path.trim_end(),
    )
}

fn format_tick(x: f64) -> String {
    format!("{x:.4}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_shortest_round_trip_floats() {
        let mut t = Table::new(vec!["t", "value", "ok"]);
        t.push(vec![
            Cell::Float(0.1),
            Cell::Float(1.0 / 3.0),
            Cell::Bool(true),
        ]);
        let text = t.render(TableFormat::Csv);
        assert_eq!(text, "t,value,ok\n0.1,0.3333333333333333,true\n");
        for field in text.lines().nth(1).unwrap().split(',').take(2) {
            let x: f64 = field.parse().unwrap();
            let again = format!("{x}");
            assert_eq!(again, field);
        }
    }

    #[test]
    fn json_table_round_trips() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Cell::Int(3), Cell::Float(2.5)]);
        let text = t.render(TableFormat::Json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v[0]["a"], 3);
        assert_eq!(v[0]["b"], 2.5);
    }

    #[test]
    fn svg_is_deterministic() {
        let pts = [(0.0, 1.0), (1.0, 0.1), (2.0, 0.01)];
        let a = line_plot_svg("decay", "t", "magnitude", &pts, true);
        let b = line_plot_svg("decay", "t", "magnitude", &pts, true);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("path"));
    }

    #[test]
    fn atomic_write_creates_parents() {
        let dir = std::env::temp_dir().join(format!("qage-test-{}", std::process::id()));
        let path = dir.join("nested/file.txt");
        write_atomic(&path, b"hello").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"hello");
        fs::remove_dir_all(&dir).unwrap();
    }
}
