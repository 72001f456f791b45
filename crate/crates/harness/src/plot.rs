//! Standalone SVG line plots with a log-scale y axis, built from trace CSVs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::output::SUMMARY_FILE;

/// Trace columns that get a plot.
pub const PLOTTED_METRICS: [&str; 3] = ["f", "grad_norm_2", "dist_sq_to_opt"];

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 45.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// A named sequence of `(t, value)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Reads column `metric` of a trace CSV, keeping positive finite values.
pub fn read_series(path: &Path, metric: &str) -> Result<Series> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = headers
        .iter()
        .position(|h| h == metric)
        .ok_or_else(|| HarnessError::Config(format!("{}: no column {metric}", path.display())))?;
    let t_col = headers.iter().position(|h| h == "t").unwrap_or(0);
    let mut points = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let (Some(t), Some(v)) = (rec.get(t_col), rec.get(col)) else {
            continue;
        };
        if let (Ok(t), Ok(v)) = (t.parse::<f64>(), v.parse::<f64>()) {
            if v > 0.0 && v.is_finite() {
                points.push((t, v));
            }
        }
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(Series { name, points })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders series on linear x and log10 y axes.
pub fn render_svg(title: &str, series: &[Series]) -> String {
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x_max, mut lo, mut hi) = (1.0f64, f64::INFINITY, f64::NEG_INFINITY);
    for &(t, v) in pts {
        x_max = x_max.max(t);
        lo = lo.min(v.log10());
        hi = hi.max(v.log10());
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    let (y_lo, mut y_hi) = (lo.floor(), hi.ceil());
    if y_hi <= y_lo {
        y_hi = y_lo + 1.0;
    }
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |t: f64| LEFT + plot_w * t / x_max;
    let sy = |v: f64| TOP + plot_h * (y_hi - v.log10()) / (y_hi - y_lo);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );
    // Decade grid lines and labels; thin out when the range is wide.
    let decades = (y_hi - y_lo) as i64;
    let stride = (decades / 12 + 1).max(1);
    let mut e = y_lo as i64;
    while e <= y_hi as i64 {
        let y = TOP + plot_h * (y_hi - e as f64) / (y_hi - y_lo);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">1e{e}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
        e += stride;
    }
    for k in 0..=4 {
        let t = x_max * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(t),
            TOP + plot_h + 18.0,
            t.round()
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">iteration</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 8.0
    );
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = s
            .points
            .iter()
            .map(|&(t, v)| format!("{:.2},{:.2}", sx(t), sy(v)))
            .collect();
        if !coords.is_empty() {
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            );
        }
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = LEFT + plot_w + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Trace CSVs in `dir`, sorted by file name.
pub fn trace_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|x| x == "csv")
                && p.file_name().is_some_and(|n| n != SUMMARY_FILE)
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Writes `<metric>.svg` into `dir` for every plotted metric, reading only
/// the trace CSVs already there.
pub fn regenerate_plots(dir: &Path) -> Result<Vec<PathBuf>> {
    let files = trace_files(dir)?;
    let mut written = Vec::new();
    for metric in PLOTTED_METRICS {
        let series = files
            .iter()
            .map(|f| read_series(f, metric))
            .collect::<Result<Vec<_>>>()?;
        let path = dir.join(format!("{metric}.svg"));
        fs::write(&path, render_svg(metric, &series))?;
        written.push(path);
    }
    Ok(written)
}
