//! Hand-written SVG of mean cumulative regret with standard-error bands.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::path::Path;

use crate::config::Algorithm;
use crate::error::{HarnessError, Result};
use crate::summary::Summary;

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 230.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
/// Points per polyline; longer series are thinned evenly.
const MAX_POINTS: usize = 1000;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn legend_label(key: &str) -> String {
    key.parse::<Algorithm>()
        .map(|a| a.label().to_string())
        .unwrap_or_else(|_| key.to_string())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn picks(n: usize) -> Vec<usize> {
    if n <= MAX_POINTS {
        return (0..n).collect();
    }
    let mut idx: Vec<usize> = (0..MAX_POINTS).map(|i| i * (n - 1) / (MAX_POINTS - 1)).collect();
    idx.dedup();
    idx
}

struct Frame {
    t_min: f64,
    t_max: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, t: f64) -> f64 {
        let span = (self.t_max - self.t_min).max(1.0);
        LEFT + (t - self.t_min) / span * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        TOP + (1.0 - v / self.y_max) * (HEIGHT - TOP - BOTTOM)
    }
}

/// Screen coordinates of the mean polyline of column `col`.
pub fn polyline_points(summary: &Summary, col: usize) -> Vec<(f64, f64)> {
    let frame = frame(summary);
    let c = &summary.columns[col];
    picks(summary.t.len())
        .into_iter()
        .map(|i| (frame.x(summary.t[i] as f64), frame.y(c.mean[i])))
        .collect()
}

fn frame(summary: &Summary) -> Frame {
    let y_max = summary
        .columns
        .iter()
        .flat_map(|c| c.mean.iter().zip(&c.stderr).map(|(m, s)| m + s))
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    Frame {
        t_min: summary.t.first().copied().unwrap_or(0) as f64,
        t_max: summary.t.last().copied().unwrap_or(1) as f64,
        y_max: if y_max > 0.0 { y_max * 1.05 } else { 1.0 },
    }
}

fn nice_ticks(max: f64, count: usize) -> Vec<f64> {
    let raw = max / count as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    (0..)
        .map(|i| i as f64 * step)
        .take_while(|v| *v <= max + 1e-9 * step)
        .collect()
}

/// Renders the summary as an SVG document.
pub fn emit_plot(summary: &Summary) -> Result<String> {
    if summary.columns.is_empty() || summary.t.is_empty() {
        return Err(HarnessError::Input("summary has no algorithms or no rounds to plot".into()));
    }
    let frame = frame(summary);
    let idx = picks(summary.t.len());
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(svg, r#"<g class="axes" stroke="black">"#);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>"#);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#);
    let _ = writeln!(svg, "</g>");
    for v in nice_ticks(frame.y_max, 6) {
        let y = frame.y(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{v}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0
        );
    }
    for v in nice_ticks(frame.t_max, 5) {
        if v < frame.t_min {
            continue;
        }
        let x = frame.x(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{v}</text>"#,
            y0 + 5.0,
            y0 + 20.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text class="xlabel" x="{:.1}" y="{}" text-anchor="middle">t</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text class="ylabel" transform="translate(20,{:.1}) rotate(-90)" text-anchor="middle">cumulative regret</text>"#,
        (y0 + y1) / 2.0
    );

    for (k, c) in summary.columns.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut band = String::new();
        for &i in &idx {
            let _ = write!(band, "{:.2},{:.2} ", frame.x(summary.t[i] as f64), frame.y(c.mean[i] + c.stderr[i]));
        }
        for &i in idx.iter().rev() {
            let lower = (c.mean[i] - c.stderr[i]).max(0.0);
            let _ = write!(band, "{:.2},{:.2} ", frame.x(summary.t[i] as f64), frame.y(lower));
        }
        let _ = writeln!(
            svg,
            r#"<polygon class="band" points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            band.trim_end()
        );
        let line: Vec<String> = idx
            .iter()
            .map(|&i| format!("{:.2},{:.2}", frame.x(summary.t[i] as f64), frame.y(c.mean[i])))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="mean" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            line.join(" ")
        );
        let ly = TOP + 20.0 + 22.0 * k as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/><text x="{}" y="{}">{}</text></g>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&legend_label(&c.key))
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Reads a summary CSV and writes its plot.
pub fn plot_file(summary_csv: &Path, out_svg: &Path) -> Result<()> {
    let file = File::open(summary_csv).map_err(|e| HarnessError::io(summary_csv, e))?;
    let summary = Summary::read_csv(file)
        .map_err(|e| HarnessError::Input(format!("{}: {e}", summary_csv.display())))?;
    let svg = emit_plot(&summary)?;
    fs::write(out_svg, svg).map_err(|e| HarnessError::io(out_svg, e))
}
