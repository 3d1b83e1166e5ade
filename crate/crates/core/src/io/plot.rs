//! Static SVG plot of the three expectations against the pot.

use std::fmt::Write as _;
use std::path::Path;

use super::table::BranchTable;
use crate::error::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PotAxis {
    #[default]
    Linear,
    Log,
}

/// Roughly five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// Renders the expectation curves in trace order, so branches that fold back
/// in `P` show as multi-valued curves.
pub fn render_expectation_plot(table: &BranchTable, axis: PotAxis) -> Result<String> {
    let rows: Vec<_> = match axis {
        PotAxis::Linear => table.rows.iter().collect(),
        PotAxis::Log => {
            let kept: Vec<_> = table.rows.iter().filter(|r| r.pot > 0.0).collect();
            let dropped = table.rows.len() - kept.len();
            if dropped > 0 {
                log::warn!("log axis: dropped {dropped} points with P <= 0");
            }
            kept
        }
    };
    if rows.is_empty() {
        return Err(Error::Contract("nothing to plot".into()));
    }
    let px = |p: f64| match axis {
        PotAxis::Linear => p,
        PotAxis::Log => p.log10(),
    };
    let (x_lo, x_hi) = range(rows.iter().map(|r| px(r.pot)));
    let (y_lo, y_hi) = range(rows.iter().flat_map(|r| r.expectations));
    let sx = |v: f64| LEFT + (v - x_lo) / (x_hi - x_lo) * (WIDTH - LEFT - RIGHT);
    let sy = |v: f64| HEIGHT - BOTTOM - (v - y_lo) / (y_hi - y_lo) * (HEIGHT - TOP - BOTTOM);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>"#
    );
    for t in ticks(x_lo, x_hi) {
        let x = sx(t);
        let label = match axis {
            PotAxis::Linear => format!("{t}"),
            PotAxis::Log => format!("{}", 10f64.powf(t)),
        };
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{label}</text>"#,
            y0 + 5.0,
            y0 + 20.0
        );
    }
    for t in ticks(y_lo, y_hi) {
        let y = sy(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0,
            format!("{t:.3}")
        );
    }
    let xlabel = match axis {
        PotAxis::Linear => "P",
        PotAxis::Log => "P (log scale)",
    };
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">expectation</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    for (k, color) in COLORS.iter().enumerate() {
        let points: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", sx(px(r.pot)), sy(r.expectations[k])))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
    }
    for (k, color) in COLORS.iter().enumerate() {
        let y = TOP + 10.0 + 18.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">E{}</text>"#,
            x0 + 15.0,
            x0 + 40.0,
            x0 + 46.0,
            y + 4.0,
            k + 1
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_expectation_plot(table: &BranchTable, path: &Path, axis: PotAxis) -> Result<()> {
    let svg = render_expectation_plot(table, axis)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
