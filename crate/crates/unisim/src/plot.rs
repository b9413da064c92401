//! Time-series plots of log columns as standalone SVG.
//!
//! [`Plot::build`] does all the layout and returns plain data; rendering it
//! to SVG is a straight serialisation, so the output is deterministic.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use unicycle_core::LogRecord;

use crate::csvlog::{column, is_numeric_column};
use crate::error::{Error, Result};
use crate::numfmt::sig;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 40.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub field: String,
    pub color: &'static str,
    /// Pixel coordinates.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tick {
    /// Pixel position along the axis.
    pub pos: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub t_range: [f64; 2],
    pub y_range: [f64; 2],
    pub series: Vec<Series>,
    pub x_ticks: Vec<Tick>,
    pub y_ticks: Vec<Tick>,
}

/// Nice tick step for a span divided into roughly `n` parts.
fn tick_step(span: f64, n: f64) -> f64 {
    let raw = span / n;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.0 {
        2.0
    } else if norm < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(range: [f64; 2], map: impl Fn(f64) -> f64) -> Vec<Tick> {
    let step = tick_step(range[1] - range[0], 5.0);
    let first = (range[0] / step).ceil() as i64;
    let last = (range[1] / step).floor() as i64;
    (first..=last)
        .map(|k| {
            let v = k as f64 * step;
            Tick { pos: map(v), label: sig(v, 6) }
        })
        .collect()
}

impl Plot {
    pub fn build(records: &[LogRecord], fields: &[String]) -> Result<Plot> {
        if let Some(bad) = fields.iter().find(|f| !is_numeric_column(f)) {
            return Err(Error::UnknownField(bad.clone()));
        }
        let (t0, t1) = match (records.first(), records.last()) {
            (Some(a), Some(b)) if b.t > a.t => (a.t, b.t),
            (Some(a), _) => (a.t, a.t + 1.0),
            _ => (0.0, 1.0),
        };
        let values: Vec<Vec<(f64, f64)>> = fields
            .iter()
            .map(|f| records.iter().map(|r| (r.t, column(r, f).expect("checked above"))).collect())
            .collect();
        let (mut lo, mut hi) = values
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, y)| (lo.min(y), hi.max(y)));
        if !(lo.is_finite() && hi.is_finite()) {
            (lo, hi) = (0.0, 0.0);
        }
        if hi - lo < 1e-12 * (1.0 + lo.abs()) {
            lo -= 1.0;
            hi += 1.0;
        }
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let px = |t: f64| MARGIN_LEFT + (t - t0) / (t1 - t0) * plot_w;
        let py = |y: f64| MARGIN_TOP + (hi - y) / (hi - lo) * plot_h;
        let series = fields
            .iter()
            .zip(values)
            .enumerate()
            .map(|(i, (f, pts))| Series {
                field: f.clone(),
                color: PALETTE[i % PALETTE.len()],
                points: pts.into_iter().map(|(t, y)| (px(t), py(y))).collect(),
            })
            .collect();
        Ok(Plot {
            t_range: [t0, t1],
            y_range: [lo, hi],
            series,
            x_ticks: ticks([t0, t1], px),
            y_ticks: ticks([lo, hi], py),
        })
    }

    pub fn to_svg(&self) -> String {
        let mut s = String::new();
        let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
        let (y0, y1) = (MARGIN_TOP, HEIGHT - MARGIN_BOTTOM);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(s, r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y1 - y0);
        for t in &self.x_ticks {
            let _ = writeln!(s, r##"<line x1="{p:.2}" y1="{y0}" x2="{p:.2}" y2="{y1}" stroke="#ddd"/>"##, p = t.pos);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#, t.pos, y1 + 16.0, t.label);
        }
        for t in &self.y_ticks {
            let _ = writeln!(s, r##"<line x1="{x0}" y1="{p:.2}" x2="{x1}" y2="{p:.2}" stroke="#ddd"/>"##, p = t.pos);
            let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 6.0, t.pos + 4.0, t.label);
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">t [s]</text>"#, (x0 + x1) / 2.0, HEIGHT - 6.0);
        for (i, series) in self.series.iter().enumerate() {
            let pts: Vec<String> = series.points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                series.color,
                pts.join(" ")
            );
            let ly = y0 + 14.0 + 18.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"/>"#,
                x1 + 10.0,
                x1 + 30.0,
                series.color
            );
            let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, x1 + 36.0, ly + 4.0, series.field);
        }
        s.push_str("</svg>\n");
        s
    }
}

pub fn plot_svg(records: &[LogRecord], fields: &[String], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let svg = Plot::build(records, fields)?.to_svg();
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_steps_are_round() {
        assert_eq!(tick_step(10.0, 5.0), 2.0);
        assert_eq!(tick_step(1.0, 5.0), 0.2);
        assert_eq!(tick_step(30.0, 5.0), 5.0);
        assert_eq!(tick_step(0.07, 5.0), 0.01);
    }
}
