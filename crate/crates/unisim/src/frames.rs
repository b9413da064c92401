//! Animation frames: one SVG per selected log record showing the wheel, the
//! saddle rod and the forces acting on them.
//!
//! The camera follows the wheel, so the hub is always at the same pixel.
//! Forces are drawn as horizontal arrows from the hub, [`FORCE_SCALE`] px per
//! newton. Torques are drawn as arcs around the hub sweeping
//! [`TORQUE_SCALE`] rad per N·m (capped at [`MAX_SWEEP`]); positive torques
//! sweep clockwise on screen.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use unicycle_core::{LogRecord, Params};

use crate::error::{Error, Result};

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 480.0;
/// Pixels per metre.
pub const PX_PER_M: f64 = 150.0;
/// Pixels per newton.
pub const FORCE_SCALE: f64 = 0.4;
/// Radians of arc per N·m.
pub const TORQUE_SCALE: f64 = 0.01;
pub const MAX_SWEEP: f64 = 1.5 * std::f64::consts::PI;
const GROUND_Y: f64 = 400.0;
const HUB_X: f64 = WIDTH / 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Arrow {
    pub label: &'static str,
    pub from: (f64, f64),
    pub to: (f64, f64),
    pub color: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub label: &'static str,
    pub center: (f64, f64),
    pub radius: f64,
    /// Signed sweep in radians; positive is clockwise on screen.
    pub sweep: f64,
    pub start: (f64, f64),
    pub end: (f64, f64),
    pub color: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameGeometry {
    pub t: f64,
    pub ground_y: f64,
    pub hub: (f64, f64),
    pub wheel_radius: f64,
    /// Hub to the top of the saddle.
    pub rod: ((f64, f64), (f64, f64)),
    pub com: (f64, f64),
    pub fallen: bool,
    pub arrows: Vec<Arrow>,
    pub arcs: Vec<Arc>,
}

impl FrameGeometry {
    pub fn new(r: &LogRecord, p: &Params) -> Self {
        let wheel_radius = p.r_w * PX_PER_M;
        let hub = (HUB_X, GROUND_Y - wheel_radius);
        let (s, c) = r.state.theta.sin_cos();
        let along = |len: f64| (hub.0 + s * len * PX_PER_M, hub.1 - c * len * PX_PER_M);

        let f = &r.forces;
        let arrows = [("F_W_mot", f.f_w_mot, "#1f77b4"), ("F_W_g", f.f_w_g, "#2ca02c"), ("F_W", f.f_w, "#d62728")]
            .into_iter()
            .enumerate()
            .filter(|(_, (_, value, _))| *value != 0.0)
            .map(|(i, (label, value, color))| {
                let y = hub.1 + 8.0 * (i as f64 - 1.0);
                Arrow { label, from: (hub.0, y), to: (hub.0 + value * FORCE_SCALE, y), color }
            })
            .collect();

        let arcs = [("tau_S_g", f.tau_s_g, "#9467bd"), ("tau_S_W", f.tau_s_w, "#8c564b"), ("tau_S", f.tau_s, "#ff7f0e")]
            .into_iter()
            .enumerate()
            .filter(|(_, (_, value, _))| *value != 0.0)
            .map(|(i, (label, value, color))| {
                let radius = wheel_radius + 12.0 + 10.0 * i as f64;
                let sweep = (value * TORQUE_SCALE).clamp(-MAX_SWEEP, MAX_SWEEP);
                // Arcs start straight above the hub.
                let point = |a: f64| (hub.0 + radius * a.sin(), hub.1 - radius * a.cos());
                Arc { label, center: hub, radius, sweep, start: point(0.0), end: point(sweep), color }
            })
            .collect();

        FrameGeometry {
            t: r.t,
            ground_y: GROUND_Y,
            hub,
            wheel_radius,
            rod: (hub, along(p.r_s)),
            com: along(p.r_com),
            fallen: r.uni_loc == unicycle_core::UnicycleLocation::Fallen,
            arrows,
            arcs,
        }
    }

    pub fn to_svg(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<defs><marker id="head" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" orient="auto-start-reverse"><path d="M0,0 L10,5 L0,10 z" fill="context-stroke"/></marker></defs>"#
        );
        let _ = writeln!(s, r#"<line x1="0" y1="{g}" x2="{WIDTH}" y2="{g}" stroke="black"/>"#, g = self.ground_y);
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="#333" stroke-width="3"/>"##,
            self.hub.0, self.hub.1, self.wheel_radius
        );
        let ((ax, ay), (bx, by)) = self.rod;
        let rod_color = if self.fallen { "#d62728" } else { "#333" };
        let _ = writeln!(
            s,
            r#"<line x1="{ax:.2}" y1="{ay:.2}" x2="{bx:.2}" y2="{by:.2}" stroke="{rod_color}" stroke-width="4"/>"#
        );
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="6" fill="black"/>"#, self.com.0, self.com.1);
        for a in &self.arrows {
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="2" marker-end="url(#head)"><title>{}</title></line>"#,
                a.from.0, a.from.1, a.to.0, a.to.1, a.color, a.label
            );
        }
        for a in &self.arcs {
            let large = u8::from(a.sweep.abs() > std::f64::consts::PI);
            let clockwise = u8::from(a.sweep > 0.0);
            let _ = writeln!(
                s,
                r#"<path d="M{:.2},{:.2} A{r:.2},{r:.2} 0 {large} {clockwise} {:.2},{:.2}" fill="none" stroke="{}" stroke-width="2" marker-end="url(#head)"><title>{}</title></path>"#,
                a.start.0, a.start.1, a.end.0, a.end.1, a.color, a.label, r = a.radius
            );
        }
        let _ = writeln!(s, r#"<text x="10" y="20">t = {:.3} s</text>"#, self.t);
        s.push_str("</svg>\n");
        s
    }
}

/// Writes every `every_n`-th record as `frame_NNNNNN.svg` into `dir`.
pub fn render_frames(
    records: &[LogRecord],
    p: &Params,
    every_n: usize,
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for (i, r) in records.iter().enumerate().step_by(every_n.max(1)) {
        let path = dir.join(format!("frame_{i:06}.svg"));
        fs::write(&path, FrameGeometry::new(r, p).to_svg()).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
