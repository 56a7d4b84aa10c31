//! Minimal SVG 1.1 writer for curve plots.

use crate::plane::{BBox, Point};
use std::fmt::Write;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;

pub const FIRST_STROKE: &str = "#1f5fa8";
pub const SECOND_STROKE: &str = "#c4572a";
pub const ENVELOPE_STROKE: &str = "#111111";
pub const SUPPORT_STROKE: &str = "#2b8a3e";

pub struct Plot {
    bbox: BBox,
    body: String,
}

impl Plot {
    pub fn new(bbox: BBox) -> Self {
        Self {
            bbox,
            body: String::new(),
        }
    }

    fn map(&self, p: Point) -> (f64, f64) {
        let b = &self.bbox;
        (
            WIDTH * (p.x - b.x_min) / b.width(),
            HEIGHT * (1.0 - (p.y - b.y_min) / b.height()),
        )
    }

    /// Draws `points` as polylines, breaking at non-finite points and at
    /// jumps longer than `max_jump` in plot units.
    pub fn curve(&mut self, points: &[Point], stroke: &str, width: f64, max_jump: f64) {
        let mut run: Vec<(f64, f64)> = Vec::new();
        for p in points {
            if !(p.x.is_finite() && p.y.is_finite()) {
                self.flush(&mut run, stroke, width);
                continue;
            }
            let q = self.map(*p);
            if let Some(last) = run.last() {
                if (q.0 - last.0).hypot(q.1 - last.1) > max_jump {
                    self.flush(&mut run, stroke, width);
                }
            }
            run.push(q);
        }
        self.flush(&mut run, stroke, width);
    }

    fn flush(&mut self, run: &mut Vec<(f64, f64)>, stroke: &str, width: f64) {
        if run.len() >= 2 {
            let pts: Vec<String> = run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                self.body,
                r#"<polyline fill="none" stroke="{stroke}" stroke-width="{width}" points="{}"/>"#,
                pts.join(" ")
            );
        }
        run.clear();
    }

    /// Unconnected markers, for point sets such as envelopes sampled per
    /// parameter.
    pub fn dots(&mut self, points: &[Point], fill: &str, radius: f64) {
        for p in points.iter().filter(|p| p.x.is_finite() && p.y.is_finite()) {
            let (x, y) = self.map(*p);
            let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{radius}" fill="{fill}"/>"#);
        }
    }

    /// Shades the axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rect(&mut self, x0: f64, x1: f64, y0: f64, y1: f64, fill: &str) {
        let (a, b) = self.map(Point::new(x0, y1));
        let (c, d) = self.map(Point::new(x1, y0));
        let _ = writeln!(
            self.body,
            r#"<rect x="{a:.2}" y="{b:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
            c - a,
            d - b
        );
    }

    pub fn finish(self) -> String {
        let b = &self.bbox;
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(
            out,
            r#"<defs><clipPath id="frame"><rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}"/></clipPath></defs>"#
        );
        let _ = writeln!(
            out,
            r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white" stroke="black"/>"#
        );
        let _ = writeln!(out, r#"<g clip-path="url(#frame)">"#);
        out.push_str(&self.body);
        let _ = writeln!(out, "</g>");
        let font = r#"font-family="sans-serif" font-size="11""#;
        let _ = writeln!(out, r#"<text x="3" y="{}" {font}>{}</text>"#, HEIGHT - 4.0, b.x_min);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" {font} text-anchor="end">{}</text>"#,
            WIDTH - 3.0,
            HEIGHT - 4.0,
            b.x_max
        );
        let _ = writeln!(out, r#"<text x="3" y="{}" {font}>{}</text>"#, HEIGHT - 16.0, b.y_min);
        let _ = writeln!(out, r#"<text x="3" y="13" {font}>{}</text>"#, b.y_max);
        out.push_str("</svg>\n");
        out
    }
}
