//! Deterministic SVG rendering of Stokes graphs.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::geometry::PlanarDomain;
use crate::quaddiff::{Family, StokesGraph};

const SIZE: f64 = 600.0;

struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
}

impl Frame {
    fn new(domain: &PlanarDomain) -> Self {
        let (x0, x1, y0, y1) = domain.bounding_box();
        let pad = 0.05 * (x1 - x0).max(y1 - y0);
        let span = (x1 - x0).max(y1 - y0) + 2.0 * pad;
        Frame {
            x0: x0 - pad,
            y1: y1 + pad,
            scale: SIZE / span,
        }
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        ((z.re - self.x0) * self.scale, (self.y1 - z.im) * self.scale)
    }

    fn path(&self, points: &[Complex64], close: bool) -> String {
        let mut d = String::new();
        for (i, &z) in points.iter().enumerate() {
            let (x, y) = self.map(z);
            let _ = write!(d, "{}{x:.3},{y:.3}", if i == 0 { "M" } else { " L" });
        }
        if close {
            d.push_str(" Z");
        }
        d
    }
}

/// Boundary in black, `Σ+` arcs solid, `Σ−` arcs dashed, zeros as dots. The
/// first line after the XML header is a version comment.
pub fn stokes_svg(domain: &PlanarDomain, graph: &StokesGraph) -> String {
    let frame = Frame::new(domain);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<!-- extremal-domains {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for curve in domain.components() {
        let _ = writeln!(
            out,
            "<path class=\"boundary\" d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
            frame.path(&curve.polygon(), true)
        );
    }
    for arc in &graph.arcs {
        let (class, extra) = match arc.family {
            Family::Plus => ("stokes-plus", ""),
            Family::Minus => ("stokes-minus", " stroke-dasharray=\"6,4\""),
        };
        let _ = writeln!(
            out,
            "<path class=\"{class}\" d=\"{}\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.2\"{extra}/>",
            frame.path(&arc.points, false)
        );
    }
    for zero in &graph.zeros {
        let (x, y) = frame.map(zero.z);
        let _ = writeln!(out, "<circle class=\"zero\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3.5\" fill=\"#c0392b\"/>");
    }
    out.push_str("</svg>\n");
    out
}
