//! SVG drawing of a weighted Δ_{3,n} with optional cut and potential overlays.

use std::fmt::Write;

use num_traits::Zero;

use crate::dual::{potential, DualNode, DualTopology};
use crate::error::{Error, Result};
use crate::rational::{format_q, to_f64};
use crate::simplex::{Cut, WeightFunction};

const SIDE: f64 = 600.0;
const MARGIN: f64 = 40.0;
const MAX_STROKE: f64 = 6.0;
const MIN_STROKE: f64 = 0.6;

#[derive(Clone, Copy, Default)]
pub struct Overlay<'a> {
    pub cut: Option<&'a Cut>,
    /// 0-based index `i` of the potential `Φ_{i+1}` to print on each face.
    pub potential: Option<usize>,
}

/// Terminal 1 bottom-left, terminal 2 bottom-right, terminal 3 on top.
fn position(coords: [f64; 3], n: f64) -> (f64, f64) {
    let h = SIDE * 3f64.sqrt() / 2.0;
    let corners = [(0.0, h), (SIDE, h), (SIDE / 2.0, 0.0)];
    let mut x = 0.0;
    let mut y = 0.0;
    for (c, &(cx, cy)) in coords.iter().zip(&corners) {
        x += c / n * cx;
        y += c / n * cy;
    }
    (x + MARGIN, y + MARGIN)
}

pub fn emit_svg(w: &WeightFunction, overlay: Overlay<'_>) -> Result<String> {
    if w.k() != 3 {
        return Err(Error::InvalidArgument(format!("drawing needs k = 3, got {}", w.k())));
    }
    let grid = w.grid();
    let n = w.n();
    let nf = f64::from(n);
    if let Some(p) = overlay.cut {
        if !grid.same_shape(p.grid()) {
            return Err(Error::Mismatch(3, n as usize, p.k(), p.n() as usize));
        }
    }
    if let Some(i) = overlay.potential {
        if i >= 3 {
            return Err(Error::InvalidArgument(format!("potential index {} out of range", i + 1)));
        }
    }
    let pos: Vec<(f64, f64)> = grid
        .points()
        .iter()
        .map(|x| {
            let c = x.coords();
            position([f64::from(c[0]), f64::from(c[1]), f64::from(c[2])], nf)
        })
        .collect();
    let max = w.weights().iter().map(to_f64).fold(0.0, f64::max);
    let width = SIDE + 2.0 * MARGIN;
    let height = SIDE * 3f64.sqrt() / 2.0 + 2.0 * MARGIN;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<g stroke-linecap="round">"#);
    for (e, &(a, b)) in grid.edge_pairs().iter().enumerate() {
        let wt = w.weight(e);
        let cut = overlay.cut.is_some_and(|p| p.is_cut(e));
        let color = if cut { "#d62728" } else { "#222222" };
        let (x1, y1) = pos[a];
        let (x2, y2) = pos[b];
        let _ = write!(out, r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{color}" "#);
        if wt.is_zero() {
            let _ = write!(out, r#"stroke-width="{MIN_STROKE:.2}" stroke-dasharray="4 3""#);
        } else {
            let s = MIN_STROKE + (MAX_STROKE - MIN_STROKE) * to_f64(&wt) / max;
            let _ = write!(out, r#"stroke-width="{s:.2}""#);
        }
        let _ = writeln!(out, "><title>{}</title></line>", format_q(&wt));
    }
    let _ = writeln!(out, "</g>");

    if let Some(p) = overlay.cut {
        const FILL: [&str; 4] = ["#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd"];
        let _ = writeln!(out, "<g>");
        for (v, &(x, y)) in pos.iter().enumerate() {
            let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{}"/>"#, FILL[p.label(v).min(3)]);
        }
        let _ = writeln!(out, "</g>");
    }

    if let Some(i) = overlay.potential {
        let topo = DualTopology::new(n)?;
        let size = (SIDE / nf / 6.0).clamp(4.0, 14.0);
        let _ = writeln!(
            out,
            r##"<g font-family="sans-serif" font-size="{size:.1}" text-anchor="middle" dominant-baseline="middle" fill="#1f3a93">"##
        );
        for face in topo.faces() {
            let c = face.centroid.map(|m| f64::from(m) / 3.0);
            let (x, y) = position(c, nf);
            let value = potential(i, DualNode::Face { centroid: face.centroid }, n)?;
            let _ = writeln!(out, r#"<text x="{x:.2}" y="{y:.2}">{}</text>"#, format_q(&value));
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
