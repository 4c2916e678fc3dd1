//! SVG snapshots of one rotation angle: anchors as dots, labels active at
//! that angle as rectangles rotated about their anchors.
//!
//! The map frame rotates clockwise as alpha grows while labels stay
//! horizontal on screen, so in map coordinates a label's rectangle appears
//! rotated counterclockwise by alpha. Corners are rotated explicitly and the
//! y axis is flipped in the arithmetic; the output uses no SVG transforms.

use rotlabel_core::model::{Instance, RotationLabeling};

pub fn svg_snapshot(inst: &Instance, phi: &RotationLabeling, alpha: f64) -> String {
    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for l in inst.labels() {
        let r = l.reach();
        min_x = min_x.min(l.anchor.x - r);
        min_y = min_y.min(l.anchor.y - r);
        max_x = max_x.max(l.anchor.x + r);
        max_y = max_y.max(l.anchor.y + r);
    }
    if inst.is_empty() {
        (min_x, min_y, max_x, max_y) = (0.0, 0.0, 1.0, 1.0);
    }
    let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
    let pad = 0.04 * span;
    let width = max_x - min_x + 2.0 * pad;
    let height = max_y - min_y + 2.0 * pad;
    // World-to-viewport: translate and flip y so north stays up.
    let vx = |x: f64| x - min_x + pad;
    let vy = |y: f64| max_y - y + pad;
    let stroke = 0.004 * span;
    let dot = 0.008 * span;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {:.6} {:.6}\">\n",
        width, height
    ));
    let (sin, cos) = alpha.sin_cos();
    for l in inst.labels() {
        let active = phi
            .active_opt(l.id)
            .map_or(false, |set| set.contains(alpha));
        if !active {
            continue;
        }
        let (ox, oy) = l.corner.offset(l.width, l.height);
        let corners = [
            (ox, oy),
            (ox + l.width, oy),
            (ox + l.width, oy + l.height),
            (ox, oy + l.height),
        ];
        let pts: Vec<String> = corners
            .iter()
            .map(|&(cx, cy)| {
                let rx = l.anchor.x + cx * cos - cy * sin;
                let ry = l.anchor.y + cx * sin + cy * cos;
                format!("{:.6},{:.6}", vx(rx), vy(ry))
            })
            .collect();
        out.push_str(&format!(
            "<polygon points=\"{}\" fill=\"#4a90d9\" fill-opacity=\"0.35\" stroke=\"#1c5a96\" stroke-width=\"{:.6}\"",
            pts.join(" "),
            stroke
        ));
        match &l.name {
            Some(name) => out.push_str(&format!(">\n<title>{}</title>\n</polygon>\n", escape(name))),
            None => out.push_str("/>\n"),
        }
    }
    for l in inst.labels() {
        out.push_str(&format!(
            "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" fill=\"#222222\"/>\n",
            vx(l.anchor.x),
            vy(l.anchor.y),
            dot
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
