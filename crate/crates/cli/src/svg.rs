//! Minimal SVG scatter plot.

use std::fmt::Write;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 2] = ["#c0392b", "#2471a3"];

/// One circle per point, scaled into a square frame. `groups` picks the
/// fill color of each point.
pub fn scatter(points: &[(f64, f64)], groups: Option<&[u8]>, title: &str) -> String {
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = |lo: f64, hi: f64| if hi - lo > 1e-12 { hi - lo } else { 1.0 };
    let (sx, sy) = (span(x0, x1), span(y0, y1));
    let inner = SIZE - 2.0 * MARGIN;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(out, "  <title>{}</title>", escape(title)).unwrap();
    writeln!(
        out,
        r##"  <rect x="{MARGIN}" y="{MARGIN}" width="{inner}" height="{inner}" fill="none" stroke="#888"/>"##
    )
    .unwrap();
    for (k, &(x, y)) in points.iter().enumerate() {
        let cx = MARGIN + (x - x0) / sx * inner;
        let cy = SIZE - MARGIN - (y - y0) / sy * inner;
        let g = groups.map_or(0, |g| g[k] as usize % COLORS.len());
        writeln!(
            out,
            r#"  <circle class="marker" cx="{cx:.3}" cy="{cy:.3}" r="3.5" fill="{}"/>"#,
            COLORS[g]
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
