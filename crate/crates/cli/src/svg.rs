//! Minimal SVG plot of the solution curve: one polyline, axes, tick labels.
//! Self-contained (no scripts, fonts or external assets) and deterministic.

use std::path::Path;

use crate::CliError;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;
const TICKS: usize = 6;

pub fn render(points: &[(f64, f64)], title: &str) -> String {
    let (x_lo, x_hi) = padded_range(points.iter().map(|p| p.0));
    let (y_lo, y_hi) = padded_range(points.iter().map(|p| p.1));

    let x_of = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
    let y_of = |y: f64| HEIGHT - MARGIN_BOTTOM - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"monospace\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        MARGIN_TOP - 6.0,
        escape(title)
    ));

    // Axes.
    let x0 = x_of(x_lo);
    let x1 = x_of(x_hi);
    let y0 = y_of(y_lo);
    let y1 = y_of(y_hi);
    svg.push_str(&format!(
        "  <line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x1:.1}\" y2=\"{y0:.1}\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "  <line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x0:.1}\" y2=\"{y1:.1}\" stroke=\"black\"/>\n"
    ));

    for i in 0..TICKS {
        let frac = i as f64 / (TICKS - 1) as f64;
        let xv = x_lo + frac * (x_hi - x_lo);
        let yv = y_lo + frac * (y_hi - y_lo);
        let xp = x_of(xv);
        let yp = y_of(yv);
        svg.push_str(&format!(
            "  <line x1=\"{xp:.1}\" y1=\"{y0:.1}\" x2=\"{xp:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            y0 + 5.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{xp:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            y0 + 20.0,
            label(xv)
        ));
        svg.push_str(&format!(
            "  <line x1=\"{:.1}\" y1=\"{yp:.1}\" x2=\"{x0:.1}\" y2=\"{yp:.1}\" stroke=\"black\"/>\n",
            x0 - 5.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
            x0 - 9.0,
            yp + 4.0,
            label(yv)
        ));
    }

    svg.push_str("  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"");
    for (i, (x, y)) in points.iter().enumerate() {
        if i > 0 {
            svg.push(' ');
        }
        svg.push_str(&format!("{:.2},{:.2}", x_of(*x), y_of(*y)));
    }
    svg.push_str("\"/>\n</svg>\n");
    svg
}

pub fn write(path: &Path, points: &[(f64, f64)], title: &str) -> Result<(), CliError> {
    std::fs::write(path, render(points, title))
        .map_err(|err| CliError::Config(format!("cannot write {}: {err}", path.display())))
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    // Keep a visible span even for flat data.
    let pad = ((hi - lo) * 0.05).max(1e-12 + (hi.abs() + lo.abs()) * 1e-9);
    (lo - pad, hi + pad)
}

fn label(value: f64) -> String {
    if value == 0.0 {
        return "0".into();
    }
    let magnitude = value.abs();
    if (1e-3..1e4).contains(&magnitude) {
        let text = format!("{value:.3}");
        text.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{value:.2e}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
