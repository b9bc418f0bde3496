//! Minimal SVG line chart: simulated mean rate vs N with markers, the
//! asymptote as a solid line and the standard deviation dashed.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::table::Row;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 48.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

struct Series<'a> {
    label: String,
    rows: Vec<&'a Row>,
}

fn group(rows: &[Row]) -> Vec<Series<'_>> {
    let mut order: Vec<String> = Vec::new();
    let mut by_label: BTreeMap<String, Vec<&Row>> = BTreeMap::new();
    for row in rows {
        let label = if row.model_params.is_empty() {
            row.model.clone()
        } else {
            format!("{} {}", row.model, row.model_params)
        };
        if !by_label.contains_key(&label) {
            order.push(label.clone());
        }
        by_label.entry(label).or_default().push(row);
    }
    order
        .into_iter()
        .map(|label| {
            let mut rows = by_label.remove(&label).unwrap_or_default();
            rows.sort_by_key(|r| r.n_branches);
            Series { label, rows }
        })
        .collect()
}

/// Round step (1, 2 or 5 times a power of ten) giving at most `max_ticks` intervals.
fn tick_step(span: f64, max_ticks: usize) -> f64 {
    let raw = span / max_ticks as f64;
    let base = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * base).find(|s| *s >= raw).unwrap_or(10.0 * base)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(points: &[(f64, f64)], color: &str, extra: &str) -> String {
    let coords: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{extra} points=\"{}\"/>\n",
        coords.join(" ")
    )
}

/// Renders the chart; `None` when there is nothing to draw.
pub fn render(rows: &[Row]) -> Option<String> {
    let series = group(rows);
    let xs: Vec<f64> = rows.iter().map(|r| r.n_branches as f64).collect();
    let ys: Vec<f64> = rows
        .iter()
        .flat_map(|r| [r.mean_rate, r.asymptote, r.std_rate])
        .flatten()
        .filter(|v| v.is_finite())
        .collect();
    if xs.is_empty() || ys.is_empty() {
        return None;
    }
    let (mut x_lo, mut x_hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if x_hi == x_lo {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    let y_max = ys.iter().copied().fold(0.0, f64::max);
    let y_step = tick_step(if y_max > 0.0 { y_max } else { 1.0 }, 8);
    let y_hi = (y_max / y_step).ceil().max(1.0) * y_step;
    let x_step = tick_step(x_hi - x_lo, 10).max(1.0);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + plot_h - y / y_hi * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"black\"/>"
    );

    let mut y = 0.0;
    while y <= y_hi + 1e-9 * y_hi {
        let py = sy(y);
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#dddddd\"/>\n<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            LEFT,
            LEFT + plot_w,
            LEFT - 6.0,
            py + 4.0,
            crate::table::fmt_sig9((y / y_step).round() * y_step)
        );
        y += y_step;
    }
    let mut x = (x_lo / x_step).ceil() * x_step;
    while x <= x_hi + 1e-9 {
        let px = sx(x);
        let _ = writeln!(
            svg,
            "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 18.0,
            x
        );
        x += x_step;
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">receive branches N</text>",
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        "<text transform=\"translate(16,{:.2}) rotate(-90)\" text-anchor=\"middle\">rate (bits/symbol)</text>",
        TOP + plot_h / 2.0
    );

    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts = |f: fn(&Row) -> Option<f64>| -> Vec<(f64, f64)> {
            s.rows
                .iter()
                .filter_map(|r| f(r).filter(|v| v.is_finite()).map(|v| (sx(r.n_branches as f64), sy(v))))
                .collect()
        };
        let mean = pts(|r| r.mean_rate);
        let asym = pts(|r| r.asymptote);
        let std = pts(|r| r.std_rate);
        if asym.len() > 1 {
            svg.push_str(&polyline(&asym, color, ""));
        }
        if std.len() > 1 {
            svg.push_str(&polyline(&std, color, " stroke-dasharray=\"5,4\""));
        }
        if mean.len() > 1 {
            svg.push_str(&polyline(&mean, color, " stroke-opacity=\"0.4\""));
        }
        for (px, py) in &mean {
            let _ = writeln!(svg, "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3.5\" fill=\"{color}\"/>");
        }
        let ly = TOP + 14.0 + 18.0 * k as f64;
        let lx = LEFT + plot_w + 12.0;
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"{color}\"/>\n<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\">{}</text>",
            lx,
            ly - 4.0,
            lx + 8.0,
            ly,
            escape(&s.label)
        );
    }
    let ly = TOP + 14.0 + 18.0 * series.len() as f64 + 8.0;
    let lx = LEFT + plot_w + 12.0;
    let _ = writeln!(
        svg,
        "<text x=\"{lx:.2}\" y=\"{ly:.2}\" font-size=\"10\">markers: simulated mean</text>\n<text x=\"{lx:.2}\" y=\"{:.2}\" font-size=\"10\">solid: asymptote</text>\n<text x=\"{lx:.2}\" y=\"{:.2}\" font-size=\"10\">dashed: std-dev</text>",
        ly + 14.0,
        ly + 28.0
    );
    svg.push_str("</svg>\n");
    Some(svg)
}
