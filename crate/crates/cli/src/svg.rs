//! Minimal self-contained SVG line plots. Output bytes depend only on the input:
//! fixed canvas, fixed palette, coordinates printed with two decimals.

use std::fmt::Write as _;
use std::path::Path;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".into()
    } else if !(1e-3..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Data range padded so that constant data still spans a visible interval.
fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-12 * (1.0 + lo.abs()) {
        let pad = 0.5 * (1.0 + lo.abs()).min(1.0);
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

impl LinePlot {
    /// Non-finite points are dropped.
    pub fn render(&self, comment: Option<&str>) -> String {
        let finite = |p: &&(f64, f64)| p.0.is_finite() && p.1.is_finite();
        let all = || self.series.iter().flat_map(|s| s.points.iter().filter(finite));
        let (x0, x1) = span(all().map(|p| p.0));
        let (y0, y1) = span(all().map(|p| p.1));
        let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

        let mut out = String::new();
        if let Some(c) = comment {
            // `--` is not allowed inside XML comments
            let _ = writeln!(out, "<!-- {} -->", c.replace("--", "- -"));
        }
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(out, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        if !self.title.is_empty() {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="18" text-anchor="middle" font-size="13">{}</text>"#,
                LEFT + pw / 2.0,
                escape(&self.title)
            );
        }
        let _ = writeln!(out, r#"<g stroke="black" stroke-width="1" fill="none">"#);
        let _ = writeln!(out, r#"<line x1="{LEFT:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, TOP + ph, LEFT + pw, TOP + ph);
        let _ = writeln!(out, r#"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{:.2}"/>"#, TOP + ph);
        for k in 0..=TICKS {
            let t = k as f64 / TICKS as f64;
            let (px, py) = (LEFT + t * pw, TOP + ph - t * ph);
            let _ = writeln!(out, r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}"/>"#, TOP + ph, TOP + ph + 4.0);
            let _ = writeln!(out, r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT:.2}" y2="{py:.2}"/>"#, LEFT - 4.0);
        }
        let _ = writeln!(out, "</g>");
        for k in 0..=TICKS {
            let t = k as f64 / TICKS as f64;
            let (px, py) = (LEFT + t * pw, TOP + ph - t * ph);
            let _ = writeln!(
                out,
                r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + ph + 16.0,
                tick_label(x0 + t * (x1 - x0))
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 6.0,
                py + 4.0,
                tick_label(y0 + t * (y1 - y0))
            );
        }
        if !self.x_label.is_empty() {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                LEFT + pw / 2.0,
                HEIGHT - 10.0,
                escape(&self.x_label)
            );
        }
        if !self.y_label.is_empty() {
            let (cx, cy) = (16.0, TOP + ph / 2.0);
            let _ = writeln!(
                out,
                r#"<text x="{cx:.2}" y="{cy:.2}" text-anchor="middle" transform="rotate(-90 {cx:.2} {cy:.2})">{}</text>"#,
                escape(&self.y_label)
            );
        }
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<String> = s.points.iter().filter(finite).map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let y = TOP + 12.0 + 16.0 * i as f64;
            let x = LEFT + pw - 120.0;
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
                y - 4.0,
                x + 18.0,
                y - 4.0
            );
            let _ = writeln!(out, r#"<text x="{:.2}" y="{y:.2}">{}</text>"#, x + 24.0, escape(&s.label));
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Writes a plot of `series` with empty title and axis labels.
pub fn emit_svg_line_plot(series: &[Series], path: &Path) -> std::io::Result<()> {
    let plot = LinePlot { series: series.to_vec(), ..Default::default() };
    std::fs::write(path, plot.render(None))
}
