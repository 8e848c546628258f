//! Minimal SVG line charts: trajectories, time series and log–log rates.

use std::fmt::Write as _;

use super::converge::RateReport;
use super::run::RunRecord;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub markers: bool,
}

impl Series {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Series { label: label.into(), points, markers: false }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_log: bool,
    pub equal_aspect: bool,
}

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in series.iter().flat_map(|s| &s.points) {
        if x.is_finite() && y.is_finite() {
            b = (b.0.min(x), b.1.max(x), b.2.min(y), b.3.max(y));
        }
    }
    if !b.0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
    let (x0, x1) = pad(b.0, b.1);
    let (y0, y1) = pad(b.2, b.3);
    (x0, x1, y0, y1)
}

/// Renders the series into a standalone SVG document.
pub fn render(chart: &Chart, series: &[Series]) -> String {
    let tf = |v: f64| if chart.log_log { v.log10() } else { v };
    let mapped: Vec<Series> = series
        .iter()
        .map(|s| Series {
            label: s.label.clone(),
            points: s.points.iter().map(|&(x, y)| (tf(x), tf(y))).collect(),
            markers: s.markers,
        })
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = bounds(&mapped);
    let (pw, ph) = (W - 2.0 * MARGIN, H - 2.0 * MARGIN);
    if chart.equal_aspect {
        let scale = ((x1 - x0) / pw).max((y1 - y0) / ph);
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        x0 = cx - 0.5 * scale * pw;
        x1 = cx + 0.5 * scale * pw;
        y0 = cy - 0.5 * scale * ph;
        y1 = cy + 0.5 * scale * ph;
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * ph;

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    let _ = writeln!(out, r#"<text x="{}" y="30" text-anchor="middle" font-size="16">{}</text>"#, W / 2.0, escape(&chart.title));
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#, W / 2.0, H - 15.0, escape(&chart.x_label));
    let _ = writeln!(
        out,
        r#"<text x="18" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 18 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(&chart.y_label)
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let tick = |v: f64| if chart.log_log { format!("1e{v:.2}") } else { format!("{v:.3}") };
        let _ = writeln!(out, r#"<text x="{:.1}" y="{}" text-anchor="middle" font-size="11">{}</text>"#, px(xv), H - MARGIN + 16.0, tick(xv));
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}" text-anchor="end" font-size="11">{}</text>"#, MARGIN - 4.0, py(yv) + 4.0, tick(yv));
    }
    for (k, s) in mapped.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        if s.markers {
            for p in &pts {
                let (x, y) = p.split_once(',').unwrap_or(("0", "0"));
                let _ = writeln!(out, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
            }
        }
        let ly = MARGIN + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{ly}" font-size="12" fill="{color}">{}</text>"#,
            W - MARGIN - 150.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Point-vortex paths `Y_i(t)` and, when present, centers `X_i(t)`.
pub fn trajectories(record: &RunRecord, boundary: Option<Vec<(f64, f64)>>) -> String {
    let mut series = Vec::new();
    if let Some(b) = boundary {
        series.push(Series::line("boundary", b));
    }
    for i in 0..record.n_vortices() {
        series.push(Series::line(format!("Y{}", i + 1), record.frames.iter().map(|f| (f.vortices[i].y.x, f.vortices[i].y.y)).collect()));
        let xs: Vec<(f64, f64)> = record.frames.iter().filter_map(|f| f.vortices[i].x.map(|x| (x.x, x.y))).collect();
        if !xs.is_empty() {
            series.push(Series::line(format!("X{}", i + 1), xs));
        }
    }
    let chart = Chart { title: format!("{}: trajectories", record.name), x_label: "x".into(), y_label: "y".into(), equal_aspect: true, ..Default::default() };
    render(&chart, &series)
}

/// `W₂_i(t)` for every patch.
pub fn w2_history(record: &RunRecord) -> String {
    let series: Vec<Series> = (0..record.n_vortices())
        .map(|i| {
            Series::line(format!("W2 patch {}", i + 1), record.frames.iter().filter_map(|f| f.vortices[i].w2.map(|w| (f.t, w))).collect())
        })
        .collect();
    let chart = Chart { title: format!("{}: W2 to the point vortices", record.name), x_label: "t".into(), y_label: "W2".into(), ..Default::default() };
    render(&chart, &series)
}

/// Log–log error maxima against ε.
pub fn rates(report: &RateReport) -> String {
    let pick = |label: &str, f: fn(&super::converge::SweepRow) -> f64| Series {
        label: label.into(),
        points: report.rows.iter().map(|r| (r.eps, f(r))).collect(),
        markers: true,
    };
    let series = vec![
        pick("max W2", |r| r.max_w2),
        pick("max |X-Y|", |r| r.max_center_error),
        pick("max |dX-dY|", |r| r.max_velocity_error),
        pick("max W1", |r| r.max_w1),
    ];
    let chart = Chart { title: format!("{}: rates in eps", report.name), x_label: "eps".into(), y_label: "error".into(), log_log: true, ..Default::default() };
    render(&chart, &series)
}

/// Polyline samples of a circle, for trajectory backgrounds.
pub fn circle_outline(cx: f64, cy: f64, r: f64) -> Vec<(f64, f64)> {
    (0..=128)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 128.0;
            (cx + r * t.cos(), cy + r * t.sin())
        })
        .collect()
}
