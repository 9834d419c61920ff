use std::fmt::Write as _;

use super::experiments::ThroughputRow;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

/// One named polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Line chart with a log-scaled x axis.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let pts = || series.iter().flat_map(|s| s.points.iter().copied());
    let x_min = pts()
        .map(|p| p.0)
        .filter(|x| *x > 0.0)
        .fold(f64::INFINITY, f64::min);
    let x_max = pts().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let y_max = pts().map(|p| p.1).fold(0.0, f64::max);
    let (lx0, lx1) = if x_min.is_finite() && x_max > x_min {
        (x_min.log10(), x_max.log10())
    } else {
        (0.0, 1.0)
    };
    let y_top = if y_max > 0.0 { y_max * 1.05 } else { 1.0 };
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x.max(x_min).log10() - lx0) / (lx1 - lx0) * plot_w;
    let sy = |y: f64| MARGIN_TOP + plot_h - y / y_top * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    );
    let (x0, y0, x1, y1) = (
        MARGIN_LEFT,
        MARGIN_TOP + plot_h,
        MARGIN_LEFT + plot_w,
        MARGIN_TOP,
    );
    let _ = writeln!(
        out,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>"#
    );
    // decade ticks on x
    let mut decade = 10f64.powf(lx0.floor());
    while decade <= 10f64.powf(lx1) * 1.0001 {
        if decade >= x_min * 0.9999 {
            let x = sx(decade);
            let _ = writeln!(
                out,
                r#"<line x1="{x:.1}" y1="{y0}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                y0 + 5.0,
                y0 + 18.0,
                decade
            );
        }
        decade *= 10.0;
    }
    for i in 0..=5 {
        let v = y_top * i as f64 / 5.0;
        let y = sy(v);
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{x0}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0,
            tick_label(v)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        let ly = MARGIN_TOP + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            x1 + 10.0,
            x1 + 30.0,
            x1 + 35.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn tick_label(v: f64) -> String {
    if v >= 100.0 || v == 0.0 {
        format!("{v:.0}")
    } else if v >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

type Bucket = (usize, f64, usize);

/// One series per (scenario, method); values at equal load counts are
/// averaged over timestamps.
fn series_by<F: Fn(&ThroughputRow) -> f64>(rows: &[ThroughputRow], value: F) -> Vec<Series> {
    // label -> (load count, running sum, samples)
    let mut sums: Vec<(String, Vec<Bucket>)> = Vec::new();
    for r in rows {
        let label = format!("{} {}", r.scenario, r.method);
        let idx = match sums.iter().position(|(l, _)| *l == label) {
            Some(i) => i,
            None => {
                sums.push((label, Vec::new()));
                sums.len() - 1
            }
        };
        let pts = &mut sums[idx].1;
        match pts.iter_mut().find(|p| p.0 == r.n_loads) {
            Some(p) => {
                p.1 += value(r);
                p.2 += 1;
            }
            None => pts.push((r.n_loads, value(r), 1)),
        }
    }
    sums.into_iter()
        .map(|(label, pts)| Series {
            label,
            points: pts
                .into_iter()
                .map(|(k, v, n)| (k as f64, v / n as f64))
                .collect(),
        })
        .collect()
}

/// Throughput (Tbps) against load count.
pub fn throughput_chart(rows: &[ThroughputRow]) -> String {
    line_chart(
        "Load vs throughput",
        "load count",
        "throughput (Tbps)",
        &series_by(rows, |r| r.throughput_gbps / 1000.0),
    )
}

/// Mean path utilization (%) against load count.
pub fn utilization_chart(rows: &[ThroughputRow]) -> String {
    line_chart(
        "Load vs mean path utilization",
        "load count",
        "utilization (%)",
        &series_by(rows, |r| r.mean_path_utilization * 100.0),
    )
}
