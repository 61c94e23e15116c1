//! Minimal SVG line plots of aggregate series on a log-scaled y axis.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{HarnessError, Result};
use crate::output::{AggregateRow, METRICS};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_Y: f64 = 40.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

struct Series<'a> {
    name: &'a str,
    points: Vec<(f64, f64)>,
}

fn series<'a>(rows: &'a [AggregateRow], metric: usize) -> Vec<Series<'a>> {
    let mut out: Vec<Series> = Vec::new();
    for r in rows {
        let p = (r.iter as f64, r.mean[metric]);
        match out.iter_mut().find(|s| s.name == r.block) {
            Some(s) => s.points.push(p),
            None => out.push(Series {
                name: &r.block,
                points: vec![p],
            }),
        }
    }
    out
}

/// Renders the seed-mean of `metric` against iteration, one polyline and
/// legend entry per solver block. Non-positive values are clamped to the
/// smallest positive value in the plot.
pub fn render_plot_svg(rows: &[AggregateRow], metric: &str) -> Result<String> {
    let m = METRICS
        .iter()
        .position(|x| *x == metric)
        .ok_or_else(|| HarnessError::Config(format!("unknown metric `{metric}`")))?;
    if rows.is_empty() {
        return Err(HarnessError::Run("nothing to plot".into()));
    }
    let all = series(rows, m);
    let positive = all
        .iter()
        .flat_map(|s| &s.points)
        .map(|p| p.1)
        .filter(|v| *v > 0.0 && v.is_finite());
    let floor = positive.clone().fold(f64::INFINITY, f64::min);
    let floor = if floor.is_finite() { floor } else { 1.0 };
    let ymax = positive.fold(floor, f64::max);
    let ylo = floor.log10().floor();
    let yhi = ymax.log10().ceil().max(ylo + 1.0);
    let xs = all.iter().flat_map(|s| &s.points).map(|p| p.0);
    let xlo = xs.clone().fold(f64::INFINITY, f64::min);
    let mut xhi = xs.fold(f64::NEG_INFINITY, f64::max);
    if xhi <= xlo {
        xhi = xlo + 1.0;
    }
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let px = |x: f64| MARGIN_LEFT + (x - xlo) / (xhi - xlo) * plot_w;
    let py = |y: f64| {
        let ly = if y > 0.0 && y.is_finite() { y } else { floor }.log10();
        MARGIN_Y + (yhi - ly) / (yhi - ylo) * plot_h
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle">{metric} (seed mean, log scale)</text>"#,
        MARGIN_LEFT + plot_w / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="black" fill="none"><line x1="{l}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{l}" y1="{t}" x2="{l}" y2="{b}"/></g>"#,
        l = MARGIN_LEFT,
        r = MARGIN_LEFT + plot_w,
        t = MARGIN_Y,
        b = MARGIN_Y + plot_h,
    );
    let mut decade = ylo;
    while decade <= yhi {
        let y = MARGIN_Y + (yhi - decade) / (yhi - ylo) * plot_h;
        let _ = writeln!(
            svg,
            r#"<text class="tick" x="{}" y="{y:.2}" text-anchor="end">1e{decade}</text>"#,
            MARGIN_LEFT - 6.0
        );
        decade += 1.0;
    }
    let _ = writeln!(
        svg,
        r#"<text class="tick" x="{l}" y="{y}" text-anchor="middle">{xlo}</text><text class="tick" x="{r}" y="{y}" text-anchor="middle">{xhi}</text>"#,
        l = MARGIN_LEFT,
        r = MARGIN_LEFT + plot_w,
        y = MARGIN_Y + plot_h + 16.0,
    );

    for (i, s) in all.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<g class="series" data-block="{}"><polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            s.name,
            pts.join(" ")
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle class="marker" cx="{:.3}" cy="{:.3}" r="2" fill="{color}"/>"#,
                px(x),
                py(y)
            );
        }
        let _ = writeln!(svg, "</g>");
        let ly = MARGIN_Y + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN_RIGHT + 12.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend-entry"><line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text></g>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            s.name
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot_svg(rows: &[AggregateRow], metric: &str, path: &Path) -> Result<()> {
    let svg = render_plot_svg(rows, metric)?;
    std::fs::write(path, svg).map_err(|e| HarnessError::io(path, e))
}

/// Metrics drawn by default: the α⁻¹-averaged gap and both players'
/// infeasibility.
pub const DEFAULT_PLOTS: [&str; 3] = ["gap_invalpha", "infeas_p1", "infeas_p2"];

/// Writes `<metric>.svg` into `dir` for each default metric.
pub fn emit_default_plots(rows: &[AggregateRow], dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    DEFAULT_PLOTS
        .iter()
        .map(|m| {
            let path = dir.join(format!("{m}.svg"));
            emit_plot_svg(rows, m, &path).map(|_| path)
        })
        .collect()
}
