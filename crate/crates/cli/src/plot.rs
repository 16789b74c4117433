//! Minimal SVG line charts.

use std::fmt::Write;

use okidyn_core::dynamics::Trajectory;
use okidyn_core::regimes::{Regime, RegimeReport, Thresholds};

pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

pub struct VLine {
    pub label: String,
    pub x: f64,
}

pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub series: Vec<Series>,
    pub vlines: Vec<VLine>,
    pub legend: bool,
}

const PANEL_W: f64 = 460.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 46.0;

pub fn regime_color(regime: Regime) -> &'static str {
    match regime {
        Regime::TechnologyDominated => "#1b7837",
        Regime::HumpShaped => "#e08214",
        Regime::WageDominated => "#b2182b",
        Regime::Boundary => "#777777",
    }
}

/// Roughly five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(x: f64) -> String {
    let s = format!("{:.4}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * lo.abs().max(1.0) {
        let pad = 0.05 * lo.abs().max(1e-3);
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn render_panel(out: &mut String, panel: &Panel, ox: f64, oy: f64) {
    let (x0, x1) = bounds(
        panel
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.0))
            .chain(panel.vlines.iter().map(|v| v.x)),
    );
    let (y0, y1) = bounds(panel.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let left = ox + MARGIN_L;
    let top = oy + MARGIN_T;
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| top + plot_h - (y - y0) / (y1 - y0) * plot_h;

    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">{}</text>"#,
        left + plot_w / 2.0,
        oy + 22.0,
        escape(&panel.title)
    );
    let _ = writeln!(
        out,
        r##"<rect x="{left:.1}" y="{top:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="#333"/>"##
    );
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#333"/><text x="{x:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"##,
            top + plot_h,
            top + plot_h + 5.0,
            top + plot_h + 18.0,
            tick_label(t)
        );
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{left:.1}" y2="{y:.1}" stroke="#333"/><line x1="{left:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"##,
            left - 5.0,
            left + plot_w,
            left - 8.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
        left + plot_w / 2.0,
        oy + PANEL_H - 8.0,
        escape(&panel.x_label)
    );

    for v in &panel.vlines {
        let x = sx(v.x);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.1}" y1="{top:.1}" x2="{x:.1}" y2="{:.1}" stroke="#555" stroke-dasharray="5,4"/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"##,
            top + plot_h,
            x + 3.0,
            top + 12.0,
            escape(&v.label)
        );
    }

    for s in &panel.series {
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.6" points="{}"/>"#,
            s.color,
            pts.join(" ")
        );
    }

    if panel.legend {
        let mut seen: Vec<(&str, &str)> = Vec::new();
        for s in &panel.series {
            if !seen.iter().any(|(l, _)| *l == s.label) {
                seen.push((&s.label, s.color));
            }
        }
        for (i, (label, color)) in seen.iter().enumerate() {
            let y = top + 14.0 + 15.0 * i as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
                left + plot_w - 150.0,
                left + plot_w - 130.0,
                left + plot_w - 125.0,
                y + 4.0,
                escape(label)
            );
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Lays panels out on a grid with `cols` columns.
pub fn render(panels: &[Panel], cols: usize) -> String {
    let rows = panels.len().div_ceil(cols);
    let width = PANEL_W * cols as f64;
    let height = PANEL_H * rows as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, panel) in panels.iter().enumerate() {
        let ox = PANEL_W * (i % cols) as f64;
        let oy = PANEL_H * (i / cols) as f64;
        render_panel(&mut out, panel, ox, oy);
    }
    out.push_str("</svg>\n");
    out
}

fn series(traj: &Trajectory, label: &str, color: &'static str, f: impl Fn(&okidyn_core::dynamics::TrajectoryPoint) -> f64) -> Series {
    Series {
        label: label.into(),
        color,
        points: traj.points.iter().map(|p| (p.t, f(p))).collect(),
    }
}

/// r(t), b(t), λ(t) and the two effects for a single run.
pub fn trajectory_svg(traj: &Trajectory) -> String {
    let beta = traj.config.beta;
    let panel = |title: &str, series: Vec<Series>, legend: bool| Panel {
        title: format!("{title} (beta = {beta})"),
        x_label: "t".into(),
        series,
        vlines: Vec::new(),
        legend,
    };
    render(
        &[
            panel("profit rate r(t)", vec![series(traj, "r", "#2166ac", |p| p.r)], false),
            panel("real wage b(t)", vec![series(traj, "b", "#2166ac", |p| p.b)], false),
            panel("spectral radius lambda(t)", vec![series(traj, "lambda", "#2166ac", |p| p.lambda)], false),
            panel(
                "technology and wage effects",
                vec![
                    series(traj, "G (technology)", "#1b7837", |p| p.g),
                    series(traj, "W (wage)", "#b2182b", |p| p.w),
                ],
                true,
            ),
        ],
        2,
    )
}

/// r(t) for every swept β, coloured by regime, and r(T) against β with the
/// critical elasticities marked.
pub fn sweep_svg(runs: &[Trajectory], reports: &[RegimeReport], thresholds: &Thresholds) -> String {
    let curves = runs
        .iter()
        .zip(reports)
        .map(|(traj, rep)| Series {
            label: rep.regime.to_string(),
            color: regime_color(rep.regime),
            points: traj.points.iter().map(|p| (p.t, p.r)).collect(),
        })
        .collect();
    let final_r = Series {
        label: "r(T)".into(),
        color: "#2166ac",
        points: runs
            .iter()
            .filter_map(|t| t.last().map(|p| (t.config.beta, p.r)))
            .collect(),
    };
    render(
        &[
            Panel {
                title: "profit-rate trajectories by beta".into(),
                x_label: "t".into(),
                series: curves,
                vlines: Vec::new(),
                legend: true,
            },
            Panel {
                title: "final profit rate r(T)".into(),
                x_label: "beta".into(),
                series: vec![final_r],
                vlines: vec![
                    VLine {
                        label: format!("beta_min {:.3}", thresholds.beta_min),
                        x: thresholds.beta_min,
                    },
                    VLine {
                        label: format!("beta_max {:.3}", thresholds.beta_max),
                        x: thresholds.beta_max,
                    },
                ],
                legend: false,
            },
        ],
        1,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use okidyn_core::dynamics::{simulate, SimConfig};

    #[test]
    fn tick_values_are_round() {
        assert_eq!(ticks(0.0, 10.0), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        let t = ticks(0.04, 0.081);
        assert!(t.len() >= 3 && t.iter().all(|x| (0.04..=0.081).contains(x)));
        assert_eq!(tick_label(0.30000000000000004), "0.3");
    }

    #[test]
    fn trajectory_chart_is_well_formed() {
        let traj = simulate(&SimConfig::table1()).unwrap();
        let svg = trajectory_svg(&traj);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 5);
        assert!(!svg.contains("NaN"));
    }
}
