//! Minimal SVG line plot of variable-error profiles.

use std::fmt::Write;

use super::report::{ExperimentReport, ProfilePoint, TaskSummary};

const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 2] = ["#1f77b4", "#d62728"];

struct Series<'a> {
    label: &'a str,
    points: Vec<(f64, f64)>,
}

fn profile_series<'a>(label: &'a str, p: &[ProfilePoint]) -> Series<'a> {
    Series {
        label,
        points: p.iter().map(|q| (q.along_mm, q.variable_error)).collect(),
    }
}

pub fn render_profile_svg(report: &ExperimentReport) -> String {
    let (series, xlabel) = match &report.summary {
        TaskSummary::TactileLocalization { profile, .. } => (
            vec![profile_series("variable error", profile)],
            "position along segment (mm)",
        ),
        TaskSummary::ModelComparison {
            single,
            triangulation,
            ..
        } => (
            vec![
                profile_series("single landmark", single),
                profile_series("triangulation", triangulation),
            ],
            "position along segment (mm)",
        ),
        _ => {
            let points = report
                .aggregates
                .iter()
                .enumerate()
                .map(|(i, a)| (i as f64, a.variable_error))
                .collect();
            (
                vec![Series {
                    label: "variable error",
                    points,
                }],
                "probe index",
            )
        }
    };
    render(&report.scenario.id, &series, xlabel, "variable error (mm)")
}

fn render(title: &str, series: &[Series<'_>], xlabel: &str, ylabel: &str) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= 0.0 {
        y1 = 1.0;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - y / y1 * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let (l, r, t, b) = (MARGIN, W - MARGIN, MARGIN, H - MARGIN);
    let _ = writeln!(
        s,
        r#"<polyline points="{l},{t} {l},{b} {r},{b}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#,
        W / 2.0,
        H - 15.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 15 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
    for (v, anchor, x, y) in [
        (x0, "middle", l, b + 16.0),
        (x1, "middle", r, b + 16.0),
        (0.0, "end", l - 6.0, b),
        (y1, "end", l - 6.0, t + 4.0),
    ] {
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" text-anchor="{anchor}" font-size="11">{v:.3}</text>"#
        );
    }
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            pts.join(" ")
        );
        let ly = t + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" font-size="12" fill="{color}">{}</text>"#,
            r - 120.0,
            escape(ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
