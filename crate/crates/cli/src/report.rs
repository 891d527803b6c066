//! Convergence tables and plots.

use std::fmt::Write as _;

use stokes_perturb_core::harness::ConvergenceReport;

pub const CSV_HEADER: &str = "n,h,dofs,error_l2,rate,iters,residual,seconds";

/// One row per level. The `seconds` column is left empty unless
/// `timings` is set, so that reruns produce identical bytes.
pub fn csv(report: &ConvergenceReport, timings: bool) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for l in &report.levels {
        let rate = l.rate.map(|r| format!("{r}")).unwrap_or_default();
        let secs = if timings { format!("{}", l.stats.seconds) } else { String::new() };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            l.n, l.h, l.dofs, l.error, rate, l.stats.iterations, l.stats.residual, secs
        );
    }
    s
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Self-contained SVG of `log10(error)` against level index, one line per
/// series. Zero errors are drawn at the bottom of the axis.
pub fn svg(title: &str, series: &[(String, Vec<f64>)]) -> String {
    let positive: Vec<f64> = series.iter().flat_map(|(_, e)| e.iter().copied()).filter(|e| *e > 0.0).collect();
    let (mut lo, mut hi) = positive
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), e| (a.min(e.log10()), b.max(e.log10())));
    if !lo.is_finite() {
        (lo, hi) = (-1.0, 0.0);
    }
    let (lo, hi) = (lo.floor() - 1.0, hi.ceil().max(lo.floor()));
    let levels = series.iter().map(|(_, e)| e.len()).max().unwrap_or(1).max(2);
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let x = |k: usize| LEFT + pw * k as f64 / (levels - 1) as f64;
    let y = |e: f64| {
        let v = if e > 0.0 { e.log10().max(lo) } else { lo };
        TOP + ph * (hi - v) / (hi - lo)
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(title));
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    let mut d = lo as i64;
    while d as f64 <= hi {
        let yy = TOP + ph * (hi - d as f64) / (hi - lo);
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{yy:.2}" x2="{}" y2="{yy:.2}" stroke="#ddd"/>"##, LEFT + pw);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{d}</text>"#, LEFT - 6.0, yy + 4.0);
        d += 1;
    }
    for k in 0..levels {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{k}</text>"#, x(k), TOP + ph + 18.0);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">level</text>"#, LEFT + pw / 2.0, H - 10.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">error (L2)</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    for (c, (label, errors)) in series.iter().enumerate() {
        let color = COLORS[c % COLORS.len()];
        let pts: Vec<String> = errors.iter().enumerate().map(|(k, e)| format!("{:.2},{:.2}", x(k), y(*e))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, pts.join(" "));
        for (k, e) in errors.iter().enumerate() {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, x(k), y(*e));
        }
        let ly = TOP + 16.0 + 18.0 * c as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(label));
    }
    s.push_str("</svg>\n");
    s
}
