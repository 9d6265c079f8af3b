//! Report emission: pretty JSON (byte-stable across reruns with the same
//! seed), per-cell CSV, and a small hand-rolled SVG with ratio histograms
//! and the thresholding growth curve.

use std::fmt::Write as _;

use crate::counterexample::QgViolation;
use crate::error::Result;
use crate::harness::{RunReport, Status};

pub fn to_json(run: &RunReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(run)?;
    s.push('\n');
    Ok(s)
}

/// One row per (check, oracle, m, tau) cell.
pub fn to_csv(run: &RunReport) -> String {
    let mut out = String::from("check_id,oracle,part,m,tau,status,extremal,bound,instances\n");
    for r in &run.reports {
        let status = match &r.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped { .. } => "skipped",
        };
        if r.cells.is_empty() {
            let _ = writeln!(out, "{},{},,,,{status},,,", r.check_id, r.oracle);
        }
        for c in &r.cells {
            let bound = c.bound.map(|b| b.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{status},{},{},{}",
                r.check_id, r.oracle, c.part, c.m, c.tau, c.extremal, bound, c.instances
            );
        }
    }
    out
}

fn svg_histogram(out: &mut String, x0: f64, y0: f64, w: f64, h: f64, title: &str, values: &[f64]) {
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" font-family="monospace">{}</text>"#,
        x0,
        y0 - 4.0,
        title
    );
    if values.is_empty() {
        return;
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-12);
    const BINS: usize = 24;
    let mut bins = [0usize; BINS];
    for v in values {
        let mut b = ((v - lo) / span * BINS as f64) as usize;
        if b >= BINS {
            b = BINS - 1;
        }
        bins[b] += 1;
    }
    let peak = bins.iter().copied().max().unwrap_or(1).max(1) as f64;
    let bw = w / BINS as f64;
    for (i, count) in bins.iter().enumerate() {
        let bh = h * (*count as f64) / peak;
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#4878a8"/>"##,
            x0 + i as f64 * bw,
            y0 + h - bh,
            bw * 0.9,
            bh
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="9" font-family="monospace">[{lo:.4}, {hi:.4}]</text>"#,
        x0,
        y0 + h + 12.0
    );
}

fn svg_curve(out: &mut String, x0: f64, y0: f64, w: f64, h: f64, title: &str, pts: &[(f64, f64)]) {
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" font-family="monospace">{}</text>"#,
        x0,
        y0 - 4.0,
        title
    );
    if pts.len() < 2 {
        return;
    }
    let (xlo, xhi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (x, _)| {
            (a.min(*x), b.max(*x))
        });
    let (ylo, yhi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, y)| {
            (a.min(*y), b.max(*y))
        });
    let xs = (xhi - xlo).max(1e-12);
    let ys = (yhi - ylo).max(1e-12);
    let mut d = String::new();
    for (i, (x, y)) in pts.iter().enumerate() {
        let px = x0 + (x - xlo) / xs * w;
        let py = y0 + h - (y - ylo) / ys * h;
        let _ = write!(d, "{}{px:.2},{py:.2} ", if i == 0 { "" } else { " " });
    }
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#a84848" stroke-width="1.5"/>"##,
        d.trim()
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="9" font-family="monospace">x:[{xlo:.0},{xhi:.0}] y:[{ylo:.5},{yhi:.5}]</text>"#,
        x0,
        y0 + h + 12.0
    );
}

/// Histogram of extremal cell ratios per check, plus the thresholded-norm
/// growth trend when block data is supplied.
pub fn to_svg(run: &RunReport, qg: Option<&[QgViolation]>) -> String {
    let mut panels: Vec<(String, Vec<f64>)> = Vec::new();
    for r in &run.reports {
        let values: Vec<f64> = r
            .cells
            .iter()
            .map(|c| c.extremal)
            .filter(|v| v.is_finite())
            .collect();
        if !values.is_empty() {
            panels.push((format!("{} on {}", r.check_id, r.oracle), values));
        }
    }
    let curve: Option<Vec<(f64, f64)>> = qg.map(|qs| {
        qs.iter()
            .map(|q| (q.blocks as f64, q.analytic_lower_bound / q.vector_norm))
            .collect()
    });
    let rows = panels.len() + curve.is_some() as usize;
    let (pw, ph, margin) = (360.0, 90.0, 40.0);
    let height = margin + rows as f64 * (ph + 50.0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="440" height="{height:.0}" viewBox="0 0 440 {height:.0}">"#
    );
    let mut y = margin;
    for (title, values) in &panels {
        svg_histogram(&mut out, 40.0, y, pw, ph, title, values);
        y += ph + 50.0;
    }
    if let Some(pts) = curve {
        svg_curve(
            &mut out,
            40.0,
            y,
            pw,
            ph,
            "thresholded tail bound / vector norm by block count",
            &pts,
        );
    }
    out.push_str("</svg>\n");
    out
}
