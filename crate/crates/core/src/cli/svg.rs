//! Minimal SVG 1.1 line charts of scan results.
//!
//! One `<polyline>` per `α` series; the exact threshold, where present, is a
//! dashed `<path>`. Coordinates are rounded to two decimals so the bytes only
//! depend on the data.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::entropy::RenyiOrder;
use crate::scenarios::ScanResult;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let span = if self.x1 > self.x0 { self.x1 - self.x0 } else { 1.0 };
        LEFT + (v - self.x0) / span * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let span = if self.y1 > self.y0 { self.y1 - self.y0 } else { 1.0 };
        HEIGHT - BOTTOM - (v - self.y0) / span * (HEIGHT - TOP - BOTTOM)
    }
}

fn axis_label(parameter: &str) -> &str {
    match parameter {
        "d" => "dimension d",
        "theta" => "angle theta (rad)",
        "t" => "family parameter t",
        "alpha" => "order alpha",
        other => other,
    }
}

fn series_label(alpha: Option<RenyiOrder>) -> String {
    match alpha {
        Some(a) => format!("alpha = {a}"),
        None => "detected".into(),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the chart. Returns an error message for an empty scan.
pub fn render(result: &ScanResult) -> Result<String, String> {
    if result.records.is_empty() {
        return Err("cannot plot an empty scan".into());
    }
    let xs = result.records.iter().map(|r| r.parameter).filter(|x| x.is_finite());
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let ys = result
        .records
        .iter()
        .flat_map(|r| std::iter::once(r.detected.value()).chain(r.exact.map(|e| e.value())));
    let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    let frame = Frame {
        x0,
        x1,
        y0: ((lo * 20.0).floor() / 20.0).max(0.0),
        y1: ((hi * 20.0).ceil() / 20.0).min(1.0).max(((lo * 20.0).floor() + 1.0) / 20.0),
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(&result.metadata.name));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

    // Axes and ticks.
    let (bx, by) = (frame.x(x0), frame.y(frame.y0));
    let _ = writeln!(
        s,
        r#"<path d="M {bx:.2} {:.2} L {bx:.2} {by:.2} L {:.2} {by:.2}" stroke="black" fill="none"/>"#,
        frame.y(frame.y1),
        frame.x(x1)
    );
    for k in 0..=4 {
        let v = frame.y0 + (frame.y1 - frame.y0) * k as f64 / 4.0;
        let y = frame.y(v);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{v:.3}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for k in 0..=4 {
        let v = x0 + (x1 - x0) * k as f64 / 4.0;
        let x = frame.x(v);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            by + 16.0,
            trim_number(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#,
        frame.x(0.5 * (x0 + x1)),
        HEIGHT - 12.0,
        escape(axis_label(&result.metadata.parameter))
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.2})">visibility threshold</text>"#,
        0.5 * HEIGHT,
        0.5 * HEIGHT
    );

    // Exact reference, one point per parameter.
    let mut exact: Vec<(f64, f64)> = Vec::new();
    for r in &result.records {
        if let Some(e) = r.exact {
            if exact.last().map_or(true, |&(p, _)| p != r.parameter) {
                exact.push((r.parameter, e.value()));
            }
        }
    }
    let mut legend = Vec::new();
    if !exact.is_empty() {
        let d: Vec<String> = exact
            .iter()
            .enumerate()
            .map(|(i, &(p, v))| format!("{} {:.2} {:.2}", if i == 0 { "M" } else { "L" }, frame.x(p), frame.y(v)))
            .collect();
        let _ = writeln!(
            s,
            r#"<path class="exact" d="{}" stroke="black" stroke-dasharray="6 4" fill="none"/>"#,
            d.join(" ")
        );
        legend.push(("exact".to_string(), "black", true));
    }

    for (k, alpha) in result.alphas().into_iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = result
            .records
            .iter()
            .filter(|r| r.alpha == alpha)
            .map(|r| format!("{:.2},{:.2}", frame.x(r.parameter), frame.y(r.detected.value())))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" points="{}" stroke="{color}" stroke-width="2" fill="none"/>"#,
            pts.join(" ")
        );
        legend.push((series_label(alpha), color, false));
    }

    for (i, (label, color, dashed)) in legend.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let x = WIDTH - RIGHT + 15.0;
        let dash = if *dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"{dash}/>"#,
            x + 24.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
            x + 30.0,
            y + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn trim_number(v: f64) -> String {
    let t = format!("{v:.3}");
    let t = t.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".into() } else { t.into() }
}

/// Writes [`render`] output to `path`.
pub fn emit_svg(result: &ScanResult, path: &Path) -> io::Result<()> {
    let svg = render(result).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    std::fs::write(path, svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jointmeas::ThresholdRecord;
    use crate::qobj::Visibility;
    use crate::scenarios::ScanMetadata;

    fn scan(alphas: &[f64]) -> ScanResult {
        let mut records = Vec::new();
        for &a in alphas {
            for d in 2..5 {
                let v = Visibility::new(0.6 + 0.01 * d as f64).unwrap();
                records.push(ThresholdRecord::new(d as f64, Some(RenyiOrder::new(a).unwrap()), v, Some(v)));
            }
        }
        ScanResult {
            records,
            metadata: ScanMetadata {
                name: "test".into(),
                parameter: "d".into(),
                alphas: vec![],
                betas: vec![],
                grid: vec![],
                tol: 1e-9,
                seed: None,
            },
        }
    }

    #[test]
    fn one_polyline_per_series() {
        assert_eq!(render(&scan(&[0.5])).unwrap().matches("<polyline").count(), 1);
        let four = render(&scan(&[0.5, 0.7, 1.0, f64::INFINITY])).unwrap();
        assert_eq!(four.matches("<polyline").count(), 4);
        assert_eq!(four.matches(r#"class="exact""#).count(), 1);
        assert!(four.contains("alpha = inf"));
    }

    #[test]
    fn deterministic_and_rejects_empty() {
        let s = scan(&[0.5, 1.0]);
        assert_eq!(render(&s).unwrap(), render(&s).unwrap());
        let mut empty = s.clone();
        empty.records.clear();
        assert!(render(&empty).is_err());
    }
}
