//! CSV output: one header row, LF line endings, 9 significant digits.

use std::io::{self, Write};
use std::path::Path;

use crate::scenarios::{ScanResult, TightnessRow};

/// Formats `x` with 9 significant digits: fixed notation for magnitudes in
/// `[1e-5, 1e9)`, scientific otherwise. Infinity is written `inf`.
pub fn format_sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci[sci.find('e').map_or(sci.len(), |i| i + 1)..].parse().unwrap_or(0);
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

fn parameter_cell(name: &str, value: f64) -> String {
    if matches!(name, "d" | "case") && value.fract() == 0.0 {
        format!("{}", value as i64)
    } else {
        format_sig9(value)
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig9).unwrap_or_default()
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn into_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

/// Header: `<parameter>,alpha,beta,detected_visibility,exact_visibility,gap`,
/// plus `detected_noise,exact_noise` when `noise` is set.
pub fn header(result: &ScanResult, noise: bool) -> Vec<String> {
    let mut h: Vec<String> = [
        result.metadata.parameter.as_str(),
        "alpha",
        "beta",
        "detected_visibility",
        "exact_visibility",
        "gap",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    if noise {
        h.push("detected_noise".into());
        h.push("exact_noise".into());
    }
    h
}

pub fn write_scan<W: Write>(result: &ScanResult, out: W, noise: bool) -> io::Result<()> {
    let mut w = writer(out);
    w.write_record(header(result, noise)).map_err(into_io)?;
    for r in &result.records {
        let mut row = vec![
            parameter_cell(&result.metadata.parameter, r.parameter),
            r.alpha.map(|a| a.to_string()).unwrap_or_default(),
            r.beta().map(|b| b.to_string()).unwrap_or_default(),
            format_sig9(r.detected.value()),
            opt(r.exact.map(|e| e.value())),
            opt(r.gap),
        ];
        if noise {
            row.push(format_sig9(r.detected.noise()));
            row.push(opt(r.exact.map(|e| e.noise())));
        }
        w.write_record(&row).map_err(into_io)?;
    }
    w.flush()
}

/// Writes [`write_scan`] output to `path`.
pub fn emit_csv(result: &ScanResult, path: &Path, noise: bool) -> io::Result<()> {
    let file = std::fs::File::create(path)?;
    let mut buf = io::BufWriter::new(file);
    write_scan(result, &mut buf, noise)?;
    buf.flush()
}

pub fn write_tightness<W: Write>(rows: &[TightnessRow], out: W) -> io::Result<()> {
    let mut w = writer(out);
    w.write_record(["d", "chi", "criterion_visibility", "exact_visibility", "difference", "saturated"])
        .map_err(into_io)?;
    for r in rows {
        w.write_record([
            r.d.to_string(),
            format_sig9(r.chi),
            format_sig9(r.criterion.visibility.value()),
            format_sig9(r.exact.visibility.value()),
            format_sig9(r.difference()),
            (r.criterion.saturated || r.exact.saturated).to_string(),
        ])
        .map_err(into_io)?;
    }
    w.flush()
}
