//! File writers for the CLI: deterministic sample JSON (17 significant-digit
//! floats), CSV grids, and a minimal SVG heatmap renderer.

use elliptic_dpp::dpp::Configuration;
use serde::Serialize;
use std::fmt::Write as _;

/// Machine-readable verify report, serialized with serde.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub suite: String,
    pub seed: u64,
    pub wall_time: f64,
    pub pass: bool,
    pub cases: Vec<CaseReport>,
}

#[derive(Debug, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl RunReport {
    pub fn from_suite(report: &elliptic_dpp::suites::SuiteReport, wall_time: f64) -> Self {
        RunReport {
            suite: report.suite.to_string(),
            seed: report.seed,
            wall_time,
            pass: report.passed(),
            cases: report
                .cases
                .iter()
                .map(|c| CaseReport {
                    name: c.name.clone(),
                    residual: c.residual,
                    tolerance: c.tolerance,
                    pass: c.pass,
                })
                .collect(),
        }
    }
}

/// 17-significant-digit float form used throughout the sample schema; parses
/// back to the identical f64.
fn fmt_float(value: f64) -> String {
    format!("{value:.16e}")
}

/// Sample-file schema:
/// `{"family": ..., "n": ..., "length": ..., "width": ..., "seed": ...,
///   "configurations": [[[x,y],...], ...]}`.
pub fn sample_json(
    family: &str,
    n: usize,
    length: f64,
    width: f64,
    seed: u64,
    configurations: &[Configuration],
) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\n  \"family\": \"{family}\",\n  \"n\": {n},\n  \"length\": {},\n  \"width\": {},\n  \"seed\": {seed},\n  \"configurations\": [",
        fmt_float(length),
        fmt_float(width),
    );
    for (i, config) in configurations.iter().enumerate() {
        let sep = if i == 0 { "" } else { "," };
        let _ = write!(out, "{sep}\n    [");
        for (j, p) in config.points().iter().enumerate() {
            let sep = if j == 0 { "" } else { ", " };
            let _ = write!(out, "{sep}[{}, {}]", fmt_float(p.re), fmt_float(p.im));
        }
        let _ = write!(out, "]");
    }
    out.push_str("\n  ]\n}\n");
    out
}

/// CSV grid, header `x,y,value`, row-major with x fastest.
pub fn csv_grid(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("x,y,value\n");
    for (x, y, v) in rows {
        let _ = writeln!(out, "{},{},{}", fmt_float(*x), fmt_float(*y), fmt_float(*v));
    }
    out
}

/// Two-column CSV for scan tables.
pub fn csv_scan(header: (&str, &str), rows: &[(f64, f64)]) -> String {
    let mut out = format!("{},{}\n", header.0, header.1);
    for (a, b) in rows {
        let _ = writeln!(out, "{},{}", fmt_float(*a), fmt_float(*b));
    }
    out
}

/// Static SVG heatmap of an `nx × ny` grid of nonnegative values (row-major,
/// x fastest); a plotting convenience, not an interface.
pub fn svg_heatmap(nx: usize, ny: usize, values: &[f64], title: &str) -> String {
    assert_eq!(values.len(), nx * ny);
    let max = values.iter().cloned().fold(f64::MIN_POSITIVE, f64::max);
    let cell = 6usize;
    let (width, height) = (nx * cell, ny * cell + 18);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n<text x=\"4\" y=\"12\" font-size=\"10\" font-family=\"monospace\">{title}</text>\n"
    );
    for iy in 0..ny {
        for ix in 0..nx {
            let v = (values[iy * nx + ix] / max).clamp(0.0, 1.0);
            let (r, g, b) = color_ramp(v);
            // y axis points up
            let ypix = 18 + (ny - 1 - iy) * cell;
            let _ = writeln!(
                out,
                "<rect x=\"{}\" y=\"{ypix}\" width=\"{cell}\" height=\"{cell}\" fill=\"rgb({r},{g},{b})\"/>",
                ix * cell
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn color_ramp(v: f64) -> (u8, u8, u8) {
    // dark blue -> teal -> yellow
    let stops = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let t = v.clamp(0.0, 1.0) * (stops.len() - 1) as f64;
    let i = (t as usize).min(stops.len() - 2);
    let f = t - i as f64;
    let mix = |a: f64, b: f64| (a + (b - a) * f) as u8;
    (
        mix(stops[i].0, stops[i + 1].0),
        mix(stops[i].1, stops[i + 1].1),
        mix(stops[i].2, stops[i + 1].2),
    )
}
