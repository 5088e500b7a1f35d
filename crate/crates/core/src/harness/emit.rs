use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::{HarnessError, ScanResult, TrialReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Serialize)]
struct CsvRow {
    n: usize,
    p: f64,
    trials: usize,
    success_fraction: f64,
    stderr: f64,
}

const SCAN_HEADER: &str = "n,p,trials,success_fraction,stderr";

pub fn scan_csv(result: &ScanResult) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for c in &result.cells {
        w.serialize(CsvRow {
            n: c.n,
            p: c.p,
            trials: c.trials,
            success_fraction: c.success_fraction,
            stderr: c.stderr,
        })
        .expect("writing to memory");
    }
    let body =
        String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv is utf-8");
    format!("{SCAN_HEADER}\n{body}")
}

pub fn trials_csv(reports: &[TrialReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        w.serialize(r).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv is utf-8")
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializing results");
    s.push('\n');
    s
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];
const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 260.0;
const MARGIN: f64 = 50.0;

struct Axis {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, from: f64, to: f64) -> Self {
        let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Self { lo, hi, from, to }
    }

    fn map(&self, v: f64) -> f64 {
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }
}

fn frame(out: &mut String, x0: f64, title: &str, xlabel: &str, ylabel: &str) {
    let (y0, y1) = (MARGIN, MARGIN + PANEL_H);
    let _ = writeln!(
        out,
        r#"<rect x="{x0:.2}" y="{y0:.2}" width="{PANEL_W:.2}" height="{PANEL_H:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{title}</text>"#,
        x0 + PANEL_W / 2.0,
        y0 - 15.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{xlabel}</text>"#,
        x0 + PANEL_W / 2.0,
        y1 + 35.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12" transform="rotate(-90 {:.2} {:.2})">{ylabel}</text>"#,
        x0 - 30.0,
        y0 + PANEL_H / 2.0,
        x0 - 30.0,
        y0 + PANEL_H / 2.0
    );
}

/// Success curves against `ln p` on the left, crossings and their log-log
/// fit on the right.
pub fn scan_svg(result: &ScanResult) -> Result<String, HarnessError> {
    if result.cells.is_empty() {
        return Err(HarnessError::EmptyResults);
    }
    let width = 2.0 * PANEL_W + 3.0 * MARGIN + 40.0;
    let height = PANEL_H + 2.0 * MARGIN + 40.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let left = MARGIN + 20.0;
    frame(&mut out, left, "success probability", "ln p", "fraction");
    let ax = Axis::new(result.cells.iter().map(|c| c.p.ln()), left, left + PANEL_W);
    let ay = Axis {
        lo: 0.0,
        hi: 1.0,
        from: MARGIN + PANEL_H,
        to: MARGIN,
    };
    let half = ay.map(0.5);
    let _ = writeln!(
        out,
        r##"<line x1="{left:.2}" y1="{half:.2}" x2="{:.2}" y2="{half:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
        left + PANEL_W
    );
    let mut ns: Vec<usize> = result.cells.iter().map(|c| c.n).collect();
    ns.dedup();
    for (k, &n) in ns.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<(f64, f64)> = result
            .curve(n)
            .map(|c| (ax.map(c.p.ln()), ay.map(c.success_fraction)))
            .collect();
        if pts.len() > 1 {
            let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                path.join(" ")
            );
        }
        for (x, y) in &pts {
            let _ = writeln!(
                out,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" fill="{color}">n = {n}</text>"#,
            left + 8.0,
            MARGIN + 16.0 + 14.0 * k as f64
        );
    }

    let right = left + PANEL_W + MARGIN + 20.0;
    frame(
        &mut out,
        right,
        "half-probability crossing",
        "ln n",
        "ln p_c",
    );
    let found: Vec<(f64, f64)> = result
        .crossings
        .iter()
        .filter_map(|c| c.p_c.map(|p| ((c.n as f64).ln(), p.ln())))
        .collect();
    let bx = Axis::new(
        found.iter().map(|v| v.0),
        right + 15.0,
        right + PANEL_W - 15.0,
    );
    let by = Axis::new(
        found.iter().map(|v| v.1),
        MARGIN + PANEL_H - 15.0,
        MARGIN + 15.0,
    );
    for (x, y) in &found {
        let (px, py) = (bx.map(*x), by.map(*y));
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="6" height="6" fill="black"/>"#,
            px - 3.0,
            py - 3.0
        );
    }
    if let Some(fit) = result.fit {
        let line = |x: f64| (bx.map(x), by.map(fit.intercept + fit.slope * x));
        let (x1, y1) = line(bx.lo);
        let (x2, y2) = line(bx.hi);
        let _ = writeln!(
            out,
            r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#d62728" stroke-width="1.5"/>"##
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12">slope = {:.3} ± {:.3}</text>"#,
            right + 10.0,
            MARGIN + PANEL_H - 10.0,
            fit.slope,
            fit.slope_stderr
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    std::fs::write(path, contents).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Writes a scan in the given format.
pub fn emit(result: &ScanResult, format: Format, path: &Path) -> Result<(), HarnessError> {
    let text = match format {
        Format::Csv => scan_csv(result),
        Format::Json => to_json(result),
        Format::Svg => scan_svg(result)?,
    };
    write_file(path, &text)
}

pub fn emit_trials(
    reports: &[TrialReport],
    format: Format,
    path: &Path,
) -> Result<(), HarnessError> {
    let text = match format {
        Format::Csv => trials_csv(reports),
        Format::Json => to_json(reports),
        Format::Svg => {
            return Err(HarnessError::Config(
                "trial reports have no SVG form".into(),
            ))
        }
    };
    write_file(path, &text)
}
