use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::tvvar::EfficiencyPath;

pub const PLOT_WIDTH: f64 = 800.0;
pub const PLOT_HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

fn bands(path: &EfficiencyPath) -> Result<(&[f64], &[f64])> {
    match (&path.band_lower, &path.band_upper) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(Error::invalid("plot data needs a path with bootstrap bands")),
    }
}

/// Long format `date, series, value` with series `zeta`, `lower`, `upper`:
/// three rows per period, empty value where ζₜ is undefined.
pub fn plot_csv<W: Write>(path: &EfficiencyPath, out: W) -> Result<()> {
    let (lower, upper) = bands(path)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "series", "value"])?;
    for t in 0..path.len() {
        let date = path
            .dates
            .get(t)
            .map(|d| d.to_string())
            .unwrap_or_else(|| t.to_string());
        let zeta = path.zeta[t].map(|v| format!("{v}")).unwrap_or_default();
        w.write_record([date.as_str(), "zeta", zeta.as_str()])?;
        w.write_record([date.as_str(), "lower", &format!("{}", lower[t])])?;
        w.write_record([date.as_str(), "upper", &format!("{}", upper[t])])?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

/// Vertical range of the chart: the extremes of every finite plotted value,
/// widened by ±0.5 only when all values coincide.
fn y_range(series: &[&[Option<f64>]]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for v in s.iter().flatten().filter(|v| v.is_finite()) {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn polylines(values: &[Option<f64>], x: impl Fn(usize) -> f64, y: impl Fn(f64) -> f64) -> Vec<String> {
    let mut lines = Vec::new();
    let mut current = String::new();
    for (t, v) in values.iter().enumerate() {
        match v.filter(|v| v.is_finite()) {
            Some(v) => {
                if !current.is_empty() {
                    current.push(' ');
                }
                let _ = write!(current, "{:.2},{:.2}", x(t), y(v));
            }
            None => {
                if !current.is_empty() {
                    lines.push(std::mem::take(&mut current));
                }
            }
        }
    }
    if !current.is_empty() {
        lines.push(current);
    }
    lines
}

/// Static line chart: ζₜ solid, bands dashed red. The exact vertical range is
/// recorded in `data-y-min` / `data-y-max` on the root element.
pub fn plot_svg(path: &EfficiencyPath) -> Result<String> {
    let (lower, upper) = bands(path)?;
    let lower: Vec<Option<f64>> = lower.iter().map(|v| Some(*v)).collect();
    let upper: Vec<Option<f64>> = upper.iter().map(|v| Some(*v)).collect();
    let (y_min, y_max) = y_range(&[&path.zeta, &lower, &upper]);
    let n = path.len().max(2);
    let inner_w = PLOT_WIDTH - 2.0 * MARGIN;
    let inner_h = PLOT_HEIGHT - 2.0 * MARGIN;
    let x = |t: usize| MARGIN + inner_w * t as f64 / (n - 1) as f64;
    let y = |v: f64| MARGIN + inner_h * (y_max - v) / (y_max - y_min);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PLOT_WIDTH}" height="{PLOT_HEIGHT}" viewBox="0 0 {PLOT_WIDTH} {PLOT_HEIGHT}" data-y-min="{y_min}" data-y-max="{y_max}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{inner_w}" height="{inner_h}" fill="none" stroke="black"/>"#
    );
    for (value, anchor_y) in [(y_max, MARGIN), (y_min, MARGIN + inner_h)] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{anchor_y:.2}" font-size="11" text-anchor="end">{value:.4}</text>"#,
            MARGIN - 4.0
        );
    }
    let label = |t: usize| {
        path.dates
            .get(t)
            .map(|d| d.to_string())
            .unwrap_or_else(|| t.to_string())
    };
    if !path.is_empty() {
        let bottom = MARGIN + inner_h + 16.0;
        let _ = writeln!(
            svg,
            r#"<text x="{MARGIN}" y="{bottom:.2}" font-size="11">{}</text>"#,
            label(0)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{bottom:.2}" font-size="11" text-anchor="end">{}</text>"#,
            MARGIN + inner_w,
            label(path.len() - 1)
        );
    }
    for (values, style) in [
        (&lower, r#"stroke="red" stroke-dasharray="6 4""#),
        (&upper, r#"stroke="red" stroke-dasharray="6 4""#),
        (&path.zeta, r#"stroke="black""#),
    ] {
        for points in polylines(values, x, y) {
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" {style} stroke-width="1" points="{points}"/>"#
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Writes `<stem>.csv` and `<stem>.svg` into `dir`.
pub fn plot_data(path: &EfficiencyPath, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let mut buf = Vec::new();
    plot_csv(path, &mut buf)?;
    std::fs::write(&csv_path, buf).map_err(|e| Error::io(&csv_path, e))?;
    let svg_path = dir.join(format!("{stem}.svg"));
    std::fs::write(&svg_path, plot_svg(path)?).map_err(|e| Error::io(&svg_path, e))?;
    Ok(vec![csv_path, svg_path])
}
