//! Artifact emission: every experiment writes
//! `<outdir>/<experiment>/<timestamp>/{data.csv, plot.svg, manifest.json}`.
//! CSV is the contract (floats with 17 significant digits); the SVG is a
//! convenience polyline rendering of the primary curve.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Float formatting used everywhere in data.csv: 17 significant digits,
/// enough to round-trip any f64 bit pattern.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// UTC timestamp `YYYYMMDDTHHMMSSZ` without a date-time dependency.
pub fn utc_timestamp() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let days = (secs / 86_400) as i64;
    let tod = secs % 86_400;
    // civil date from day count (days since 1970-01-01)
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097);
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = if m <= 2 { y + 1 } else { y };
    format!(
        "{:04}{:02}{:02}T{:02}{:02}{:02}Z",
        y,
        m,
        d,
        tod / 3600,
        (tod % 3600) / 60,
        tod % 60
    )
}

/// FNV-1a over the canonical config string; recorded in the manifest so runs
/// are identifiable without diffing configs.
pub fn config_hash(canonical: &str) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in canonical.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

fn fmt_axis(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && (a >= 1e4 || a < 1e-3) {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

/// Minimal SVG line plot of one curve; axes annotated with the data range.
pub fn render_svg(points: &[(f64, f64)], x_label: &str, y_label: &str, title: &str) -> String {
    let (w, h) = (640.0, 480.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 50.0);
    let finite: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"15\">{}</text>\n",
        w / 2.0,
        title
    ));
    if finite.len() >= 2 {
        let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &finite {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        if y1 <= y0 {
            y1 = y0 + 1.0;
        }
        let px = |x: f64| ml + (x - x0) / (x1 - x0) * (w - ml - mr);
        let py = |y: f64| h - mb - (y - y0) / (y1 - y0) * (h - mt - mb);
        svg.push_str(&format!(
            "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
            h - mb,
            w - mr,
            h - mb
        ));
        svg.push_str(&format!(
            "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n",
            h - mb
        ));
        let pts: Vec<String> = finite
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n",
            pts.join(" ")
        ));
        for &(x, y) in &finite {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"#1f77b4\"/>\n",
                px(x),
                py(y)
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{ml}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">{}</text>\n",
            h - mb + 16.0,
            fmt_axis(x0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\">{}</text>\n",
            w - mr,
            h - mb + 16.0,
            fmt_axis(x1)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\">{}</text>\n",
            ml - 6.0,
            h - mb,
            fmt_axis(y0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"12\">{}</text>\n",
            ml - 6.0,
            mt + 10.0,
            fmt_axis(y1)
        ));
    } else {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">not enough points to plot</text>\n",
            w / 2.0,
            h / 2.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">{}</text>\n",
        w / 2.0,
        h - 12.0,
        x_label
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        h / 2.0,
        h / 2.0,
        y_label
    ));
    svg.push_str("</svg>\n");
    svg
}

/// Everything one experiment produces before it is written to disk.
pub struct Run {
    pub experiment: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// (x, y) points of the primary curve with axis labels.
    pub plot: Vec<(f64, f64)>,
    pub x_label: String,
    pub y_label: String,
    /// Fitted/derived constants, recorded in the manifest.
    pub constants: serde_json::Value,
    /// Echo of the fully resolved configuration.
    pub config: serde_json::Value,
}

/// Write data.csv, plot.svg and manifest.json; returns the run directory.
pub fn write_artifacts(outdir: &Path, run: &Run, wall_ms: u128, threads: usize) -> std::io::Result<PathBuf> {
    let stamp = utc_timestamp();
    let mut dir = outdir.join(run.experiment).join(&stamp);
    let mut suffix = 1;
    while dir.exists() {
        dir = outdir.join(run.experiment).join(format!("{stamp}-{suffix}"));
        suffix += 1;
    }
    fs::create_dir_all(&dir)?;

    let mut csv = String::new();
    csv.push_str(&run.header.join(","));
    csv.push('\n');
    for row in &run.rows {
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    fs::write(dir.join("data.csv"), csv)?;

    let title = format!("{} ({stamp})", run.experiment);
    fs::write(
        dir.join("plot.svg"),
        render_svg(&run.plot, &run.x_label, &run.y_label, &title),
    )?;

    let canonical = serde_json::to_string(&run.config).unwrap_or_default();
    let manifest = serde_json::json!({
        "experiment": run.experiment,
        "timestamp": stamp,
        "config": run.config,
        "config_hash": config_hash(&format!("{}|{canonical}", run.experiment)),
        "constants": run.constants,
        "version": env!("CARGO_PKG_VERSION"),
        "threads": threads,
        "wall_ms": wall_ms,
        "rows": run.rows.len(),
    });
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).unwrap(),
    )?;
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_significant_digits() {
        let s = fmt_float(std::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::PI);
        assert_eq!(fmt_float(f64::INFINITY), "inf");
    }

    #[test]
    fn timestamp_shape() {
        let s = utc_timestamp();
        assert_eq!(s.len(), 16);
        assert!(s.ends_with('Z'));
        assert_eq!(&s[8..9], "T");
        assert!(s[..8].chars().all(|c| c.is_ascii_digit()));
        // sanity: year in a plausible range
        let year: u32 = s[..4].parse().unwrap();
        assert!((2020..2200).contains(&year));
    }

    #[test]
    fn config_hash_is_stable_and_sensitive() {
        let a = config_hash("spectrum|{\"mu\":10.0}");
        let b = config_hash("spectrum|{\"mu\":10.0}");
        let c = config_hash("spectrum|{\"mu\":11.0}");
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 16);
    }

    #[test]
    fn svg_renders_points_and_degenerate_input() {
        let svg = render_svg(&[(0.0, 1.0), (1.0, 2.0), (2.0, 0.5)], "x", "y", "t");
        assert!(svg.contains("<polyline"));
        let empty = render_svg(&[], "x", "y", "t");
        assert!(empty.contains("not enough points"));
    }
}
