//! Deterministic artifact writers: CSV point clouds, self-contained SVG
//! scatter/curve plots, and atomic file placement (temp file + rename).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

/// Writes bytes atomically: a sibling temp file is renamed over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp: PathBuf = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// CSV with the fixed `re,im,tag` schema shared by all point clouds.
pub fn csv_points(rows: &[(Complex64, &str)]) -> String {
    let mut out = String::from("re,im,tag\n");
    for (z, tag) in rows {
        out.push_str(&format!("{},{},{}\n", z.re, z.im, tag));
    }
    out
}

fn svg_header(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n\
         <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    )
}

struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    /// Maps the complex bounding box (padded) onto a square canvas.
    fn fit(points: impl Iterator<Item = Complex64>, size: f64) -> Frame {
        let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            lo.re = lo.re.min(p.re);
            lo.im = lo.im.min(p.im);
            hi.re = hi.re.max(p.re);
            hi.im = hi.im.max(p.im);
        }
        if !lo.re.is_finite() {
            lo = Complex64::new(-1.0, -1.0);
            hi = Complex64::new(1.0, 1.0);
        }
        let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-9);
        let pad = 0.08 * span;
        Frame {
            x0: lo.re - pad,
            y0: lo.im - pad,
            scale: (size - 2.0) / (span + 2.0 * pad),
            height: size,
        }
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        (
            1.0 + (z.re - self.x0) * self.scale,
            self.height - 1.0 - (z.im - self.y0) * self.scale,
        )
    }
}

/// Scatter plot of a point cloud.
pub fn svg_scatter(points: &[Complex64], title: &str) -> String {
    let size = 640.0;
    let frame = Frame::fit(points.iter().cloned(), size);
    let mut s = svg_header(size, size);
    s.push_str(&format!(
        "<text x=\"10\" y=\"20\" font-family=\"monospace\" font-size=\"14\">{title}</text>\n"
    ));
    for &p in points {
        let (x, y) = frame.map(p);
        s.push_str(&format!(
            "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"1.6\" fill=\"#1f5fa8\" fill-opacity=\"0.8\"/>\n"
        ));
    }
    s.push_str("</svg>\n");
    s
}

/// Spectrum plot: parametric curves (one polyline per range point), the unit
/// circle frame, and the limit-point marker at the origin.
pub fn svg_spectrum(curves: &[(Complex64, Vec<Complex64>)], title: &str) -> String {
    let size = 640.0;
    let all = curves
        .iter()
        .flat_map(|(_, c)| c.iter().cloned())
        .chain([Complex64::new(1.05, 1.05), Complex64::new(-1.05, -1.05)]);
    let frame = Frame::fit(all, size);
    let mut s = svg_header(size, size);
    s.push_str(&format!(
        "<text x=\"10\" y=\"20\" font-family=\"monospace\" font-size=\"14\">{title}</text>\n"
    ));
    // Unit circle for orientation.
    let (cx, cy) = frame.map(Complex64::new(0.0, 0.0));
    s.push_str(&format!(
        "<circle cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"{:.3}\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n",
        frame.scale
    ));
    for (k, (_, curve)) in curves.iter().enumerate() {
        if curve.is_empty() {
            continue;
        }
        let hue = (k * 47) % 360;
        let mut attr = String::new();
        for &p in curve {
            let (x, y) = frame.map(p);
            attr.push_str(&format!("{x:.3},{y:.3} "));
        }
        s.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"hsl({hue},70%,40%)\" stroke-width=\"1\"/>\n",
            attr.trim_end()
        ));
    }
    // Limit point 0.
    s.push_str(&format!(
        "<circle cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"4\" fill=\"none\" stroke=\"#c03020\" stroke-width=\"1.5\"/>\n\
         <line x1=\"{:.3}\" y1=\"{cy:.3}\" x2=\"{:.3}\" y2=\"{cy:.3}\" stroke=\"#c03020\" stroke-width=\"1\"/>\n\
         <line x1=\"{cx:.3}\" y1=\"{:.3}\" x2=\"{cx:.3}\" y2=\"{:.3}\" stroke=\"#c03020\" stroke-width=\"1\"/>\n",
        cx - 6.0,
        cx + 6.0,
        cy - 6.0,
        cy + 6.0
    ));
    s.push_str("</svg>\n");
    s
}

/// Log-log profile polyline (mean-oscillation trend).
pub fn svg_loglog(xs: &[f64], ys: &[f64], title: &str) -> String {
    let size = 640.0;
    let pts: Vec<Complex64> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0)
        .map(|(&x, &y)| Complex64::new(x.log10(), y.log10()))
        .collect();
    let frame = Frame::fit(pts.iter().cloned(), size);
    let mut s = svg_header(size, size);
    s.push_str(&format!(
        "<text x=\"10\" y=\"20\" font-family=\"monospace\" font-size=\"14\">{title} (log10-log10)</text>\n"
    ));
    let mut attr = String::new();
    for &p in &pts {
        let (x, y) = frame.map(p);
        attr.push_str(&format!("{x:.3},{y:.3} "));
    }
    s.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\"/>\n",
        attr.trim_end()
    ));
    for &p in &pts {
        let (x, y) = frame.map(p);
        s.push_str(&format!(
            "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"#1f5fa8\"/>\n"
        ));
    }
    s.push_str("</svg>\n");
    s
}
