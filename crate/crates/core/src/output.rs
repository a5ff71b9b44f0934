//! SVG and CSV rendering of momentum images, polygons, scans and region
//! maps. Coordinates are printed with four decimals so output is stable.

use std::fmt::Write;

use crate::catalog::SystemInstance;
use crate::error::{Error, Result};
use crate::invariants::polygon::SemitoricPolygon;
use crate::singularities::{Census, RegionMap, ScanResult, SingularityKind};

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 24.0;

/// An SVG canvas with a linear map from data coordinates to pixels, `y` up.
pub struct Svg {
    x: (f64, f64),
    y: (f64, f64),
    body: String,
}

impl Svg {
    /// Canvas covering `[x0, x1] × [y0, y1]` with a small border.
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |(a, b): (f64, f64)| {
            let d = if b > a { 0.05 * (b - a) } else { 0.5 };
            (a - d, b + d)
        };
        Svg { x: pad(x), y: pad(y), body: String::new() }
    }

    /// Bounding box of a point set, fitted to a canvas.
    pub fn fitting(points: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut bx = (f64::INFINITY, f64::NEG_INFINITY);
        let mut by = bx;
        for (x, y) in points {
            bx = (bx.0.min(x), bx.1.max(x));
            by = (by.0.min(y), by.1.max(y));
        }
        if !bx.0.is_finite() {
            bx = (0.0, 1.0);
            by = (0.0, 1.0);
        }
        Svg::new(bx, by)
    }

    fn px(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let u = MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN);
        let v = HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN);
        (u, v)
    }

    pub fn path(&mut self, points: &[(f64, f64)], closed: bool, style: &str) {
        if points.is_empty() {
            return;
        }
        let mut d = String::new();
        for (i, &p) in points.iter().enumerate() {
            let (u, v) = self.px(p);
            let _ = write!(d, "{}{u:.4} {v:.4}", if i == 0 { "M" } else { " L" });
        }
        if closed {
            d.push_str(" Z");
        }
        let _ = writeln!(self.body, r#"<path d="{d}" {style}/>"#);
    }

    pub fn dashed(&mut self, a: (f64, f64), b: (f64, f64)) {
        self.path(&[a, b], false, r#"fill="none" stroke="black" stroke-dasharray="4 3""#);
    }

    pub fn dot(&mut self, p: (f64, f64), r: f64, fill: &str) {
        let (u, v) = self.px(p);
        let _ = writeln!(self.body, r#"<circle cx="{u:.4}" cy="{v:.4}" r="{r:.4}" fill="{fill}"/>"#);
    }

    /// Axis-aligned rectangle with corners given in data coordinates.
    pub fn rect(&mut self, a: (f64, f64), b: (f64, f64), fill: &str) {
        let (u0, v0) = self.px(a);
        let (u1, v1) = self.px(b);
        let _ = writeln!(
            self.body,
            r#"<rect x="{:.4}" y="{:.4}" width="{:.4}" height="{:.4}" fill="{fill}"/>"#,
            u0.min(u1),
            v0.min(v1),
            (u1 - u0).abs(),
            (v1 - v0).abs()
        );
    }

    pub fn label(&mut self, p: (f64, f64), text: &str) {
        let (u, v) = self.px(p);
        let _ = writeln!(self.body, r#"<text x="{u:.4}" y="{v:.4}" font-size="11">{text}</text>"#);
    }

    pub fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- semitoric {} -->\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            env!("CARGO_PKG_VERSION"),
            self.body
        )
    }
}

/// Polygon with its cut half-lines dashed from each focus value to the
/// boundary in the direction of the cut sign.
pub fn polygon_svg(poly: &SemitoricPolygon) -> String {
    let mut svg = Svg::fitting(poly.vertices.iter().copied());
    svg.path(&poly.vertices, true, r##"fill="#dde6f0" stroke="black" stroke-width="1.5""##);
    let (ylo, yhi) = poly.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.1), a.1.max(p.1)));
    for (i, &fv) in poly.focus_values.iter().enumerate() {
        let end = if poly.signs.get(i).copied().unwrap_or(1) > 0 {
            boundary_crossing(&poly.vertices, fv.0, true).unwrap_or(yhi)
        } else {
            boundary_crossing(&poly.vertices, fv.0, false).unwrap_or(ylo)
        };
        svg.dashed(fv, (fv.0, end));
        svg.dot(fv, 3.0, "black");
    }
    svg.finish()
}

/// Highest (or lowest) intersection of the vertical line `x` with the
/// polygon boundary.
fn boundary_crossing(vertices: &[(f64, f64)], x: f64, top: bool) -> Option<f64> {
    let n = vertices.len();
    let hits = (0..n).filter_map(|i| {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        let (lo, hi) = if a.0 <= b.0 { (a, b) } else { (b, a) };
        if x < lo.0 || x > hi.0 || hi.0 == lo.0 {
            return None;
        }
        Some(lo.1 + (hi.1 - lo.1) * (x - lo.0) / (hi.0 - lo.0))
    });
    if top {
        hits.reduce(f64::max)
    } else {
        hits.reduce(f64::min)
    }
}

/// Image of `(L, H)`: boundary curves sampled on `samples` levels of `L`,
/// elliptic-elliptic values as small blue dots and focus-focus values black.
pub fn momentum_image_svg(sys: &SystemInstance, census: &Census, samples: usize) -> Result<String> {
    if samples < 2 {
        return Err(Error::InvalidParameter("momentum image needs at least 2 samples".into()));
    }
    let red = sys.reduced();
    let (lo, hi) = red.l_range();
    let hi = hi.unwrap_or_else(|| {
        let last = census.records.iter().map(|r| r.critical_value.0).fold(lo, f64::max);
        last + (last - lo).max(1.0)
    });
    let mut bottom = Vec::with_capacity(samples);
    let mut top = Vec::with_capacity(samples);
    for i in 0..samples {
        let l = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        if let Some((a, b)) = red.h_extent(l) {
            bottom.push((l, a));
            top.push((l, b));
        }
    }
    let outline: Vec<(f64, f64)> = bottom.iter().copied().chain(top.iter().rev().copied()).collect();
    let mut svg = Svg::fitting(outline.iter().copied());
    svg.path(&outline, true, r##"fill="#e8e8e8" stroke="black" stroke-width="1.5""##);
    for r in &census.records {
        match r.kind {
            SingularityKind::FocusFocus => svg.dot(r.critical_value, 3.5, "black"),
            SingularityKind::EllipticElliptic => svg.dot(r.critical_value, 2.5, "#4a6fa5"),
            _ => svg.dot(r.critical_value, 3.5, "#c0392b"),
        }
    }
    svg.label((lo, top.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)), sys.name());
    Ok(svg.finish())
}

fn region_fill(n: u8) -> &'static str {
    match n {
        0 => "#ffffff",
        1 => "#b0b0b0",
        2 => "#505050",
        _ => "#c0392b",
    }
}

/// Region map as colored cells, boundary points as small dots.
pub fn region_map_svg(map: &RegionMap) -> String {
    let n = map.axis.len();
    let mut svg = Svg::new((0.0, 1.0), (0.0, 1.0));
    let h = if n > 1 { 0.5 / (n - 1) as f64 } else { 0.5 };
    for (j, row) in map.counts.iter().enumerate() {
        for (i, &c) in row.iter().enumerate() {
            let (x, y) = (map.axis[i], map.axis[j]);
            svg.rect(((x - h).max(0.0), (y - h).max(0.0)), ((x + h).min(1.0), (y + h).min(1.0)), region_fill(c));
        }
    }
    for &p in &map.boundary {
        svg.dot(p, 0.8, "#c0392b");
    }
    svg.path(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], true, r#"fill="none" stroke="black""#);
    svg.finish()
}

/// Step plot of `n_FF` along the scan axis with transitions dashed.
pub fn scan_svg(scan: &ScanResult) -> String {
    let lo = scan.values.first().copied().unwrap_or(0.0);
    let hi = scan.values.last().copied().unwrap_or(1.0);
    let top = scan.n_ff.iter().copied().max().unwrap_or(0).max(1) as f64;
    let mut svg = Svg::new((lo, hi), (0.0, top));
    let mut steps = Vec::with_capacity(2 * scan.values.len());
    for (k, (&x, &n)) in scan.values.iter().zip(&scan.n_ff).enumerate() {
        if k > 0 {
            steps.push((x, steps.last().map_or(0.0, |p: &(f64, f64)| p.1)));
        }
        steps.push((x, n as f64));
    }
    svg.path(&steps, false, r#"fill="none" stroke="black" stroke-width="1.5""#);
    for t in &scan.transitions {
        svg.dashed((t.value, 0.0), (t.value, top));
    }
    svg.label((lo, top), &format!("n_FF along {}", scan.axis));
    svg.finish()
}

/// One row per grid value, then one row per refined transition.
pub fn scan_csv(scan: &ScanResult) -> String {
    let mut out = format!("kind,{},n_ff_before,n_ff_after\n", scan.axis);
    for (&x, &n) in scan.values.iter().zip(&scan.n_ff) {
        let _ = writeln!(out, "sample,{x:.10},{n},{n}");
    }
    for t in &scan.transitions {
        let _ = writeln!(out, "transition,{:.10},{},{}", t.value, t.n_ff_before, t.n_ff_after);
    }
    out
}

/// Hirzebruch trapezoids and other plain polygons.
pub fn plain_polygon_svg(vertices: &[(f64, f64)]) -> String {
    let mut svg = Svg::fitting(vertices.iter().copied());
    svg.path(vertices, true, r##"fill="#dde6f0" stroke="black" stroke-width="1.5""##);
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_have_four_decimals() {
        let mut svg = Svg::new((0.0, 1.0), (0.0, 1.0));
        svg.path(&[(0.0, 0.0), (1.0 / 3.0, 0.5)], false, "");
        let s = svg.finish();
        let d = s.split("d=\"").nth(1).unwrap().split('"').next().unwrap();
        for num in d.split(|c: char| !(c.is_ascii_digit() || c == '.')).filter(|t| !t.is_empty()) {
            assert_eq!(num.split('.').nth(1).map(str::len), Some(4), "{num}");
        }
    }

    #[test]
    fn cut_runs_to_the_boundary() {
        let sq = [(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)];
        assert_eq!(boundary_crossing(&sq, 1.0, true), Some(2.0));
        assert_eq!(boundary_crossing(&sq, 1.0, false), Some(0.0));
        assert_eq!(boundary_crossing(&sq, 3.0, true), None);
    }

    #[test]
    fn scan_csv_has_header_and_rows() {
        let scan = ScanResult {
            axis: "t".into(),
            values: vec![0.0, 0.5, 1.0],
            n_ff: vec![0, 1, 0],
            transitions: vec![],
        };
        let csv = scan_csv(&scan);
        assert!(csv.starts_with("kind,t,n_ff_before,n_ff_after\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
