//! Deterministic SVG rendering of planar scenes: a domain boundary, chords,
//! polylines and labeled points.

use std::fmt::Write;

use hilbert_core::domain::ConvexDomain;
use hilbert_core::projective::Vector;
use serde::{Deserialize, Serialize};

/// Number of boundary samples used to draw a domain.
const BOUNDARY_SAMPLES: usize = 256;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub at: [f64; 2],
    #[serde(default)]
    pub label: String,
}

/// Scene description, also the JSON input of `render`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Scene {
    #[serde(default)]
    pub domain: Option<ConvexDomain>,
    #[serde(default)]
    pub chords: Vec<[[f64; 2]; 2]>,
    #[serde(default)]
    pub paths: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub points: Vec<LabeledPoint>,
}

impl Scene {
    pub fn with_domain(domain: &ConvexDomain) -> Self {
        Scene { domain: Some(domain.clone()), ..Default::default() }
    }

    pub fn chord(&mut self, p: &Vector, q: &Vector) {
        self.chords.push([pair(p), pair(q)]);
    }

    pub fn point(&mut self, p: &Vector, label: &str) {
        self.points.push(LabeledPoint { at: pair(p), label: label.to_string() });
    }

    pub fn path(&mut self, pts: &[Vector]) {
        self.paths.push(pts.iter().map(pair).collect());
    }
}

fn pair(p: &Vector) -> [f64; 2] {
    [p[0], p[1]]
}

#[derive(Debug, Clone, Copy)]
pub struct Style {
    pub size: u32,
    pub stroke: f64,
    pub labels: bool,
}

struct Viewport {
    min: [f64; 2],
    span: f64,
    size: f64,
}

impl Viewport {
    fn contains(&self, p: [f64; 2]) -> bool {
        (0..2).all(|i| p[i] >= self.min[i] && p[i] <= self.min[i] + self.span)
    }

    fn px(&self, p: [f64; 2]) -> (f64, f64) {
        let s = self.size / self.span;
        ((p[0] - self.min[0]) * s, self.size - (p[1] - self.min[1]) * s)
    }
}

fn boundary(domain: &ConvexDomain) -> Vec<[f64; 2]> {
    if domain.dim() != 2 {
        return Vec::new();
    }
    (0..BOUNDARY_SAMPLES)
        .filter_map(|k| {
            let th = std::f64::consts::TAU * k as f64 / BOUNDARY_SAMPLES as f64;
            domain.boundary_point(&Vector::from_vec(vec![th.cos(), th.sin()])).ok().map(|p| pair(&p))
        })
        .collect()
}

fn viewport(outline: &[[f64; 2]], scene: &Scene, size: f64) -> Viewport {
    let mut pts: Vec<[f64; 2]> = outline.to_vec();
    if outline.is_empty() {
        pts.extend(scene.chords.iter().flatten().copied());
        pts.extend(scene.paths.iter().flatten().copied());
        pts.extend(scene.points.iter().map(|p| p.at));
    }
    let pts: Vec<[f64; 2]> = pts.into_iter().filter(|p| p[0].is_finite() && p[1].is_finite()).collect();
    if pts.is_empty() {
        return Viewport { min: [-1.1, -1.1], span: 2.2, size };
    }
    let lo = |i: usize| pts.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min);
    let hi = |i: usize| pts.iter().map(|p| p[i]).fold(f64::NEG_INFINITY, f64::max);
    let span = (hi(0) - lo(0)).max(hi(1) - lo(1)).max(1e-9) * 1.1;
    let mid = [(lo(0) + hi(0)) / 2.0, (lo(1) + hi(1)) / 2.0];
    Viewport { min: [mid[0] - span / 2.0, mid[1] - span / 2.0], span, size }
}

/// SVG text and warnings about elements clipped from the viewport.
pub fn render(scene: &Scene, style: &Style) -> (String, Vec<String>) {
    let size = style.size as f64;
    let outline = scene.domain.as_ref().map(boundary).unwrap_or_default();
    let view = viewport(&outline, scene, size);
    let mut warnings = Vec::new();
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        style.size
    );
    if !outline.is_empty() {
        let mut d = String::new();
        for (k, p) in outline.iter().enumerate() {
            let (x, y) = view.px(*p);
            let _ = write!(d, "{}{x:.3} {y:.3} ", if k == 0 { "M" } else { "L" });
        }
        d.push('Z');
        let _ = writeln!(out, r##"<path d="{d}" fill="none" stroke="#000" stroke-width="{:.2}"/>"##, style.stroke);
    }
    for path in &scene.paths {
        let kept: Vec<[f64; 2]> = path.iter().copied().filter(|p| view.contains(*p)).collect();
        if kept.len() < path.len() {
            warnings.push(format!("path: {} of {} vertices outside the viewport", path.len() - kept.len(), path.len()));
        }
        if kept.len() < 2 {
            continue;
        }
        let mut d = String::new();
        for (k, p) in kept.iter().enumerate() {
            let (x, y) = view.px(*p);
            let _ = write!(d, "{}{x:.3} {y:.3} ", if k == 0 { "M" } else { "L" });
        }
        let _ = writeln!(
            out,
            r##"<path d="{}" fill="none" stroke="#1f5fbf" stroke-width="{:.2}"/>"##,
            d.trim_end(),
            style.stroke
        );
    }
    for (k, [p, q]) in scene.chords.iter().enumerate() {
        if !view.contains(*p) || !view.contains(*q) {
            warnings.push(format!("chord {k} outside the viewport, skipped"));
            continue;
        }
        let (x1, y1) = view.px(*p);
        let (x2, y2) = view.px(*q);
        let _ = writeln!(
            out,
            r##"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#bf3f1f" stroke-width="{:.2}"/>"##,
            style.stroke
        );
    }
    for (k, p) in scene.points.iter().enumerate() {
        if !view.contains(p.at) {
            warnings.push(format!("point {k} outside the viewport, skipped"));
            continue;
        }
        let (x, y) = view.px(p.at);
        let _ = writeln!(out, r##"<circle cx="{x:.3}" cy="{y:.3}" r="{:.2}" fill="#000"/>"##, 2.0 * style.stroke);
        if style.labels && !p.label.is_empty() {
            let _ = writeln!(
                out,
                r#"<text x="{:.3}" y="{:.3}" font-family="serif" font-size="14">{}</text>"#,
                x + 6.0,
                y - 6.0,
                escape(&p.label)
            );
        }
    }
    out.push_str("</svg>\n");
    (out, warnings)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
