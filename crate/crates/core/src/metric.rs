//! The Hilbert distance, chord parametrization by distance, metric balls, and
//! a sampled check of the metric axioms.
//!
//! The distance is `log[(|ay|/|ax|) (|bx|/|by|)]` where `a, b` are the chord
//! endpoints ordered `a, x, y, b`. There is no factor 1/2, so on the unit disk
//! the value is twice the usual Klein-model hyperbolic distance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::ConvexDomain;
use crate::error::{GeometryError, Result};
use crate::projective::{Vector, ZERO_TOL};

/// Defect threshold used by [`MetricSampleReport::passes`].
pub const AXIOM_TOL: f64 = 1e-9;
/// Accuracy demanded of the closed-form chord solve before falling back to bisection.
const GEODESIC_TOL: f64 = 1e-12;

/// Distance from the chord parameters of `x + t (y - x)`: `x` sits at 0, `y`
/// at 1, the endpoints at `t_minus < 0` and `t_plus > 1`.
fn distance_from_params(t_minus: f64, t_plus: f64) -> f64 {
    (1.0 / (-t_minus)).ln_1p() + (1.0 / (t_plus - 1.0)).ln_1p()
}

fn coincident(x: &Vector, y: &Vector) -> bool {
    (x - y).norm() <= ZERO_TOL * (1.0 + x.norm())
}

pub fn hilbert_distance(domain: &ConvexDomain, x: &Vector, y: &Vector) -> Result<f64> {
    if x.len() != domain.dim() || y.len() != domain.dim() {
        return Err(GeometryError::DimensionMismatch { expected: domain.dim(), got: x.len().min(y.len()) });
    }
    if !domain.contains(x) || !domain.contains(y) {
        return Err(GeometryError::OutsideDomain);
    }
    if coincident(x, y) {
        return Ok(0.0);
    }
    let (t_minus, t_plus) = domain.chord_params(x, y)?;
    Ok(distance_from_params(t_minus, t_plus))
}

/// Distance from `x` to `x + s dir` when the chord through `x` along `dir`
/// exits at `-alpha` and `beta`.
fn distance_along(alpha: f64, beta: f64, s: f64) -> f64 {
    (s / alpha).ln_1p() - (-s / beta).ln_1p()
}

/// Point at Hilbert distance `t >= 0` from `x` along the ray in direction `dir`.
pub fn point_at_distance(domain: &ConvexDomain, x: &Vector, dir: &Vector, t: f64) -> Result<Vector> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(GeometryError::Precondition(format!("distance parameter must be finite and >= 0, got {t}")));
    }
    let beta = domain.ray_exit(x, dir)?;
    if t == 0.0 {
        return Ok(x.clone());
    }
    let alpha = domain.ray_exit(x, &(-dir))?;
    // cross ratio is multiplicative along the chord: solve e^t = (s + alpha) beta / (alpha (beta - s))
    let growth = t.exp_m1();
    let mut s = if growth.is_finite() {
        alpha * beta * growth / (beta + alpha * t.exp())
    } else {
        beta
    };
    if !s.is_finite() || (distance_along(alpha, beta, s) - t).abs() > GEODESIC_TOL * t.max(1.0) {
        let (mut lo, mut hi) = (0.0, beta);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if distance_along(alpha, beta, mid) < t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        s = 0.5 * (lo + hi);
    }
    let z = x + dir * s;
    if !(s < beta) || !domain.contains(&z) || !(distance_along(alpha, beta, s) - t).abs().le(&(1e-10 * t.max(1.0))) {
        return Err(GeometryError::BoundaryOverflow { t });
    }
    Ok(z)
}

/// Point on the chord through `x` and `y`, on the `y` side, at distance `t` from `x`.
pub fn geodesic_point(domain: &ConvexDomain, x: &Vector, y: &Vector, t: f64) -> Result<Vector> {
    if !domain.contains(x) || !domain.contains(y) {
        return Err(GeometryError::OutsideDomain);
    }
    if coincident(x, y) {
        return Err(GeometryError::NoUniqueLine);
    }
    point_at_distance(domain, x, &(y - x), t)
}

/// Unit directions used for ball sampling: equally spaced angles in the plane,
/// a Fibonacci lattice on the sphere in dimension 3.
fn sample_directions(dim: usize, k: usize) -> Vec<Vector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..k)
        .map(|j| {
            if dim == 2 {
                let th = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
                Vector::from_vec(vec![th.cos(), th.sin()])
            } else {
                let z = 1.0 - 2.0 * (j as f64 + 0.5) / k as f64;
                let r = (1.0 - z * z).sqrt();
                let th = golden * j as f64;
                Vector::from_vec(vec![r * th.cos(), r * th.sin(), z])
            }
        })
        .collect()
}

/// `k` points on the Hilbert sphere of the given radius about `center`.
pub fn ball_boundary_sample(domain: &ConvexDomain, center: &Vector, radius: f64, k: usize) -> Result<Vec<Vector>> {
    if k < 3 {
        return Err(GeometryError::Precondition("need at least 3 sample directions".into()));
    }
    if !(radius > 0.0) {
        return Err(GeometryError::Precondition(format!("radius must be positive, got {radius}")));
    }
    if !domain.contains(center) {
        return Err(GeometryError::OutsideDomain);
    }
    sample_directions(domain.dim(), k)
        .iter()
        .map(|u| point_at_distance(domain, center, u, radius))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSampleReport {
    pub samples: usize,
    pub max_symmetry_defect: f64,
    pub max_triangle_defect: f64,
    pub max_additivity_defect: f64,
    /// Mean of `d(x, z)` over the sampled triples; a cheap fingerprint for
    /// comparing runs through a projective map.
    pub mean_distance: f64,
    pub symmetry_witness: Option<[Vec<f64>; 3]>,
    pub triangle_witness: Option<[Vec<f64>; 3]>,
    pub additivity_witness: Option<[Vec<f64>; 3]>,
    pub tolerance: f64,
}

impl MetricSampleReport {
    pub fn passes(&self) -> bool {
        self.max_symmetry_defect < self.tolerance
            && self.max_triangle_defect < self.tolerance
            && self.max_additivity_defect < self.tolerance
    }
}

/// Defects of one triple: symmetry on `(x, y)`, triangle on `(x, y, z)`, and
/// additivity at the point a fraction `s` of the way from `x` to `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleDefects {
    pub symmetry: f64,
    pub triangle: f64,
    pub additivity: f64,
    pub d_xz: f64,
}

pub fn triple_defects(domain: &ConvexDomain, x: &Vector, y: &Vector, z: &Vector, s: f64) -> Result<TripleDefects> {
    let d_xy = hilbert_distance(domain, x, y)?;
    let d_yx = hilbert_distance(domain, y, x)?;
    let d_yz = hilbert_distance(domain, y, z)?;
    let d_xz = hilbert_distance(domain, x, z)?;
    let w = x + (z - x) * s;
    let additivity = (d_xz - hilbert_distance(domain, x, &w)? - hilbert_distance(domain, &w, z)?).abs();
    Ok(TripleDefects {
        symmetry: (d_xy - d_yx).abs(),
        triangle: (d_xz - d_xy - d_yz).max(0.0),
        additivity,
        d_xz,
    })
}

fn to_vecs(x: &Vector, y: &Vector, z: &Vector) -> [Vec<f64>; 3] {
    [x.iter().copied().collect(), y.iter().copied().collect(), z.iter().copied().collect()]
}

pub fn metric_axiom_suite(domain: &ConvexDomain, sample_count: usize, seed: u64) -> Result<MetricSampleReport> {
    if sample_count < 3 {
        return Err(GeometryError::Precondition("sample count must be at least 3".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = MetricSampleReport {
        samples: sample_count,
        max_symmetry_defect: 0.0,
        max_triangle_defect: 0.0,
        max_additivity_defect: 0.0,
        mean_distance: 0.0,
        symmetry_witness: None,
        triangle_witness: None,
        additivity_witness: None,
        tolerance: AXIOM_TOL,
    };
    let mut total = 0.0;
    for _ in 0..sample_count {
        let x = domain.sample_interior(&mut rng);
        let y = domain.sample_interior(&mut rng);
        let z = domain.sample_interior(&mut rng);
        let s: f64 = rng.random_range(0.0..1.0);
        let d = triple_defects(domain, &x, &y, &z, s)?;
        total += d.d_xz;
        if d.symmetry > report.max_symmetry_defect || report.symmetry_witness.is_none() {
            report.max_symmetry_defect = report.max_symmetry_defect.max(d.symmetry);
            report.symmetry_witness = Some(to_vecs(&x, &y, &z));
        }
        if d.triangle > report.max_triangle_defect || report.triangle_witness.is_none() {
            report.max_triangle_defect = report.max_triangle_defect.max(d.triangle);
            report.triangle_witness = Some(to_vecs(&x, &y, &z));
        }
        if d.additivity > report.max_additivity_defect || report.additivity_witness.is_none() {
            report.max_additivity_defect = report.max_additivity_defect.max(d.additivity);
            report.additivity_witness = Some(to_vecs(&x, &y, &z));
        }
    }
    report.mean_distance = total / sample_count as f64;
    Ok(report)
}
