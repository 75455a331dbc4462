//! Strictly convex open domains in an affine chart.
//!
//! Only shapes whose strict convexity is guaranteed analytically are
//! representable: ellipsoids, `p`-balls with `1 < p < inf`, and projective
//! images of these that stay inside one chart. Polygons and other shapes with
//! flat boundary pieces are rejected at construction.

use nalgebra::Cholesky;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::projective::{matrix_from_rows, matrix_to_rows, Matrix, ProjectiveMap, Vector, ZERO_TOL};

/// Interior samples stay within this fraction of the gauge.
const SAMPLE_GAUGE: f64 = 0.95;
/// Relative width at which the p-ball bisection stops.
const BISECTION_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct Ellipse {
    center: Vector,
    q: Matrix,
    /// `L^{-T}` for the Cholesky factor `Q = L L^T`; maps the unit ball onto the ellipse.
    inv_factor_t: Matrix,
}

impl Ellipse {
    pub fn new(center: Vector, q: Matrix) -> Result<Self> {
        let n = center.len();
        if !(2..=3).contains(&n) {
            return Err(GeometryError::InvalidDomain(format!("dimension {n} not supported (2 or 3)")));
        }
        if q.nrows() != n || q.ncols() != n {
            return Err(GeometryError::InvalidDomain("form size does not match center".into()));
        }
        if (&q - q.transpose()).amax() > 1e-12 * q.amax().max(1.0) {
            return Err(GeometryError::InvalidDomain("quadratic form is not symmetric".into()));
        }
        let sym = (&q + q.transpose()) * 0.5;
        let min_eig = sym.clone().symmetric_eigenvalues().min();
        if !(min_eig > 1e-12 * sym.amax()) {
            return Err(GeometryError::InvalidDomain(
                "quadratic form is not positive definite (unbounded or degenerate ellipse)".into(),
            ));
        }
        let chol = Cholesky::new(sym.clone())
            .ok_or_else(|| GeometryError::InvalidDomain("quadratic form is not positive definite".into()))?;
        let inv_factor_t = chol
            .l()
            .try_inverse()
            .ok_or_else(|| GeometryError::InvalidDomain("singular Cholesky factor".into()))?
            .transpose();
        Ok(Self { center, q: sym, inv_factor_t })
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn form(&self) -> &Matrix {
        &self.q
    }

    fn residual(&self, x: &Vector) -> f64 {
        let d = x - &self.center;
        d.dot(&(&self.q * &d)) - 1.0
    }

    /// Positive root of `(o + t u - c)^T Q (o + t u - c) = 1`, cancellation-free.
    fn ray_exit(&self, origin: &Vector, dir: &Vector) -> f64 {
        let d = origin - &self.center;
        let qu = &self.q * dir;
        let a = dir.dot(&qu);
        let b = d.dot(&qu);
        let slack = 1.0 - d.dot(&(&self.q * &d));
        let disc = (b * b + a * slack).max(0.0).sqrt();
        if b >= 0.0 {
            slack / (b + disc)
        } else {
            (disc - b) / a
        }
    }

    /// Minimum and maximum of `<c, x> + d` over the closed ellipse.
    fn affine_range(&self, c: &Vector, d: f64) -> (f64, f64) {
        let q_inv = self.q.clone().try_inverse().expect("positive definite");
        let spread = c.dot(&(&q_inv * c)).max(0.0).sqrt();
        let mid = c.dot(&self.center) + d;
        (mid - spread, mid + spread)
    }

    /// The image conic under `t`, when it is a bounded ellipse in the chart.
    pub fn projective_image(&self, t: &ProjectiveMap) -> Option<Ellipse> {
        let n = self.center.len();
        let mut conic = Matrix::zeros(n + 1, n + 1);
        let qc = &self.q * &self.center;
        conic.view_mut((0, 0), (n, n)).copy_from(&self.q);
        conic.view_mut((0, n), (n, 1)).copy_from(&(-&qc));
        conic.view_mut((n, 0), (1, n)).copy_from(&(-qc.transpose()));
        conic[(n, n)] = self.center.dot(&qc) - 1.0;
        let t_inv = t.inverse();
        let mut image = t_inv.matrix().transpose() * conic * t_inv.matrix();
        image = (&image + image.transpose()) * 0.5;
        let mut block = image.view((0, 0), (n, n)).into_owned();
        let mut u = image.view((0, n), (n, 1)).column(0).into_owned();
        let mut w = image[(n, n)];
        if block.clone().symmetric_eigenvalues().min() < 0.0 {
            block = -block;
            u = -u;
            w = -w;
        }
        let block_inv = block.clone().try_inverse()?;
        let center = -(&block_inv * &u);
        let k = center.dot(&(&block * &center)) - w;
        if !(k > 0.0) {
            return None;
        }
        Ellipse::new(center, block / k).ok()
    }

    fn sample_unit_ball<R: Rng>(n: usize, rng: &mut R) -> Vector {
        loop {
            let v = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            if v.norm_squared() < 1.0 {
                return v;
            }
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Vector {
        let u = Self::sample_unit_ball(self.center.len(), rng) * SAMPLE_GAUGE;
        &self.center + &self.inv_factor_t * u
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PBall {
    p: f64,
    center: Vector,
    radius: f64,
}

impl PBall {
    pub fn new(p: f64, center: Vector, radius: f64) -> Result<Self> {
        let n = center.len();
        if !(2..=3).contains(&n) {
            return Err(GeometryError::InvalidDomain(format!("dimension {n} not supported (2 or 3)")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(GeometryError::InvalidDomain(format!(
                "p-ball exponent must satisfy 1 < p < inf, got {p}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidDomain(format!("radius must be positive, got {radius}")));
        }
        Ok(Self { p, center, radius })
    }

    pub fn exponent(&self) -> f64 {
        self.p
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `||x - c||_p / r`.
    pub fn gauge(&self, x: &Vector) -> f64 {
        let s: f64 = x.iter().zip(self.center.iter()).map(|(a, c)| (a - c).abs().powf(self.p)).sum();
        s.powf(1.0 / self.p) / self.radius
    }

    /// `sum |o_i + t u_i - c_i|^p / r^p - 1` and its derivative in `t`.
    fn power_residual(&self, origin: &Vector, dir: &Vector, t: f64) -> (f64, f64) {
        let mut value = 0.0;
        let mut slope = 0.0;
        for i in 0..origin.len() {
            let z = (origin[i] + t * dir[i] - self.center[i]) / self.radius;
            let az = z.abs();
            value += az.powf(self.p);
            if az > 0.0 {
                slope += self.p * az.powf(self.p - 1.0) * z.signum() * dir[i] / self.radius;
            }
        }
        (value - 1.0, slope)
    }

    /// Bracketed bisection followed by two guarded Newton steps.
    fn ray_exit(&self, origin: &Vector, dir: &Vector) -> f64 {
        let mut lo = 0.0;
        let mut hi = 2.0 * self.radius * (origin.len() as f64).sqrt() / dir.norm();
        while self.power_residual(origin, dir, hi).0 <= 0.0 {
            lo = hi;
            hi *= 2.0;
        }
        while hi - lo > BISECTION_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if self.power_residual(origin, dir, mid).0 <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut t = 0.5 * (lo + hi);
        let width = hi - lo;
        for _ in 0..2 {
            let (value, slope) = self.power_residual(origin, dir, t);
            if slope.abs() > 0.0 {
                let next = t - value / slope;
                if next.is_finite() && (next - t).abs() <= 4.0 * width.max(f64::EPSILON * t.abs()) {
                    t = next;
                }
            }
        }
        t
    }

    fn affine_range(&self, c: &Vector, d: f64) -> (f64, f64) {
        let conj = self.p / (self.p - 1.0);
        let dual: f64 = c.iter().map(|v| v.abs().powf(conj)).sum::<f64>().powf(1.0 / conj);
        let mid = c.dot(&self.center) + d;
        (mid - self.radius * dual, mid + self.radius * dual)
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Vector {
        let n = self.center.len();
        loop {
            let v = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0)) * self.radius;
            let x = &self.center + v;
            if self.gauge(&x) < SAMPLE_GAUGE {
                return x;
            }
        }
    }
}

/// Projective image `T(base)` of an analytic base domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformed {
    base: Box<ConvexDomain>,
    map: ProjectiveMap,
    inverse: ProjectiveMap,
}

impl Transformed {
    pub fn base(&self) -> &ConvexDomain {
        &self.base
    }

    pub fn map(&self) -> &ProjectiveMap {
        &self.map
    }

    /// Chart point of the base domain corresponding to `x`, or `None` when `x`
    /// is not the image of a base chart point.
    fn pull_back(&self, x: &Vector) -> Option<Vector> {
        let n = x.len();
        let mut lifted = Vector::from_element(n + 1, 1.0);
        lifted.rows_mut(0, n).copy_from(x);
        let raw = self.inverse.matrix() * lifted;
        let w = raw[n];
        if !(w > ZERO_TOL * raw.norm()) {
            return None;
        }
        Some(raw.rows(0, n) / w)
    }

    fn push_forward(&self, x: &Vector) -> Vector {
        self.map.apply_affine(x).expect("chart condition checked at construction")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainSpec", into = "DomainSpec")]
pub enum ConvexDomain {
    Ellipse(Ellipse),
    PBall(PBall),
    Transformed(Transformed),
}

/// JSON schema for domains.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DomainSpec {
    Ellipse { center: Vec<f64>, q: Vec<Vec<f64>> },
    Pball { p: f64, center: Vec<f64>, radius: f64 },
    Transformed { base: Box<DomainSpec>, mat: Vec<Vec<f64>> },
    Polygon { vertices: Vec<Vec<f64>> },
}

impl TryFrom<DomainSpec> for ConvexDomain {
    type Error = GeometryError;
    fn try_from(spec: DomainSpec) -> Result<Self> {
        match spec {
            DomainSpec::Ellipse { center, q } => {
                Ok(ConvexDomain::Ellipse(Ellipse::new(Vector::from_vec(center), matrix_from_rows(&q)?)?))
            }
            DomainSpec::Pball { p, center, radius } => {
                Ok(ConvexDomain::PBall(PBall::new(p, Vector::from_vec(center), radius)?))
            }
            DomainSpec::Transformed { base, mat } => {
                let base = ConvexDomain::try_from(*base)?;
                ConvexDomain::transformed(base, ProjectiveMap::new(matrix_from_rows(&mat)?)?)
            }
            DomainSpec::Polygon { .. } => Err(GeometryError::InvalidDomain(
                "polygons have flat boundary segments and are not strictly convex".into(),
            )),
        }
    }
}

impl From<ConvexDomain> for DomainSpec {
    fn from(d: ConvexDomain) -> Self {
        match d {
            ConvexDomain::Ellipse(e) => DomainSpec::Ellipse {
                center: e.center.iter().copied().collect(),
                q: matrix_to_rows(&e.q),
            },
            ConvexDomain::PBall(b) => DomainSpec::Pball {
                p: b.p,
                center: b.center.iter().copied().collect(),
                radius: b.radius,
            },
            ConvexDomain::Transformed(t) => DomainSpec::Transformed {
                base: Box::new(DomainSpec::from(*t.base)),
                mat: matrix_to_rows(t.map.matrix()),
            },
        }
    }
}

/// Outcome of [`ConvexDomain::validate_strict_convexity`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrictnessReport {
    pub samples: usize,
    /// Smallest interior margin `-residual(midpoint)` over all sampled chords.
    pub min_margin: f64,
    pub witness: (Vec<f64>, Vec<f64>),
}

impl ConvexDomain {
    pub fn unit_disk() -> Self {
        Self::ellipse(Vector::zeros(2), Matrix::identity(2, 2)).expect("unit disk is valid")
    }

    pub fn ellipse(center: Vector, q: Matrix) -> Result<Self> {
        Ok(ConvexDomain::Ellipse(Ellipse::new(center, q)?))
    }

    /// Axis-aligned ellipse with the given semi-axes.
    pub fn ellipse_axes(center: Vector, semi_axes: &[f64]) -> Result<Self> {
        if semi_axes.len() != center.len() || semi_axes.iter().any(|a| !(*a > 0.0)) {
            return Err(GeometryError::InvalidDomain("semi-axes must be positive, one per dimension".into()));
        }
        let q = Matrix::from_diagonal(&Vector::from_iterator(
            semi_axes.len(),
            semi_axes.iter().map(|a| 1.0 / (a * a)),
        ));
        Self::ellipse(center, q)
    }

    pub fn pball(p: f64, center: Vector, radius: f64) -> Result<Self> {
        Ok(ConvexDomain::PBall(PBall::new(p, center, radius)?))
    }

    /// `T(base)`; fails unless the closure of the base stays in the chart under `T`.
    /// Nested transforms collapse into one map.
    pub fn transformed(base: ConvexDomain, map: ProjectiveMap) -> Result<Self> {
        if map.dim() != base.dim() {
            return Err(GeometryError::DimensionMismatch { expected: base.dim(), got: map.dim() });
        }
        let (base, map) = match base {
            ConvexDomain::Transformed(t) => {
                let composed = map.compose(&t.map)?;
                (*t.base, composed)
            }
            other => (other, map),
        };
        let n = base.dim();
        let m = map.matrix();
        let c = m.view((n, 0), (1, n)).transpose().column(0).into_owned();
        let d = m[(n, n)];
        let (lo, hi) = match &base {
            ConvexDomain::Ellipse(e) => e.affine_range(&c, d),
            ConvexDomain::PBall(b) => b.affine_range(&c, d),
            ConvexDomain::Transformed(_) => unreachable!("flattened above"),
        };
        let scale = m.norm();
        let map = if lo > 1e-9 * scale {
            map
        } else if hi < -1e-9 * scale {
            ProjectiveMap::new(-m.clone())?
        } else {
            return Err(GeometryError::InvalidDomain(
                "projective image of the domain leaves the affine chart".into(),
            ));
        };
        let inverse = map.inverse();
        Ok(ConvexDomain::Transformed(Transformed { base: Box::new(base), map, inverse }))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexDomain::Ellipse(e) => e.center.len(),
            ConvexDomain::PBall(b) => b.center.len(),
            ConvexDomain::Transformed(t) => t.base.dim(),
        }
    }

    /// A distinguished interior point.
    pub fn center(&self) -> Vector {
        match self {
            ConvexDomain::Ellipse(e) => e.center.clone(),
            ConvexDomain::PBall(b) => b.center.clone(),
            ConvexDomain::Transformed(t) => t.push_forward(&t.base.center()),
        }
    }

    /// Negative inside, zero on the boundary, positive outside.
    pub fn residual(&self, x: &Vector) -> f64 {
        if x.len() != self.dim() {
            return f64::INFINITY;
        }
        match self {
            ConvexDomain::Ellipse(e) => e.residual(x),
            ConvexDomain::PBall(b) => b.gauge(x) - 1.0,
            ConvexDomain::Transformed(t) => match t.pull_back(x) {
                Some(y) => t.base.residual(&y),
                None => f64::INFINITY,
            },
        }
    }

    /// Distance-like interior margin, `-residual(x)`.
    pub fn margin(&self, x: &Vector) -> f64 {
        -self.residual(x)
    }

    /// Membership in the open domain; boundary points are excluded.
    pub fn contains(&self, x: &Vector) -> bool {
        self.residual(x) < 0.0
    }

    /// Parameter `t > 0` where `origin + t dir` meets the boundary.
    pub fn ray_exit(&self, origin: &Vector, dir: &Vector) -> Result<f64> {
        if origin.len() != self.dim() || dir.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), got: origin.len() });
        }
        if !self.contains(origin) {
            return Err(GeometryError::OutsideDomain);
        }
        if dir.norm() <= ZERO_TOL {
            return Err(GeometryError::NoUniqueLine);
        }
        Ok(match self {
            ConvexDomain::Ellipse(e) => e.ray_exit(origin, dir),
            ConvexDomain::PBall(b) => b.ray_exit(origin, dir),
            ConvexDomain::Transformed(t) => {
                let o = t.pull_back(origin).ok_or(GeometryError::OutsideDomain)?;
                let probe = self.ray_probe(origin, dir);
                let p = t.pull_back(&probe).ok_or_else(|| {
                    GeometryError::NumericDegeneracy("ray probe left the chart".into())
                })?;
                let base_dir = p - &o;
                let s = t.base.ray_exit(&o, &base_dir)?;
                let exit = t.push_forward(&(&o + base_dir * s));
                (exit - origin).dot(dir) / dir.norm_squared()
            }
        })
    }

    /// A point a short way along the ray that stays inside the domain.
    fn ray_probe(&self, origin: &Vector, dir: &Vector) -> Vector {
        let mut step = 1.0;
        loop {
            let p = origin + dir * step;
            if self.contains(&p) || step < 1e-12 {
                return p;
            }
            step *= 0.5;
        }
    }

    /// Chord parameters `(t_minus, t_plus)` of the line `x + t (y - x)`, with
    /// `t_minus < 0 < 1 < t_plus`.
    pub fn chord_params(&self, x: &Vector, y: &Vector) -> Result<(f64, f64)> {
        if x.len() != self.dim() || y.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        if !self.contains(x) || !self.contains(y) {
            return Err(GeometryError::OutsideDomain);
        }
        let dir = y - x;
        if dir.norm() <= ZERO_TOL * (1.0 + x.norm()) {
            return Err(GeometryError::NoUniqueLine);
        }
        let t_plus = self.ray_exit(x, &dir)?;
        let t_minus = -self.ray_exit(x, &(-&dir))?;
        Ok((t_minus, t_plus))
    }

    /// Boundary endpoints `(a, b)` of the chord through `x` and `y`, ordered
    /// so the line reads `a, x, y, b`.
    pub fn boundary_intersections(&self, x: &Vector, y: &Vector) -> Result<(Vector, Vector)> {
        let dir = y - x;
        let (t_minus, t_plus) = self.chord_params(x, y)?;
        Ok((x + &dir * t_minus, x + &dir * t_plus))
    }

    /// Boundary point on the ray from the center in direction `dir`.
    pub fn boundary_point(&self, dir: &Vector) -> Result<Vector> {
        let c = self.center();
        let t = self.ray_exit(&c, dir)?;
        Ok(c + dir * t)
    }

    pub fn sample_interior<R: Rng>(&self, rng: &mut R) -> Vector {
        match self {
            ConvexDomain::Ellipse(e) => e.sample(rng),
            ConvexDomain::PBall(b) => b.sample(rng),
            ConvexDomain::Transformed(t) => t.push_forward(&t.base.sample_interior(rng)),
        }
    }

    /// Deterministic interior point for a seed.
    pub fn random_interior_point(&self, seed: u64) -> Vector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_interior(&mut rng)
    }

    /// Random unit direction in the chart.
    pub fn random_direction<R: Rng>(&self, rng: &mut R) -> Vector {
        loop {
            let v = Vector::from_fn(self.dim(), |_, _| rng.random_range(-1.0..1.0));
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                return v / n;
            }
        }
    }

    /// Probe strict convexity: midpoints of chords between random boundary
    /// points must lie strictly inside.
    pub fn validate_strict_convexity(&self, sample_count: usize, seed: u64) -> Result<StrictnessReport> {
        if sample_count < 3 {
            return Err(GeometryError::Precondition("sample count must be at least 3".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = StrictnessReport { samples: sample_count, min_margin: f64::INFINITY, witness: (vec![], vec![]) };
        for _ in 0..sample_count {
            let u = self.random_direction(&mut rng);
            // second direction at a random angular offset, from nearly equal to far apart
            let spread = 10f64.powf(rng.random_range(-2.0..0.5));
            let w = {
                let v = &u + self.random_direction(&mut rng) * spread;
                if v.norm() < 1e-6 { -&u } else { v.normalize() }
            };
            let a = self.boundary_point(&u)?;
            let b = self.boundary_point(&w)?;
            if (&a - &b).norm() < 1e-9 {
                continue;
            }
            let mid = (&a + &b) * 0.5;
            let margin = self.margin(&mid);
            if margin < report.min_margin {
                report.min_margin = margin;
                report.witness = (a.iter().copied().collect(), b.iter().copied().collect());
            }
            if !(margin > 0.0) {
                return Err(GeometryError::StrictnessViolation {
                    a: a.iter().copied().collect(),
                    b: b.iter().copied().collect(),
                    margin,
                });
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::vector;

    #[test]
    fn disk_membership() {
        let disk = ConvexDomain::unit_disk();
        assert!(disk.contains(&vector(&[0.0, 0.0])));
        assert!(!disk.contains(&vector(&[1.0, 0.0])));
        assert!(!disk.contains(&vector(&[0.8, 0.8])));
    }

    #[test]
    fn disk_diameter_chord() {
        let disk = ConvexDomain::unit_disk();
        let (a, b) = disk.boundary_intersections(&vector(&[0.0, 0.0]), &vector(&[0.5, 0.0])).unwrap();
        assert!((a - vector(&[-1.0, 0.0])).norm() < 1e-15);
        assert!((b - vector(&[1.0, 0.0])).norm() < 1e-15);
    }

    #[test]
    fn ellipse_closed_form_chord() {
        let e = ConvexDomain::ellipse_axes(vector(&[0.0, 0.0]), &[2.0, 1.0]).unwrap();
        let (a, b) = e.boundary_intersections(&vector(&[0.0, 0.0]), &vector(&[1.0, 0.0])).unwrap();
        assert!((a - vector(&[-2.0, 0.0])).norm() < 1e-15);
        assert!((b - vector(&[2.0, 0.0])).norm() < 1e-15);
    }

    #[test]
    fn chord_errors() {
        let disk = ConvexDomain::unit_disk();
        let x = vector(&[0.1, 0.2]);
        assert_eq!(disk.boundary_intersections(&x, &x.clone()), Err(GeometryError::NoUniqueLine));
        assert_eq!(
            disk.boundary_intersections(&x, &vector(&[1.5, 0.0])),
            Err(GeometryError::OutsideDomain)
        );
    }

    #[test]
    fn degenerate_and_flat_shapes_rejected() {
        let q = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(ConvexDomain::ellipse(vector(&[0.0, 0.0]), q), Err(GeometryError::InvalidDomain(_))));
        assert!(ConvexDomain::pball(1.0, vector(&[0.0, 0.0]), 1.0).is_err());
        assert!(ConvexDomain::pball(f64::INFINITY, vector(&[0.0, 0.0]), 1.0).is_err());
        let polygon = r#"{"type":"polygon","vertices":[[0,0],[1,0],[0,1]]}"#;
        assert!(serde_json::from_str::<ConvexDomain>(polygon).is_err());
    }

    #[test]
    fn strictness_validator_passes_on_analytic_shapes() {
        let disk = ConvexDomain::unit_disk();
        let r = disk.validate_strict_convexity(1000, 1).unwrap();
        assert!(r.min_margin > 0.0);
        let ball = ConvexDomain::pball(1.5, vector(&[0.0, 0.0]), 1.0).unwrap();
        assert!(ball.validate_strict_convexity(1000, 2).unwrap().min_margin > 0.0);
        assert!(disk.validate_strict_convexity(2, 0).is_err());
    }

    #[test]
    fn random_points_are_deterministic_and_inside() {
        let disk = ConvexDomain::unit_disk();
        let p = disk.random_interior_point(0);
        assert!(disk.contains(&p));
        assert_eq!(p, disk.random_interior_point(0));
        let t = ProjectiveMap::new(Matrix::from_row_slice(3, 3, &[1.0, 0.2, 0.1, 0.0, 0.9, 0.0, 0.1, 0.2, 1.5])).unwrap();
        let td = ConvexDomain::transformed(disk, t).unwrap();
        for seed in 0..20 {
            assert!(td.contains(&td.random_interior_point(seed)));
        }
    }

    #[test]
    fn chart_leaving_transform_rejected() {
        let disk = ConvexDomain::unit_disk();
        let t = ProjectiveMap::new(Matrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 2.0, 0.0, 1.0])).unwrap();
        assert!(ConvexDomain::transformed(disk, t).is_err());
    }

    #[test]
    fn json_round_trip_schema() {
        let json = r#"{"type":"pball","p":4.0,"center":[0.0,0.0],"radius":1.0}"#;
        let d: ConvexDomain = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string(&d).unwrap(), json);
        let json = r#"{"type":"transformed","base":{"type":"ellipse","center":[0,0],"q":[[1,0],[0,1]]},"mat":[[1,0,0],[0,1,0],[0.2,0,1]]}"#;
        let d: ConvexDomain = serde_json::from_str(json).unwrap();
        assert!(d.contains(&d.center()));
    }
}
