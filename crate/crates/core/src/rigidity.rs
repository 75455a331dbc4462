//! Line-preserving maps: order and interval checks on sampled maps, the
//! separating-lines configuration, projective fitting, and isometry checks.
//!
//! Sampled checks return three-valued verdicts. A sample can refute a property
//! or fail to refute it; groups too small to test anything are reported as
//! vacuous rather than counted as evidence.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::ConvexDomain;
use crate::error::{GeometryError, Result};
use crate::metric::hilbert_distance;
use crate::projective::{
    collinearity_defect, coplanarity_defect, projective_to_flt, Matrix, ProjectiveMap, Vector, COLLINEAR_TOL,
    POINT_TOL, ZERO_TOL,
};

/// Relative slack in the betweenness test `|xy| + |yz| - |xz| < tol |xz|`.
pub const BETWEEN_TOL: f64 = 1e-9;
/// Open-segment margin for the separating-configuration intersection predicates.
pub const INTERSECTION_TOL: f64 = 1e-9;
/// Largest boundary defect under which a map counts as preserving the domain.
pub const PRESERVATION_TOL: f64 = 1e-6;
/// Fitted `b`, `c` blocks below this count as zero for disk isometries.
pub const DISK_BLOCK_TOL: f64 = 1e-6;

/// `y` lies on the closed segment `[x, z]`.
pub fn is_between(x: &Vector, y: &Vector, z: &Vector) -> bool {
    let xz = (z - x).norm();
    (y - x).norm() + (z - y).norm() - xz < BETWEEN_TOL * xz
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Holds,
    Fails,
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub group: usize,
    /// Sample indices; for triples the middle index is the one whose image misbehaves.
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub witness: Option<Witness>,
    pub groups_checked: usize,
    pub groups_skipped: usize,
}

impl Verdict {
    fn from_counts(checked: usize, skipped: usize) -> Self {
        Verdict {
            status: if checked == 0 { VerdictStatus::Vacuous } else { VerdictStatus::Holds },
            witness: None,
            groups_checked: checked,
            groups_skipped: skipped,
        }
    }

    fn fails(group: usize, indices: Vec<usize>, checked: usize, skipped: usize) -> Self {
        Verdict {
            status: VerdictStatus::Fails,
            witness: Some(Witness { group, indices }),
            groups_checked: checked,
            groups_skipped: skipped,
        }
    }

    /// True for `Holds` and `Vacuous`.
    pub fn is_true(&self) -> bool {
        self.status != VerdictStatus::Fails
    }
}

/// One sampled correspondence as stored in JSON sample files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplePair {
    pub input: Vec<f64>,
    pub output: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane: Option<serde_json::Value>,
}

/// Finite tabulation of a map with pairs grouped by source line (and, in
/// dimension 3, optionally by source plane).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledLineMap {
    pairs: Vec<(Vector, Vector)>,
    lines: Vec<Vec<usize>>,
    planes: Vec<Vec<usize>>,
}

fn group_labels(labels: impl Iterator<Item = Option<String>>) -> Vec<Vec<usize>> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, label) in labels.enumerate() {
        if let Some(label) = label {
            if !groups.contains_key(&label) {
                order.push(label.clone());
            }
            groups.entry(label).or_default().push(i);
        }
    }
    order.into_iter().map(|l| groups.remove(&l).unwrap_or_default()).collect()
}

fn label_text(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl SampledLineMap {
    pub fn new(pairs: Vec<(Vector, Vector)>, lines: Vec<Vec<usize>>, planes: Vec<Vec<usize>>) -> Result<Self> {
        let dim = pairs.first().map(|p| p.0.len()).unwrap_or(2);
        for (x, y) in &pairs {
            if x.len() != dim || y.len() != dim {
                return Err(GeometryError::DimensionMismatch { expected: dim, got: x.len().max(y.len()) });
            }
        }
        for i in 0..pairs.len() {
            for j in (i + 1)..pairs.len() {
                if (&pairs[i].0 - &pairs[j].0).norm() <= POINT_TOL {
                    return Err(GeometryError::Precondition(format!("inputs {i} and {j} coincide")));
                }
                if (&pairs[i].1 - &pairs[j].1).norm() <= POINT_TOL {
                    return Err(GeometryError::Precondition(format!(
                        "outputs {i} and {j} coincide (map not injective on the sample)"
                    )));
                }
            }
        }
        for group in lines.iter().chain(planes.iter()) {
            if group.iter().any(|&i| i >= pairs.len()) {
                return Err(GeometryError::InvalidInput("group index out of range".into()));
            }
        }
        for (g, group) in lines.iter().enumerate() {
            let pts: Vec<&Vector> = group.iter().map(|&i| &pairs[i].0).collect();
            let defect = collinearity_defect(&pts);
            if defect > COLLINEAR_TOL {
                return Err(GeometryError::Precondition(format!(
                    "inputs of line group {g} are not collinear (defect {defect:.3e})"
                )));
            }
        }
        for (g, group) in planes.iter().enumerate() {
            let pts: Vec<&Vector> = group.iter().map(|&i| &pairs[i].0).collect();
            let defect = coplanarity_defect(&pts);
            if defect > COLLINEAR_TOL {
                return Err(GeometryError::Precondition(format!(
                    "inputs of plane group {g} are not coplanar (defect {defect:.3e})"
                )));
            }
        }
        Ok(Self { pairs, lines, planes })
    }

    pub fn from_samples(samples: &[SamplePair]) -> Result<Self> {
        let pairs = samples
            .iter()
            .map(|s| (Vector::from_vec(s.input.clone()), Vector::from_vec(s.output.clone())))
            .collect();
        let lines = group_labels(samples.iter().map(|s| s.line.as_ref().map(label_text)));
        let planes = group_labels(samples.iter().map(|s| s.plane.as_ref().map(label_text)));
        Self::new(pairs, lines, planes)
    }

    pub fn to_samples(&self) -> Vec<SamplePair> {
        let mut line_of = vec![None; self.pairs.len()];
        for (g, group) in self.lines.iter().enumerate() {
            for &i in group {
                line_of[i] = Some(serde_json::Value::from(g));
            }
        }
        let mut plane_of = vec![None; self.pairs.len()];
        for (g, group) in self.planes.iter().enumerate() {
            for &i in group {
                plane_of[i] = Some(serde_json::Value::from(g));
            }
        }
        self.pairs
            .iter()
            .enumerate()
            .map(|(i, (x, y))| SamplePair {
                input: x.iter().copied().collect(),
                output: y.iter().copied().collect(),
                line: line_of[i].clone(),
                plane: plane_of[i].clone(),
            })
            .collect()
    }

    /// Samples of `map` on random chords of `domain`: `line_count` chords with
    /// `points_per_line` interior points each.
    pub fn sample_map(
        map: &ProjectiveMap,
        domain: &ConvexDomain,
        line_count: usize,
        points_per_line: usize,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pairs = Vec::new();
        let mut lines = Vec::new();
        for _ in 0..line_count {
            let x = domain.sample_interior(&mut rng);
            let y = domain.sample_interior(&mut rng);
            let (a, b) = domain.boundary_intersections(&x, &y)?;
            let mut group = Vec::new();
            for _ in 0..points_per_line {
                let s: f64 = rng.random_range(0.02..0.98);
                let p = &a + (&b - &a) * s;
                group.push(pairs.len());
                pairs.push((p.clone(), map.apply_affine(&p)?));
            }
            lines.push(group);
        }
        Self::new(pairs, lines, Vec::new())
    }

    pub fn pairs(&self) -> &[(Vector, Vector)] {
        &self.pairs
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    pub fn planes(&self) -> &[Vec<usize>] {
        &self.planes
    }

    pub fn dim(&self) -> usize {
        self.pairs.first().map(|p| p.0.len()).unwrap_or(2)
    }

    /// Outputs become inputs; groups are kept.
    pub fn reversed(&self) -> Result<Self> {
        let pairs = self.pairs.iter().map(|(x, y)| (y.clone(), x.clone())).collect();
        Self::new(pairs, self.lines.clone(), self.planes.clone())
    }
}

/// Betweenness of inputs must imply betweenness of outputs in every line group.
pub fn check_order_preserving(m: &SampledLineMap) -> Result<Verdict> {
    let (mut checked, mut skipped) = (0, 0);
    for (g, group) in m.lines.iter().enumerate() {
        if group.len() < 3 {
            skipped += 1;
            continue;
        }
        let outputs: Vec<&Vector> = group.iter().map(|&i| &m.pairs[i].1).collect();
        if collinearity_defect(&outputs) > COLLINEAR_TOL {
            return Err(GeometryError::GeodesicViolation { group: g });
        }
        checked += 1;
        if let Some(triple) = first_betweenness_violation(m, group) {
            return Ok(Verdict::fails(g, triple, checked, skipped));
        }
    }
    Ok(Verdict::from_counts(checked, skipped))
}

/// Triple `(i, j, k)` with input `j` between inputs `i`, `k` whose output is not.
fn first_betweenness_violation(m: &SampledLineMap, group: &[usize]) -> Option<Vec<usize>> {
    for (p, &i) in group.iter().enumerate() {
        for &k in &group[p + 1..] {
            for &j in group {
                if j == i || j == k {
                    continue;
                }
                let (xi, yi) = &m.pairs[i];
                let (xj, yj) = &m.pairs[j];
                let (xk, yk) = &m.pairs[k];
                if is_between(xi, xj, xk) && !is_between(yi, yj, yk) {
                    return Some(vec![i, j, k]);
                }
            }
        }
    }
    None
}

/// Images of points between `x` and `y` must lie on the segment `[f(x), f(y)]`.
///
/// An image pushed off the line is reported as a failure with its triple
/// rather than as a geodesic violation: off the line is also off the segment.
pub fn check_interval_preserving(m: &SampledLineMap) -> Result<Verdict> {
    let (mut checked, mut skipped) = (0, 0);
    for (g, group) in m.lines.iter().enumerate() {
        if group.len() < 3 {
            skipped += 1;
            continue;
        }
        checked += 1;
        if let Some(triple) = first_betweenness_violation(m, group) {
            return Ok(Verdict::fails(g, triple, checked, skipped));
        }
    }
    Ok(Verdict::from_counts(checked, skipped))
}

/// Coplanar input groups must have coplanar images. Dimension 3 only.
pub fn subspace_preservation_check(m: &SampledLineMap) -> Result<Verdict> {
    if m.dim() != 3 {
        return Err(GeometryError::Precondition("subspace check needs samples in dimension 3".into()));
    }
    let (mut checked, mut skipped) = (0, 0);
    for (g, group) in m.planes.iter().enumerate() {
        if group.len() < 4 {
            skipped += 1;
            continue;
        }
        checked += 1;
        let outputs: Vec<&Vector> = group.iter().map(|&i| &m.pairs[i].1).collect();
        if coplanarity_defect(&outputs) > COLLINEAR_TOL {
            return Ok(Verdict::fails(g, group.clone(), checked, skipped));
        }
    }
    Ok(Verdict::from_counts(checked, skipped))
}

/// Translation and isotropic scaling taking the points to centroid 0 and RMS norm `sqrt 2`.
fn normalizing_similarity(points: &[&Vector]) -> Matrix {
    let n = points[0].len();
    let count = points.len() as f64;
    let centroid = points.iter().fold(Vector::zeros(n), |acc, p| acc + *p) / count;
    let rms = (points.iter().map(|p| (*p - &centroid).norm_squared()).sum::<f64>() / count).sqrt();
    let scale = if rms > ZERO_TOL { 2f64.sqrt() / rms } else { 1.0 };
    let mut s = Matrix::identity(n + 1, n + 1) * scale;
    s[(n, n)] = 1.0;
    for i in 0..n {
        s[(i, n)] = -scale * centroid[i];
    }
    s
}

fn lift(s: &Matrix, p: &Vector) -> Vector {
    let n = p.len();
    let mut h = Vector::from_element(n + 1, 1.0);
    h.rows_mut(0, n).copy_from(p);
    s * h
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectiveFit {
    pub map: ProjectiveMap,
    /// Largest Euclidean reprojection error over the pairs.
    pub residual: f64,
    /// Ratio of the second-smallest to the largest singular value of the stacked system.
    pub conditioning: f64,
}

/// Normalized direct linear fit of the projective map taking inputs to outputs.
pub fn fit_projective_map(pairs: &[(Vector, Vector)]) -> Result<ProjectiveFit> {
    let n = pairs.first().map(|p| p.0.len()).ok_or_else(|| {
        GeometryError::DegenerateConfiguration("no correspondences".into())
    })?;
    if pairs.iter().any(|(x, y)| x.len() != n || y.len() != n) {
        return Err(GeometryError::DimensionMismatch { expected: n, got: 0 });
    }
    if pairs.len() < n + 2 {
        return Err(GeometryError::DegenerateConfiguration(format!(
            "need at least {} correspondences, got {}",
            n + 2,
            pairs.len()
        )));
    }
    let inputs: Vec<&Vector> = pairs.iter().map(|p| &p.0).collect();
    let outputs: Vec<&Vector> = pairs.iter().map(|p| &p.1).collect();
    let s_in = normalizing_similarity(&inputs);
    let s_out = normalizing_similarity(&outputs);
    let size = n + 1;
    let unknowns = size * size;
    let rows = (pairs.len() * n).max(unknowns);
    let mut system = Matrix::zeros(rows, unknowns);
    for (k, (x, y)) in pairs.iter().enumerate() {
        let xh = lift(&s_in, x);
        let yh = lift(&s_out, y);
        for i in 0..n {
            let r = k * n + i;
            for j in 0..size {
                // entry (i, j) of the unknown matrix, row-major
                system[(r, i * size + j)] = yh[n] * xh[j];
                system[(r, n * size + j)] = -yh[i] * xh[j];
            }
        }
    }
    let svd = system.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let largest = svd.singular_values[order[0]];
    let second_smallest = svd.singular_values[order[order.len() - 2]];
    let conditioning = if largest > 0.0 { second_smallest / largest } else { 0.0 };
    if !(conditioning >= 1e-10) {
        return Err(GeometryError::DegenerateConfiguration(format!(
            "correspondences do not determine a unique map (singular value ratio {conditioning:.3e})"
        )));
    }
    let h = v_t.row(order[order.len() - 1]);
    let normalized = Matrix::from_fn(size, size, |i, j| h[i * size + j]);
    let s_out_inv = s_out.try_inverse().expect("similarity is invertible");
    let map = ProjectiveMap::new(s_out_inv * normalized * s_in)?.canonical();
    let mut residual: f64 = 0.0;
    for (x, y) in pairs {
        let err = match map.apply_affine(x) {
            Ok(fx) => (fx - y).norm(),
            Err(_) => f64::INFINITY,
        };
        residual = residual.max(err);
    }
    Ok(ProjectiveFit { map, residual, conditioning })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreservationReport {
    /// Largest radial distance from an image of a boundary sample to the boundary.
    pub boundary_defect: f64,
    pub interior_samples: usize,
    pub interior_escapes: usize,
}

impl PreservationReport {
    pub fn preserved(&self, tol: f64) -> bool {
        self.boundary_defect < tol && self.interior_escapes == 0
    }
}

fn radial_boundary_gap(domain: &ConvexDomain, p: &Vector) -> f64 {
    let c = domain.center();
    let dir = p - &c;
    if dir.norm() <= ZERO_TOL {
        return f64::INFINITY;
    }
    match domain.boundary_point(&dir) {
        Ok(b) => (p - b).norm(),
        Err(_) => f64::INFINITY,
    }
}

/// How far `t` is from mapping `domain` onto itself, on deterministic samples.
pub fn verify_domain_preserved(t: &ProjectiveMap, domain: &ConvexDomain, sample_count: usize) -> PreservationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut boundary_defect: f64 = 0.0;
    let mut interior_escapes = 0;
    let c = domain.center();
    for _ in 0..sample_count {
        let u = domain.random_direction(&mut rng);
        let gap = match domain.boundary_point(&u).and_then(|b| t.apply_affine(&b)) {
            Ok(image) => radial_boundary_gap(domain, &image),
            Err(_) => f64::INFINITY,
        };
        boundary_defect = boundary_defect.max(gap);
        let x = domain.sample_interior(&mut rng);
        let inside = t.apply_affine(&x).map(|y| domain.contains(&y)).unwrap_or(false)
            && t.chart_denominator(&x).signum() == t.chart_denominator(&c).signum();
        if !inside {
            interior_escapes += 1;
        }
    }
    PreservationReport { boundary_defect, interior_samples: sample_count, interior_escapes }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryReport {
    pub max_defect: f64,
    pub pairs: usize,
    pub preservation: PreservationReport,
}

/// Largest `|d(Tx, Ty) - d(x, y)|` over random pairs.
pub fn verify_isometry(t: &ProjectiveMap, domain: &ConvexDomain, pair_count: usize, seed: u64) -> Result<IsometryReport> {
    let preservation = verify_domain_preserved(t, domain, pair_count.max(16));
    if !preservation.preserved(PRESERVATION_TOL) {
        return Err(GeometryError::Precondition(format!(
            "map does not preserve the domain (boundary defect {:.3e}, {} interior escapes)",
            preservation.boundary_defect, preservation.interior_escapes
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_defect: f64 = 0.0;
    for _ in 0..pair_count {
        let x = domain.sample_interior(&mut rng);
        let y = domain.sample_interior(&mut rng);
        let before = hilbert_distance(domain, &x, &y)?;
        let after = hilbert_distance(domain, &t.apply_affine(&x)?, &t.apply_affine(&y)?)?;
        max_defect = max_defect.max((after - before).abs());
    }
    Ok(IsometryReport { max_defect, pairs: pair_count, preservation })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthogonalRecovery {
    pub orthogonal: Vec<Vec<f64>>,
    /// `max |B^T B - I|` entrywise.
    pub orthogonality_defect: f64,
    pub fit_residual: f64,
}

/// For samples of a unit-disk isometry fixing the origin, fit the map and
/// read off the orthogonal linear part.
pub fn disk_recover_orthogonal(m: &SampledLineMap) -> Result<OrthogonalRecovery> {
    let disk = ConvexDomain::unit_disk();
    if m.dim() != 2 {
        return Err(GeometryError::Precondition("disk samples must be planar".into()));
    }
    if m.pairs.iter().any(|(x, y)| !disk.contains(x) || !disk.contains(y)) {
        return Err(GeometryError::Precondition("samples must lie in the open unit disk".into()));
    }
    let origin = m
        .pairs
        .iter()
        .find(|(x, _)| x.norm() <= POINT_TOL)
        .ok_or_else(|| GeometryError::Precondition("sample must contain the pair 0 -> f(0)".into()))?;
    if origin.1.norm() > POINT_TOL {
        return Err(GeometryError::Precondition(format!(
            "f(0) = ({:.6}, {:.6}) is not the origin",
            origin.1[0], origin.1[1]
        )));
    }
    let fit = fit_projective_map(&m.pairs)?;
    let flt = projective_to_flt(&fit.map, 2)?;
    if flt.d.abs() <= ZERO_TOL {
        return Err(GeometryError::NotDiskIsometry("fitted map sends the origin to infinity".into()));
    }
    let b = &flt.b / flt.d;
    let c = &flt.c / flt.d;
    if b.amax() > DISK_BLOCK_TOL || c.amax() > DISK_BLOCK_TOL {
        return Err(GeometryError::NotDiskIsometry(format!(
            "translation part {:.3e} or denominator part {:.3e} is nonzero",
            b.amax(),
            c.amax()
        )));
    }
    let orth = &flt.a / flt.d;
    let defect = (orth.transpose() * &orth - Matrix::identity(2, 2)).amax();
    Ok(OrthogonalRecovery {
        orthogonal: crate::projective::matrix_to_rows(&orth),
        orthogonality_defect: defect,
        fit_residual: fit.residual,
    })
}

/// A chord of the domain given by its two boundary endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chord {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
}

impl Chord {
    fn new(start: &Vector, end: &Vector) -> Self {
        Chord { start: start.iter().copied().collect(), end: end.iter().copied().collect() }
    }

    fn points(&self) -> (Vector, Vector) {
        (Vector::from_vec(self.start.clone()), Vector::from_vec(self.end.clone()))
    }
}

/// Hyperplane section through a chord; in the plane it is the chord itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section {
    pub chord: Chord,
    /// Unit normal of the cutting plane (dimension 3 only).
    pub normal: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationChecks {
    /// `a` on `L_a`, `b` on `H_b`, `c` on `H_c`.
    pub incidence: bool,
    pub max_incidence_defect: f64,
    /// `H_b` and `H_c` meet inside the domain.
    pub sections_meet_inside: bool,
    pub meeting_point: Option<Vec<f64>>,
    /// `L_a` meets neither section inside the domain.
    pub line_avoids_sections: bool,
}

impl SeparationChecks {
    pub fn all_hold(&self) -> bool {
        self.incidence && self.sections_meet_inside && self.line_avoids_sections
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparatingConfiguration {
    pub l_a: Chord,
    pub h_b: Section,
    pub h_c: Section,
    /// Boundary witnesses: `x` shared by `L_a` and `L_c`, `y` the far end of
    /// `L_a` (start of `L_b`), `z` the far end of `L_c`.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub checks: SeparationChecks,
}

fn far_endpoint(domain: &ConvexDomain, through: &Vector, from: &Vector) -> Result<Vector> {
    let dir = through - from;
    Ok(through + &dir * domain.ray_exit(through, &dir)?)
}

fn point_line_distance(p: &Vector, a: &Vector, b: &Vector) -> f64 {
    let u = (b - a).normalize();
    let d = p - a;
    (&d - &u * d.dot(&u)).norm()
}

/// Coordinates `(s, r)` with `p0 + s (p1 - p0) = q0 + r (q1 - q0)` for two
/// lines in a plane spanned by `e1`, `e2`; `None` when parallel.
fn planar_line_params(p0: &Vector, p1: &Vector, q0: &Vector, q1: &Vector, e1: &Vector, e2: &Vector) -> Option<(f64, f64)> {
    let u = p1 - p0;
    let v = q1 - q0;
    let w = q0 - p0;
    let (u1, u2) = (u.dot(e1), u.dot(e2));
    let (v1, v2) = (v.dot(e1), v.dot(e2));
    let (w1, w2) = (w.dot(e1), w.dot(e2));
    let det = -u1 * v2 + u2 * v1;
    if det.abs() <= ZERO_TOL * u.norm() * v.norm() {
        return None;
    }
    let s = (-w1 * v2 + w2 * v1) / det;
    let r = (u1 * w2 - u2 * w1) / det;
    Some((s, r))
}

fn open_unit(s: f64) -> bool {
    s > INTERSECTION_TOL && s < 1.0 - INTERSECTION_TOL
}

fn perpendicular(u: &Vector) -> Vector {
    if u.len() == 2 {
        return Vector::from_vec(vec![-u[1], u[0]]);
    }
    let k = u.iamin();
    let mut e = Vector::zeros(u.len());
    e[k] = 1.0;
    (&e - u * e.dot(u)).normalize()
}

/// Build the separating configuration for ordered collinear `a, b, c`.
///
/// `x` is where the perpendicular bisector of the chord through `a, c` meets
/// the boundary; `L_a = xy` through `a`, `L_c = xz` through `c`, and `L_b`
/// runs from `y` through `b`. In dimension 3 everything lives in a plane `P`
/// containing the chord, and `H_b`, `H_c` are spanned by `L_b`, `L_c` and the
/// normal of `P`.
pub fn construct_separating(domain: &ConvexDomain, a: &Vector, b: &Vector, c: &Vector) -> Result<SeparatingConfiguration> {
    let n = domain.dim();
    if a.len() != n || b.len() != n || c.len() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, got: a.len() });
    }
    if !domain.contains(a) || !domain.contains(b) || !domain.contains(c) {
        return Err(GeometryError::Precondition("a, b, c must lie in the domain".into()));
    }
    let scale = (c - a).norm();
    if (b - a).norm() <= POINT_TOL || (c - b).norm() <= POINT_TOL || scale <= POINT_TOL {
        return Err(GeometryError::Precondition("a, b, c must be distinct".into()));
    }
    if collinearity_defect(&[a, b, c]) > COLLINEAR_TOL {
        return Err(GeometryError::Precondition("a, b, c are not collinear".into()));
    }
    if !is_between(a, b, c) {
        return Err(GeometryError::Precondition("b does not lie between a and c".into()));
    }
    let (p_minus, p_plus) = domain.boundary_intersections(a, c)?;
    let u = (c - a) / scale;
    let nu = perpendicular(&u);
    let mid = (&p_minus + &p_plus) * 0.5;
    let x = &mid + &nu * domain.ray_exit(&mid, &nu)?;
    let y = far_endpoint(domain, a, &x)?;
    let z = far_endpoint(domain, c, &x)?;
    let w = far_endpoint(domain, b, &y)?;

    let plane_normal = if n == 3 { Some(u.cross(&nu)) } else { None };
    let section_normal = |p: &Vector, q: &Vector| plane_normal.as_ref().map(|e| (q - p).cross(e).normalize());
    let n_b = section_normal(&y, &w);
    let n_c = section_normal(&x, &z);

    let mut defect = point_line_distance(a, &x, &y);
    defect = defect.max(point_line_distance(b, &y, &w));
    defect = defect.max(point_line_distance(c, &x, &z));
    let incidence = defect <= INTERSECTION_TOL * (1.0 + scale);

    let meet = planar_line_params(&y, &w, &x, &z, &u, &nu);
    let meeting_point = meet.map(|(s, _)| &y + (&w - &y) * s);
    let sections_meet_inside = match (&meet, &meeting_point) {
        (Some((s, r)), Some(p)) => open_unit(*s) && open_unit(*r) && domain.contains(p),
        _ => false,
    };

    let avoids = |p: &Vector, q: &Vector, normal: &Option<Vector>| -> bool {
        match normal {
            None => match planar_line_params(&x, &y, p, q, &u, &nu) {
                Some((s, r)) => !(open_unit(s) && open_unit(r)),
                None => true,
            },
            Some(nrm) => {
                let along = nrm.dot(&(&y - &x));
                let offset = nrm.dot(&(p - &x));
                if along.abs() <= ZERO_TOL {
                    return offset.abs() > INTERSECTION_TOL;
                }
                !open_unit(offset / along)
            }
        }
    };
    let line_avoids_sections = avoids(&y, &w, &n_b) && avoids(&x, &z, &n_c);

    Ok(SeparatingConfiguration {
        l_a: Chord::new(&x, &y),
        h_b: Section { chord: Chord::new(&y, &w), normal: n_b.map(|v| v.iter().copied().collect()) },
        h_c: Section { chord: Chord::new(&x, &z), normal: n_c.map(|v| v.iter().copied().collect()) },
        x: x.iter().copied().collect(),
        y: y.iter().copied().collect(),
        z: z.iter().copied().collect(),
        checks: SeparationChecks {
            incidence,
            max_incidence_defect: defect,
            sections_meet_inside,
            meeting_point: meeting_point.map(|p| p.iter().copied().collect()),
            line_avoids_sections,
        },
    })
}

impl SeparatingConfiguration {
    /// Chord endpoints `(L_a, L_b, L_c)` as vectors.
    pub fn chords(&self) -> [(Vector, Vector); 3] {
        [self.l_a.points(), self.h_b.chord.points(), self.h_c.chord.points()]
    }
}
