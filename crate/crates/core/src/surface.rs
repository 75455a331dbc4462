//! Closed convex projective surfaces given by holonomy generators.
//!
//! Group elements are 3x3 matrices acting on the affine chart `z = 1` of the
//! projective plane. Words are evaluated left to right, so `a1b1` is the
//! matrix product `A1 * B1`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{Matrix2, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::domain::ConvexDomain;
use crate::error::{GeometryError, Result};
use crate::metric::{hilbert_distance, point_at_distance};
use crate::projective::{Matrix, ProjectiveMap, Vector};
use crate::rigidity::verify_domain_preserved;
use crate::word::{GroupWord, Letter};

/// Relative modulus gap below which two eigenvalues count as equal.
pub const EIGEN_GAP_TOL: f64 = 1e-9;
/// Allowed residual of fixed points against the boundary equation.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Allowed deviation of the relator from the identity.
pub const RELATOR_TOL: f64 = 1e-8;
/// Improvement required for a Dirichlet descent step.
const DESCENT_TOL: f64 = 1e-12;

/// Scale to unit determinant.
pub fn unit_det(m: &Matrix3<f64>) -> Matrix3<f64> {
    let det = m.determinant();
    m / det.cbrt()
}

pub fn to_projective(m: &Matrix3<f64>) -> Result<ProjectiveMap> {
    ProjectiveMap::new(Matrix::from_column_slice(3, 3, m.as_slice()))
}

pub fn matrix3_rows(m: &Matrix3<f64>) -> Vec<Vec<f64>> {
    (0..3).map(|i| (0..3).map(|j| m[(i, j)]).collect()).collect()
}

fn matrix3_from_rows(rows: &[Vec<f64>]) -> Result<Matrix3<f64>> {
    if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
        return Err(GeometryError::InvalidInput("generators must be 3x3 matrices".into()));
    }
    Ok(Matrix3::from_fn(|i, j| rows[i][j]))
}

/// Chart point of a homogeneous vector, or `None` at infinity.
pub fn dehomogenize(v: &Vector3<f64>) -> Option<Vector> {
    if v[2].abs() <= 1e-12 * v.norm() {
        return None;
    }
    Some(Vector::from_vec(vec![v[0] / v[2], v[1] / v[2]]))
}

pub fn homogenize(p: &Vector) -> Vector3<f64> {
    Vector3::new(p[0], p[1], 1.0)
}

pub fn act(m: &Matrix3<f64>, p: &Vector) -> Option<Vector> {
    dehomogenize(&(m * homogenize(p)))
}

/// Image of `m` in SO(2,1) acting on the Klein disk.
///
/// A symmetric matrix `[[z + x, y], [y, z - x]]` is sent to `m S m^T`; the
/// form `z^2 - x^2 - y^2 = det S` is preserved, so the disk `x^2 + y^2 < 1`
/// in the chart `z = 1` is preserved. A rotation by `t` in SL(2) becomes a
/// rotation of the disk by `2t`.
pub fn sl2_to_so21(m: &Matrix2<f64>) -> Result<Matrix3<f64>> {
    let det = m.determinant();
    if (det - 1.0).abs() > 1e-9 * m.norm_squared().max(1.0) {
        return Err(GeometryError::Precondition(format!("SL(2) input needs determinant 1, got {det}")));
    }
    let basis = [
        Matrix2::new(1.0, 0.0, 0.0, -1.0),
        Matrix2::new(0.0, 1.0, 1.0, 0.0),
        Matrix2::new(1.0, 0.0, 0.0, 1.0),
    ];
    let mut out = Matrix3::zeros();
    for (col, s) in basis.iter().enumerate() {
        let img = m * s * m.transpose();
        out[(0, col)] = 0.5 * (img[(0, 0)] - img[(1, 1)]);
        out[(1, col)] = 0.5 * (img[(0, 1)] + img[(1, 0)]);
        out[(2, col)] = 0.5 * (img[(0, 0)] + img[(1, 1)]);
    }
    Ok(out)
}

/// Dominant eigenpair by repeated normalized squaring.
fn dominant_eigen(m: &Matrix3<f64>) -> Option<(f64, Vector3<f64>)> {
    let mut p = m / m.norm();
    for _ in 0..64 {
        let mut q = p * p;
        let norm = q.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return None;
        }
        q /= norm;
        let done = (q - p).norm() < 1e-15;
        p = q;
        if done {
            break;
        }
    }
    // the limit is rank one, v u^T: read the right and left eigenvectors off it
    let col = (0..3).max_by(|&a, &b| p.column(a).norm().total_cmp(&p.column(b).norm()))?;
    let row = (0..3).max_by(|&a, &b| p.row(a).norm().total_cmp(&p.row(b).norm()))?;
    let mut v = p.column(col).normalize();
    let mut u = p.row(row).transpose().normalize();
    // plain power steps polish the directions: each costs one rounding of M v
    for _ in 0..8 {
        v = (m * v).normalize();
        u = (m.transpose() * u).normalize();
    }
    let lambda = u.dot(&(m * v)) / u.dot(&v);
    Some((lambda, v))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hyperbolic {
    /// Eigenvalue moduli `l1 > l2 > l3` after unit-determinant scaling.
    pub moduli: [f64; 3],
    pub repelling: Vec<f64>,
    pub attracting: Vec<f64>,
    /// `log(l1 / l3)`.
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Identity,
    Hyperbolic(Hyperbolic),
    Other { reason: String },
}

impl Classification {
    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, Classification::Hyperbolic(_))
    }
}

/// Identity, hyperbolic (real spectrum of distinct moduli with the extreme
/// fixed points on the boundary), or other.
pub fn classify(m: &Matrix3<f64>, domain: &ConvexDomain) -> Classification {
    let det = m.determinant();
    if !(det.abs() > 0.0) || !det.is_finite() {
        return Classification::Other { reason: "singular matrix".into() };
    }
    let m = m / det.cbrt();
    match m.try_inverse() {
        Some(inv) => classify_with_inverse(&m, &inv, domain),
        None => Classification::Other { reason: "singular matrix".into() },
    }
}

/// As [`classify`] for a unit-determinant `m` with a separately computed
/// inverse. Long words have large entries, and their computed determinant is
/// too inaccurate to rescale by, so no rescaling happens here.
pub fn classify_with_inverse(m: &Matrix3<f64>, inv: &Matrix3<f64>, domain: &ConvexDomain) -> Classification {
    if (m - Matrix3::identity()).amax() <= 1e-9 {
        return Classification::Identity;
    }
    let spectrum = m.complex_eigenvalues();
    let top = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if spectrum.iter().any(|z| z.im.abs() > EIGEN_GAP_TOL * top) {
        return Classification::Other { reason: "complex eigenvalues".into() };
    }
    let (Some((l1, v1)), Some((l3_inv, v3))) = (dominant_eigen(m), dominant_eigen(inv)) else {
        return Classification::Other { reason: "eigenvector iteration failed".into() };
    };
    let l1 = l1.abs();
    let l3 = 1.0 / l3_inv.abs();
    let l2 = 1.0 / (l1 * l3);
    if !(l1 > l2 * (1.0 + EIGEN_GAP_TOL) && l2 > l3 * (1.0 + EIGEN_GAP_TOL)) {
        return Classification::Other { reason: "eigenvalue moduli are not distinct".into() };
    }
    let (Some(att), Some(rep)) = (dehomogenize(&v1), dehomogenize(&v3)) else {
        return Classification::Other { reason: "fixed point at infinity of the chart".into() };
    };
    let worst = domain.residual(&att).abs().max(domain.residual(&rep).abs());
    if !(worst <= BOUNDARY_TOL) {
        return Classification::Other {
            reason: format!("extreme fixed points are off the boundary (residual {worst:.3e})"),
        };
    }
    Classification::Hyperbolic(Hyperbolic {
        moduli: [l1, l2, l3],
        repelling: rep.iter().copied().collect(),
        attracting: att.iter().copied().collect(),
        length: l1.ln() - l3.ln(),
    })
}

fn require_hyperbolic(m: &Matrix3<f64>, domain: &ConvexDomain) -> Result<Hyperbolic> {
    match classify(m, domain) {
        Classification::Hyperbolic(h) => Ok(h),
        Classification::Identity => Err(GeometryError::NotHyperbolic("identity".into())),
        Classification::Other { reason } => Err(GeometryError::NotHyperbolic(reason)),
    }
}

pub fn translation_length(m: &Matrix3<f64>, domain: &ConvexDomain) -> Result<f64> {
    Ok(require_hyperbolic(m, domain)?.length)
}

/// `(repelling, attracting)` fixed points on the boundary.
pub fn axis(m: &Matrix3<f64>, domain: &ConvexDomain) -> Result<(Vector, Vector)> {
    match classify(m, domain) {
        Classification::Hyperbolic(h) => Ok((Vector::from_vec(h.repelling), Vector::from_vec(h.attracting))),
        Classification::Other { reason } if reason.contains("off the boundary") => Err(GeometryError::Consistency(
            format!("{reason}; the map does not preserve the domain"),
        )),
        Classification::Other { reason } => Err(GeometryError::NotHyperbolic(reason)),
        Classification::Identity => Err(GeometryError::NotHyperbolic("identity".into())),
    }
}

fn serialize_matrix3<S: serde::Serializer>(m: &Matrix3<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    matrix3_rows(m).serialize(s)
}

fn serialize_vector<S: serde::Serializer>(v: &Vector, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_slice().serialize(s)
}

/// A closed geodesic, identified with its conjugacy class up to inversion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedGeodesic {
    pub word: GroupWord,
    #[serde(serialize_with = "serialize_matrix3")]
    pub rep: Matrix3<f64>,
    #[serde(serialize_with = "serialize_vector")]
    pub repelling: Vector,
    #[serde(serialize_with = "serialize_vector")]
    pub attracting: Vector,
    pub length: f64,
    pub primitive: bool,
    /// Length of the underlying primitive geodesic (`length / multiplicity`).
    pub primitive_length: f64,
    pub multiplicity: usize,
    /// Euclidean foot of the domain center on the axis; parameters along the
    /// geodesic are signed Hilbert distances from here.
    #[serde(serialize_with = "serialize_vector")]
    pub foot: Vector,
}

impl ClosedGeodesic {
    /// Unit chart direction from repelling to attracting endpoint.
    pub fn direction(&self) -> Vector {
        (&self.attracting - &self.repelling).normalize()
    }

    /// Signed Hilbert distance from the foot to `p` (assumed on the axis).
    pub fn axis_parameter(&self, domain: &ConvexDomain, p: &Vector) -> Result<f64> {
        let d = hilbert_distance(domain, &self.foot, p)?;
        Ok(if (p - &self.foot).dot(&self.direction()) < 0.0 { -d } else { d })
    }

    /// Point of the axis at signed parameter `t`.
    pub fn axis_point(&self, domain: &ConvexDomain, t: f64) -> Result<Vector> {
        let dir = self.direction();
        if t >= 0.0 {
            point_at_distance(domain, &self.foot, &dir, t)
        } else {
            point_at_distance(domain, &self.foot, &(-dir), -t)
        }
    }

    /// Parameter reduced to `[0, primitive_length)`.
    pub fn wrap(&self, t: f64) -> f64 {
        let l = self.primitive_length;
        let r = t.rem_euclid(l);
        if r >= l { 0.0 } else { r }
    }
}

fn foot_point(domain: &ConvexDomain, rep: &Vector, att: &Vector) -> Vector {
    let c = domain.center();
    let u = att - rep;
    let s = ((&c - rep).dot(&u) / u.norm_squared()).clamp(0.05, 0.95);
    rep + u * s
}

/// Group element with its word, as stored in the cached word ball.
#[derive(Debug, Clone)]
pub struct BallElement {
    pub word: GroupWord,
    pub matrix: Matrix3<f64>,
}

/// Result of [`SurfaceGroup::dirichlet_reduce`]: `point = matrix * p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub point: Vector,
    pub word: GroupWord,
    pub matrix: Matrix3<f64>,
    pub steps: usize,
}

/// JSON form of a surface group.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSpec {
    pub genus: usize,
    pub generators: Vec<Vec<Vec<f64>>>,
    pub basepoint: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<ConvexDomain>,
}

pub struct SurfaceGroup {
    genus: usize,
    generators: Vec<Matrix3<f64>>,
    inverses: Vec<Matrix3<f64>>,
    basepoint: Vector,
    domain: ConvexDomain,
    balls: Mutex<HashMap<usize, Arc<Vec<BallElement>>>>,
    corners: OnceLock<Vec<BallElement>>,
}

impl Clone for SurfaceGroup {
    fn clone(&self) -> Self {
        SurfaceGroup {
            genus: self.genus,
            generators: self.generators.clone(),
            inverses: self.inverses.clone(),
            basepoint: self.basepoint.clone(),
            domain: self.domain.clone(),
            balls: Mutex::new(HashMap::new()),
            corners: OnceLock::new(),
        }
    }
}

impl fmt::Debug for SurfaceGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceGroup")
            .field("genus", &self.genus)
            .field("generators", &self.generators)
            .field("basepoint", &self.basepoint)
            .finish()
    }
}

/// Word length up to which user-supplied groups are checked for hyperbolicity.
pub const DEFAULT_CHECK_LEN: usize = 3;

impl SurfaceGroup {
    /// Validates the relator, boundary preservation of each generator, and
    /// hyperbolicity of all nontrivial reduced words up to `check_len`.
    pub fn new(
        genus: usize,
        generators: Vec<Matrix3<f64>>,
        basepoint: Vector,
        domain: ConvexDomain,
        check_len: usize,
    ) -> Result<Self> {
        if genus < 2 {
            return Err(GeometryError::InvalidInput(format!("genus must be at least 2, got {genus}")));
        }
        if generators.len() != 2 * genus {
            return Err(GeometryError::InvalidInput(format!(
                "genus {genus} needs {} generators, got {}",
                2 * genus,
                generators.len()
            )));
        }
        if domain.dim() != 2 {
            return Err(GeometryError::InvalidInput("surface groups act on a planar domain".into()));
        }
        if basepoint.len() != 2 || !domain.contains(&basepoint) {
            return Err(GeometryError::InvalidInput("basepoint must lie in the domain".into()));
        }
        let mut gens = Vec::with_capacity(generators.len());
        let mut invs = Vec::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            let det = g.determinant();
            if !(det.abs() > 1e-12 * g.norm().powi(3)) || !det.is_finite() {
                return Err(GeometryError::InvalidInput(format!("generator {i} is singular")));
            }
            let g = unit_det(g);
            let inv = g.try_inverse().ok_or_else(|| GeometryError::InvalidInput(format!("generator {i} is singular")))?;
            gens.push(g);
            invs.push(inv);
        }
        let group = SurfaceGroup {
            genus,
            generators: gens,
            inverses: invs,
            basepoint,
            domain,
            balls: Mutex::new(HashMap::new()),
            corners: OnceLock::new(),
        };
        let relator = group.evaluate(&GroupWord::surface_relator(genus));
        let relator_defect = (relator - Matrix3::identity()).amax();
        if !(relator_defect <= RELATOR_TOL) {
            return Err(GeometryError::InvalidInput(format!(
                "relator is not the identity (defect {relator_defect:.3e})"
            )));
        }
        for (i, g) in group.generators.iter().enumerate() {
            let report = verify_domain_preserved(&to_projective(g)?, &group.domain, 64);
            if !(report.boundary_defect <= BOUNDARY_TOL) || report.interior_escapes > 0 {
                return Err(GeometryError::InvalidInput(format!(
                    "generator {i} does not preserve the domain (boundary defect {:.3e})",
                    report.boundary_defect
                )));
            }
        }
        for w in GroupWord::all_reduced(2 * genus, check_len).into_iter().skip(1) {
            let m = group.evaluate(&w);
            let inv = group.evaluate(&w.inverse());
            if let Classification::Other { reason } = classify_with_inverse(&m, &inv, &group.domain) {
                return Err(GeometryError::InvalidInput(format!("word {w} is not hyperbolic: {reason}")));
            }
        }
        Ok(group)
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Self> {
        let gens = spec.generators.iter().map(|g| matrix3_from_rows(g)).collect::<Result<Vec<_>>>()?;
        let domain = spec.domain.clone().unwrap_or_else(ConvexDomain::unit_disk);
        Self::new(spec.genus, gens, Vector::from_vec(spec.basepoint.clone()), domain, DEFAULT_CHECK_LEN)
    }

    pub fn to_spec(&self) -> GroupSpec {
        GroupSpec {
            genus: self.genus,
            generators: self.generators.iter().map(matrix3_rows).collect(),
            basepoint: self.basepoint.iter().copied().collect(),
            domain: Some(self.domain.clone()),
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn generators(&self) -> &[Matrix3<f64>] {
        &self.generators
    }

    pub fn basepoint(&self) -> &Vector {
        &self.basepoint
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    pub fn letter_matrix(&self, l: Letter) -> &Matrix3<f64> {
        if l.inverse { &self.inverses[l.generator] } else { &self.generators[l.generator] }
    }

    pub fn check_word(&self, w: &GroupWord) -> Result<()> {
        match w.max_generator() {
            Some(g) if g >= self.generators.len() => Err(GeometryError::InvalidInput(format!(
                "word {w} uses generator {} but the group has {}",
                g + 1,
                self.generators.len()
            ))),
            _ => Ok(()),
        }
    }

    /// Ordered product of the letters. Generators are rescaled to unit
    /// determinant at construction, so the product has unit determinant too.
    pub fn evaluate(&self, w: &GroupWord) -> Matrix3<f64> {
        w.letters().iter().fold(Matrix3::identity(), |acc, &l| acc * self.letter_matrix(l))
    }

    pub fn classify_word(&self, w: &GroupWord) -> Classification {
        classify_with_inverse(&self.evaluate(w), &self.evaluate(&w.inverse()), &self.domain)
    }

    /// The closed geodesic of the conjugacy class of `w`.
    pub fn geodesic(&self, w: &GroupWord) -> Result<ClosedGeodesic> {
        self.check_word(w)?;
        let word = w.canonical();
        if word.is_empty() {
            return Err(GeometryError::NotHyperbolic("trivial word".into()));
        }
        let rep = self.evaluate(&word);
        let h = match classify_with_inverse(&rep, &self.evaluate(&word.inverse()), &self.domain) {
            Classification::Hyperbolic(h) => h,
            Classification::Identity => return Err(GeometryError::NotHyperbolic(format!("{word} is trivial"))),
            Classification::Other { reason } => return Err(GeometryError::NotHyperbolic(format!("{word}: {reason}"))),
        };
        let (_, multiplicity) = word.root();
        let repelling = Vector::from_vec(h.repelling);
        let attracting = Vector::from_vec(h.attracting);
        let foot = foot_point(&self.domain, &repelling, &attracting);
        Ok(ClosedGeodesic {
            primitive: multiplicity == 1,
            primitive_length: h.length / multiplicity as f64,
            multiplicity,
            word,
            rep,
            repelling,
            attracting,
            length: h.length,
            foot,
        })
    }

    /// One geodesic per conjugacy class (up to inversion) of cyclically
    /// reduced words of length at most `max_len`, sorted by length.
    pub fn enumerate_closed_geodesics(&self, max_len: usize) -> Result<Vec<ClosedGeodesic>> {
        if max_len < 1 {
            return Err(GeometryError::Precondition("maximum word length must be at least 1".into()));
        }
        let mut classes: BTreeMap<GroupWord, ()> = BTreeMap::new();
        for w in GroupWord::all_reduced(2 * self.genus, max_len).into_iter().skip(1) {
            if w.is_cyclically_reduced() {
                classes.insert(w.canonical(), ());
            }
        }
        let mut out: Vec<ClosedGeodesic> = Vec::new();
        for w in classes.keys() {
            let g = self.geodesic(w)?;
            let duplicate = out.iter().any(|o| {
                (o.length - g.length).abs() <= 1e-9 * g.length && same_axis(o, &g, 1e-8)
            });
            if !duplicate {
                out.push(g);
            }
        }
        out.sort_by(|a, b| a.length.total_cmp(&b.length).then_with(|| a.word.cmp(&b.word)));
        Ok(out)
    }

    fn descend_candidates(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..2 * self.generators.len()).map(Letter::from_code)
    }

    /// Cyclic subwords of the relator and its inverse of length 2 to half
    /// the relator: the elements whose translates of the fundamental polygon
    /// meet it only at a vertex.
    pub fn vertex_elements(&self) -> &[BallElement] {
        self.corners.get_or_init(|| {
            let rel = GroupWord::surface_relator(self.genus);
            let mut words: Vec<GroupWord> = Vec::new();
            for w in [rel.clone(), rel.inverse()] {
                for k in 0..w.len() {
                    let rot = w.rotation(k);
                    for l in 2..=w.len() / 2 {
                        let sub = GroupWord::new(rot.letters()[..l].iter().copied());
                        if !words.contains(&sub) {
                            words.push(sub);
                        }
                    }
                }
            }
            words.into_iter().map(|word| BallElement { matrix: self.evaluate(&word), word }).collect()
        })
    }

    /// Greedy descent toward the basepoint: repeatedly apply the generator
    /// (or inverse) that most decreases the distance to the basepoint. When
    /// no generator helps, elements crossing a vertex are tried as well.
    pub fn dirichlet_reduce(&self, p: &Vector, cutoff: usize) -> Result<Reduction> {
        if !self.domain.contains(p) {
            return Err(GeometryError::OutsideDomain);
        }
        let mut q = p.clone();
        let mut matrix = Matrix3::identity();
        let mut word = GroupWord::identity();
        let mut current = hilbert_distance(&self.domain, &q, &self.basepoint)?;
        for step in 0..=cutoff {
            let mut best: Option<(f64, GroupWord, Matrix3<f64>, Vector)> = None;
            let consider = |w: GroupWord, m: &Matrix3<f64>, best: &mut Option<(f64, GroupWord, Matrix3<f64>, Vector)>| -> Result<()> {
                let Some(image) = act(m, &q) else { return Ok(()) };
                if !self.domain.contains(&image) {
                    return Ok(());
                }
                let d = hilbert_distance(&self.domain, &image, &self.basepoint)?;
                if best.as_ref().is_none_or(|b| d < b.0) {
                    *best = Some((d, w, *m, image));
                }
                Ok(())
            };
            for l in self.descend_candidates() {
                consider(GroupWord::new([l]), self.letter_matrix(l), &mut best)?;
            }
            if best.as_ref().is_none_or(|b| b.0 >= current - DESCENT_TOL) {
                for el in self.vertex_elements() {
                    consider(el.word.clone(), &el.matrix, &mut best)?;
                }
            }
            match best {
                Some((d, w, m, image)) if d < current - DESCENT_TOL => {
                    if step == cutoff {
                        return Err(GeometryError::NonConvergence { cutoff });
                    }
                    q = image;
                    current = d;
                    matrix = m * matrix;
                    word = w.concat(&word);
                }
                _ => {
                    return Ok(Reduction { point: q, word, matrix, steps: step });
                }
            }
        }
        Err(GeometryError::NonConvergence { cutoff })
    }

    /// All freely reduced words of length at most `radius` with their
    /// matrices, shortest first; cached per radius.
    pub fn ball(&self, radius: usize) -> Arc<Vec<BallElement>> {
        let mut cache = self.balls.lock().expect("ball cache poisoned");
        if let Some(b) = cache.get(&radius) {
            return b.clone();
        }
        let mut out = vec![BallElement { word: GroupWord::identity(), matrix: Matrix3::identity() }];
        let mut start = 0;
        for _ in 0..radius {
            let end = out.len();
            for i in start..end {
                for l in self.descend_candidates() {
                    let prev = &out[i];
                    if prev.word.letters().last().is_some_and(|last| last.cancels(l)) {
                        continue;
                    }
                    let mut letters = prev.word.letters().to_vec();
                    letters.push(l);
                    let matrix = prev.matrix * self.letter_matrix(l);
                    out.push(BallElement { word: GroupWord::new(letters), matrix });
                }
            }
            start = end;
        }
        let ball = Arc::new(out);
        cache.insert(radius, ball.clone());
        ball
    }
}

/// Same unordered endpoint pair within `tol`.
pub fn same_axis(a: &ClosedGeodesic, b: &ClosedGeodesic, tol: f64) -> bool {
    let close = |x: &Vector, y: &Vector| (x - y).norm() <= tol;
    (close(&a.repelling, &b.repelling) && close(&a.attracting, &b.attracting))
        || (close(&a.repelling, &b.attracting) && close(&a.attracting, &b.repelling))
}

fn sl2_rotation(psi: f64) -> Matrix2<f64> {
    let (s, c) = (psi / 2.0).sin_cos();
    Matrix2::new(c, s, -s, c)
}

/// Generators of the genus-2 surface glued from the regular hyperbolic
/// octagon with all angles `pi/4`, in SL(2).
///
/// Side `i` of the octagon faces direction `i pi/4`; the side pairing taking
/// side `j` to side `i` is the translation across side `i` composed with the
/// rotation carrying direction `j` to the direction opposite `i`. Pairing
/// sides (0,2), (3,1), (4,6), (7,5) gives `[A1,B1][A2,B2] = I`.
pub fn genus2_octagon_sl2() -> [Matrix2<f64>; 4] {
    use std::f64::consts::PI;
    let h = (1.0 + 2f64.sqrt()).acosh();
    let push = Matrix2::new(h.exp(), 0.0, 0.0, (-h).exp());
    let theta = |k: usize| k as f64 * PI / 4.0;
    let translate = |i: usize| sl2_rotation(theta(i)) * push * sl2_rotation(-theta(i));
    let pairing = |i: usize, j: usize| translate(i) * sl2_rotation(theta(i) + PI - theta(j));
    [pairing(0, 2), pairing(3, 1), pairing(4, 6), pairing(7, 5)]
}

/// The regular-octagon genus-2 group acting on the unit disk, basepoint at
/// the center of the octagon.
pub fn standard_genus2_group() -> Result<SurfaceGroup> {
    let gens = genus2_octagon_sl2().iter().map(sl2_to_so21).collect::<Result<Vec<_>>>()?;
    SurfaceGroup::new(2, gens, Vector::zeros(2), ConvexDomain::unit_disk(), 4)
}
