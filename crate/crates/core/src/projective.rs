//! Homogeneous-coordinate algebra for the real projective plane and space.
//!
//! Points of RP^n are stored as nonzero vectors of length `n + 1`; an affine
//! chart point `v` lifts to `(v, 1)`. Projective transformations are invertible
//! `(n + 1) x (n + 1)` matrices acting up to scale, and fractional linear maps
//! `v -> (A v + b) / (<c, v> + d)` are their affine-chart form.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Absolute tolerance for comparing canonical homogeneous vectors.
pub const POINT_TOL: f64 = 1e-9;
/// Relative singular-value threshold below which a point set counts as collinear.
pub const COLLINEAR_TOL: f64 = 1e-9;
/// Relative determinant threshold for invertibility of block matrices.
pub const INJECTIVE_TOL: f64 = 1e-12;
/// Norm below which a homogeneous vector is treated as zero.
pub const ZERO_TOL: f64 = 1e-14;

/// Coordinates with magnitude below this fraction of the norm do not decide the sign.
const SIGN_THRESHOLD: f64 = 1e-12;

pub fn vector(coords: &[f64]) -> Vector {
    Vector::from_column_slice(coords)
}

/// Unit-norm representative whose first significant entry is positive.
///
/// Already-canonical input is returned unchanged, so the operation is
/// idempotent bit for bit.
fn canonicalize_slice(values: &[f64]) -> Option<Vec<f64>> {
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !norm.is_finite() || norm < ZERO_TOL {
        return None;
    }
    let pivot = values
        .iter()
        .copied()
        .find(|v| v.abs() > SIGN_THRESHOLD * norm)
        .unwrap_or(1.0);
    let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
    if sign > 0.0 && (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
        return Some(values.to_vec());
    }
    Some(values.iter().map(|v| sign * v / norm).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub struct HomogeneousPoint {
    coords: Vector,
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    coords: Vec<f64>,
}

impl TryFrom<PointRepr> for HomogeneousPoint {
    type Error = GeometryError;
    fn try_from(repr: PointRepr) -> Result<Self> {
        HomogeneousPoint::new(Vector::from_vec(repr.coords))
    }
}

impl From<HomogeneousPoint> for PointRepr {
    fn from(p: HomogeneousPoint) -> Self {
        PointRepr { coords: p.coords.iter().copied().collect() }
    }
}

impl HomogeneousPoint {
    pub fn new(coords: Vector) -> Result<Self> {
        if coords.len() < 2 {
            return Err(GeometryError::InvalidInput(
                "homogeneous point needs at least two coordinates".into(),
            ));
        }
        if coords.iter().any(|c| !c.is_finite()) || coords.norm() < ZERO_TOL {
            return Err(GeometryError::NumericDegeneracy(
                "homogeneous coordinates vanish".into(),
            ));
        }
        Ok(Self { coords })
    }

    /// Lift an affine chart point `v` to `(v, 1)`.
    pub fn from_affine(v: &Vector) -> Self {
        let n = v.len();
        let mut coords = Vector::from_element(n + 1, 1.0);
        coords.rows_mut(0, n).copy_from(v);
        Self { coords }
    }

    pub fn coords(&self) -> &Vector {
        &self.coords
    }

    /// Dimension of the projective space (one less than the coordinate count).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Dehomogenize in the standard chart (last coordinate).
    pub fn to_affine(&self) -> Result<Vector> {
        let n = self.dim();
        let w = self.coords[n];
        if w.abs() <= ZERO_TOL * self.coords.norm() {
            return Err(GeometryError::NumericDegeneracy(
                "point lies at infinity of the standard chart".into(),
            ));
        }
        Ok(self.coords.rows(0, n) / w)
    }

    pub fn canonical(&self) -> Self {
        let data = canonicalize_slice(self.coords.as_slice())
            .expect("constructor guarantees a nonzero vector");
        Self { coords: Vector::from_vec(data) }
    }

    /// Projective equality: canonical forms agree within `tol` (sup norm).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.coords.len() != other.coords.len() {
            return false;
        }
        let p = self.canonical();
        let q = other.canonical();
        let plus = (&p.coords - &q.coords).amax();
        let minus = (&p.coords + &q.coords).amax();
        plus.min(minus) <= tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapRepr", into = "MapRepr")]
pub struct ProjectiveMap {
    mat: Matrix,
}

#[derive(Serialize, Deserialize)]
struct MapRepr {
    mat: Vec<Vec<f64>>,
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let nrows = rows.len();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    if nrows == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(GeometryError::InvalidInput("matrix rows must be nonempty and equal length".into()));
    }
    Ok(Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub(crate) fn matrix_to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

impl TryFrom<MapRepr> for ProjectiveMap {
    type Error = GeometryError;
    fn try_from(repr: MapRepr) -> Result<Self> {
        ProjectiveMap::new(matrix_from_rows(&repr.mat)?)
    }
}

impl From<ProjectiveMap> for MapRepr {
    fn from(m: ProjectiveMap) -> Self {
        MapRepr { mat: matrix_to_rows(&m.mat) }
    }
}

fn relative_det(m: &Matrix) -> f64 {
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    m.determinant().abs() / norm.powi(m.nrows() as i32)
}

impl ProjectiveMap {
    pub fn new(mat: Matrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() < 2 {
            return Err(GeometryError::InvalidInput("projective map must be square, size >= 2".into()));
        }
        if mat.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidInput("matrix has non-finite entries".into()));
        }
        if relative_det(&mat) <= INJECTIVE_TOL {
            return Err(GeometryError::NotInvertible("determinant vanishes".into()));
        }
        Ok(Self { mat })
    }

    pub fn identity(n: usize) -> Self {
        Self { mat: Matrix::identity(n + 1, n + 1) }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows() - 1
    }

    pub fn inverse(&self) -> Self {
        let inv = self
            .mat
            .clone()
            .try_inverse()
            .expect("constructor guarantees invertibility");
        Self { mat: inv }
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Self::new(&self.mat * &other.mat)
    }

    /// Unit Frobenius norm with positive first significant entry.
    pub fn canonical(&self) -> Self {
        let data = canonicalize_slice(self.mat.as_slice()).expect("invertible matrix is nonzero");
        // column-major storage: the first entry is (0, 0), then down the first column
        Self { mat: Matrix::from_vec(self.mat.nrows(), self.mat.ncols(), data) }
    }

    /// Relative Frobenius distance between canonical forms.
    pub fn distance_up_to_scale(&self, other: &Self) -> f64 {
        let a = self.mat.normalize();
        let b = other.mat.normalize();
        (&a - &b).norm().min((&a + &b).norm())
    }

    /// Act on an affine chart point; the image must stay in the chart.
    pub fn apply_affine(&self, v: &Vector) -> Result<Vector> {
        if v.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        let raw = &self.mat * HomogeneousPoint::from_affine(v).coords();
        let n = self.dim();
        let w = raw[n];
        if w.abs() <= ZERO_TOL * raw.norm() {
            return Err(GeometryError::NumericDegeneracy("image lies at infinity of the chart".into()));
        }
        Ok(raw.rows(0, n) / w)
    }

    /// Sign of the homogeneous denominator of the image of `v`.
    pub fn chart_denominator(&self, v: &Vector) -> f64 {
        let n = self.dim();
        let lifted = HomogeneousPoint::from_affine(v);
        (self.mat.row(n) * lifted.coords())[0]
    }
}

/// Canonical form of `T p`.
pub fn apply_projective(t: &ProjectiveMap, p: &HomogeneousPoint) -> Result<HomogeneousPoint> {
    if p.coords.len() != t.mat.ncols() {
        return Err(GeometryError::DimensionMismatch { expected: t.mat.ncols(), got: p.coords.len() });
    }
    let raw = &t.mat * &p.coords;
    let scale = t.mat.norm() * p.coords.norm();
    if raw.norm() <= ZERO_TOL * scale {
        return Err(GeometryError::NumericDegeneracy("image vector vanishes".into()));
    }
    Ok(HomogeneousPoint { coords: raw }.canonical())
}

/// `v -> (A v + b) / (<c, v> + d)`, defined on the half-space `<c, v> + d > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FltRepr", into = "FltRepr")]
pub struct FractionalLinearMap {
    pub a: Matrix,
    pub b: Vector,
    pub c: Vector,
    pub d: f64,
}

#[derive(Serialize, Deserialize)]
struct FltRepr {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: f64,
}

impl TryFrom<FltRepr> for FractionalLinearMap {
    type Error = GeometryError;
    fn try_from(r: FltRepr) -> Result<Self> {
        FractionalLinearMap::new(matrix_from_rows(&r.a)?, Vector::from_vec(r.b), Vector::from_vec(r.c), r.d)
    }
}

impl From<FractionalLinearMap> for FltRepr {
    fn from(f: FractionalLinearMap) -> Self {
        FltRepr {
            a: matrix_to_rows(&f.a),
            b: f.b.iter().copied().collect(),
            c: f.c.iter().copied().collect(),
            d: f.d,
        }
    }
}

/// Denominators at or below this value count as outside the half-space.
pub const HALF_SPACE_TOL: f64 = 1e-12;

impl FractionalLinearMap {
    pub fn new(a: Matrix, b: Vector, c: Vector, d: f64) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.len() != n || c.len() != n {
            return Err(GeometryError::InvalidInput(format!(
                "inconsistent block sizes: A {}x{}, b {}, c {}",
                a.nrows(),
                a.ncols(),
                b.len(),
                c.len()
            )));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity(n: usize) -> Self {
        Self { a: Matrix::identity(n, n), b: Vector::zeros(n), c: Vector::zeros(n), d: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// The `(n + 1) x (n + 1)` block matrix `[[A, b], [c^T, d]]`.
    pub fn block_matrix(&self) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&self.a);
        m.view_mut((0, n), (n, 1)).copy_from(&self.b);
        m.view_mut((n, 0), (1, n)).copy_from(&self.c.transpose());
        m[(n, n)] = self.d;
        m
    }

    pub fn denominator(&self, v: &Vector) -> f64 {
        self.c.dot(v) + self.d
    }
}

pub fn flt_apply(f: &FractionalLinearMap, v: &Vector) -> Result<Vector> {
    if v.len() != f.dim() {
        return Err(GeometryError::DimensionMismatch { expected: f.dim(), got: v.len() });
    }
    let den = f.denominator(v);
    if den <= HALF_SPACE_TOL {
        return Err(GeometryError::OutsideHalfSpace { denominator: den });
    }
    Ok((&f.a * v + &f.b) / den)
}

/// Injectivity via invertibility of the block matrix, scale-free.
pub fn is_injective_flt(f: &FractionalLinearMap) -> bool {
    relative_det(&f.block_matrix()) > INJECTIVE_TOL
}

pub fn flt_to_projective(f: &FractionalLinearMap) -> Result<ProjectiveMap> {
    if !is_injective_flt(f) {
        return Err(GeometryError::NotInvertible("block matrix [[A, b], [c^T, d]] is singular".into()));
    }
    ProjectiveMap::new(f.block_matrix())
}

/// Permutation moving coordinate `chart` to the last slot, others kept in order.
fn chart_permutation(size: usize, chart: usize) -> Matrix {
    let mut order: Vec<usize> = (0..size).filter(|&i| i != chart).collect();
    order.push(chart);
    let mut p = Matrix::zeros(size, size);
    for (row, &col) in order.iter().enumerate() {
        p[(row, col)] = 1.0;
    }
    p
}

/// Read `T` as a fractional linear map in the affine chart where homogeneous
/// coordinate `chart` equals one (the standard chart is `chart = n`).
pub fn projective_to_flt(t: &ProjectiveMap, chart: usize) -> Result<FractionalLinearMap> {
    let size = t.mat.nrows();
    let n = size - 1;
    if chart > n {
        return Err(GeometryError::InvalidInput(format!("chart index {chart} out of range 0..={n}")));
    }
    let p = chart_permutation(size, chart);
    let m = &p * &t.mat * p.transpose();
    let last_row = m.row(n);
    if last_row.norm() <= ZERO_TOL * m.norm() {
        return Err(GeometryError::Precondition("last row annihilates the chart".into()));
    }
    Ok(FractionalLinearMap {
        a: m.view((0, 0), (n, n)).into_owned(),
        b: m.view((0, n), (n, 1)).column(0).into_owned(),
        c: m.view((n, 0), (1, n)).transpose().column(0).into_owned(),
        d: m[(n, n)],
    })
}

/// Ratio of the second to the first singular value of the stacked
/// differences `p_i - p_0`: zero exactly when the points are collinear.
pub fn collinearity_defect(points: &[&Vector]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let n = points[0].len();
    let rows = points.len() - 1;
    let m = Matrix::from_fn(rows, n, |i, j| points[i + 1][j] - points[0][j]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    if sv.is_empty() || sv[0] == 0.0 {
        return 0.0;
    }
    sv.get(1).copied().unwrap_or(0.0) / sv[0]
}

/// Ratio of the third to the first singular value of stacked differences:
/// zero exactly when the points are coplanar.
pub fn coplanarity_defect(points: &[&Vector]) -> f64 {
    if points.len() < 4 {
        return 0.0;
    }
    let n = points[0].len();
    let rows = points.len() - 1;
    let m = Matrix::from_fn(rows, n, |i, j| points[i + 1][j] - points[0][j]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    if sv.is_empty() || sv[0] == 0.0 {
        return 0.0;
    }
    sv.get(2).copied().unwrap_or(0.0) / sv[0]
}

/// Cross ratio `(|ay| / |ax|) (|bx| / |by|)` of four collinear affine points,
/// read along the line in the order `a, x, y, b`.
pub fn cross_ratio(a: &Vector, x: &Vector, y: &Vector, b: &Vector) -> Result<f64> {
    let n = a.len();
    for p in [x, y, b] {
        if p.len() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, got: p.len() });
        }
    }
    let defect = collinearity_defect(&[a, x, y, b]);
    if defect > COLLINEAR_TOL {
        return Err(GeometryError::Collinearity { defect });
    }
    let scale = (b - a).norm().max((y - x).norm());
    let ax = (x - a).norm();
    let by = (y - b).norm();
    if ax <= ZERO_TOL * scale.max(1.0) || by <= ZERO_TOL * scale.max(1.0) {
        return Err(GeometryError::DegenerateConfiguration(
            "a coincides with x or b coincides with y".into(),
        ));
    }
    let ay = (y - a).norm();
    let bx = (x - b).norm();
    Ok((ay / ax) * (bx / by))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        vector(c)
    }

    #[test]
    fn cross_ratio_on_a_line() {
        let r = cross_ratio(&v(&[0.0]), &v(&[1.0]), &v(&[2.0]), &v(&[3.0])).unwrap();
        assert!((r - 4.0).abs() < 1e-15);
        let r = cross_ratio(&v(&[0.0, 0.0]), &v(&[0.3, 0.1]), &v(&[0.3, 0.1]), &v(&[0.9, 0.3])).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cross_ratio_errors() {
        let e = cross_ratio(&v(&[0.0, 0.0]), &v(&[1.0, 0.0]), &v(&[2.0, 0.5]), &v(&[3.0, 0.0]));
        assert!(matches!(e, Err(GeometryError::Collinearity { .. })));
        let e = cross_ratio(&v(&[0.0]), &v(&[0.0]), &v(&[2.0]), &v(&[3.0]));
        assert!(matches!(e, Err(GeometryError::DegenerateConfiguration(_))));
        let e = cross_ratio(&v(&[0.0]), &v(&[1.0]), &v(&[3.0]), &v(&[3.0]));
        assert!(matches!(e, Err(GeometryError::DegenerateConfiguration(_))));
    }

    #[test]
    fn canonical_form_is_bitwise_idempotent() {
        let p = HomogeneousPoint::new(v(&[-3.0, 1.0, 2.5])).unwrap();
        let c1 = p.canonical();
        let c2 = c1.canonical();
        assert_eq!(c1.coords().as_slice(), c2.coords().as_slice());
        assert!(c1.coords()[0] > 0.0);
        assert!((c1.coords().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scaling_is_invisible() {
        let p = HomogeneousPoint::new(v(&[0.2, -0.4, 1.0])).unwrap();
        let t = ProjectiveMap::new(Matrix::identity(3, 3) * 2.0).unwrap();
        let q = apply_projective(&t, &p).unwrap();
        assert!(q.approx_eq(&p, POINT_TOL));
        let id = ProjectiveMap::identity(2);
        assert!(apply_projective(&id, &p).unwrap().approx_eq(&p, POINT_TOL));
    }

    #[test]
    fn zero_point_rejected() {
        assert!(HomogeneousPoint::new(v(&[0.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn flt_basic_cases() {
        let id = FractionalLinearMap::identity(2);
        let p = v(&[0.3, -0.7]);
        assert_eq!(flt_apply(&id, &p).unwrap(), p);
        let mut half = FractionalLinearMap::identity(2);
        half.d = 2.0;
        assert!((flt_apply(&half, &p).unwrap() - &p / 2.0).norm() < 1e-15);
        let mut cut = FractionalLinearMap::identity(2);
        cut.c = v(&[1.0, 0.0]);
        cut.d = 0.0;
        assert!(matches!(flt_apply(&cut, &v(&[-1.0, 0.0])), Err(GeometryError::OutsideHalfSpace { .. })));
    }

    #[test]
    fn injectivity_via_block_matrix() {
        assert!(is_injective_flt(&FractionalLinearMap::identity(2)));
        let rank_one = FractionalLinearMap::new(Matrix::zeros(2, 2), Vector::zeros(2), Vector::zeros(2), 1.0).unwrap();
        assert!(!is_injective_flt(&rank_one));
        assert!(flt_to_projective(&rank_one).is_err());
        // rows 1, 3, 2 of the identity: A is singular but the block matrix is not
        let perm = FractionalLinearMap::new(
            Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
            v(&[0.0, 1.0]),
            v(&[0.0, 1.0]),
            0.0,
        )
        .unwrap();
        assert!(perm.a.determinant().abs() < 1e-15);
        assert!(is_injective_flt(&perm));
        let t = flt_to_projective(&perm).unwrap();
        let expected = Matrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(t.matrix(), &expected);
    }

    #[test]
    fn identity_flt_is_identity_matrix() {
        let t = flt_to_projective(&FractionalLinearMap::identity(3)).unwrap();
        assert_eq!(t.matrix(), &Matrix::identity(4, 4));
    }

    #[test]
    fn non_standard_chart() {
        // T swaps x and w; in the chart x = 1 it reads the standard-chart map
        let m = Matrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.5, 0.0, 1.0]);
        let t = ProjectiveMap::new(m).unwrap();
        let f = projective_to_flt(&t, 0).unwrap();
        // affine coordinates in chart 0 are (y, w); the point (1, y, w)
        let pt = v(&[0.3, 0.2]);
        let image = flt_apply(&f, &pt).unwrap();
        let raw = t.matrix() * v(&[1.0, 0.3, 0.2]);
        assert!((image[0] - raw[1] / raw[0]).abs() < 1e-14);
        assert!((image[1] - raw[2] / raw[0]).abs() < 1e-14);
    }

    #[test]
    fn json_field_names() {
        let f = FractionalLinearMap::identity(2);
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"A\"") && s.contains("\"b\"") && s.contains("\"c\"") && s.contains("\"d\""));
        let back: FractionalLinearMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let t = ProjectiveMap::new(Matrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"mat":[[1.0,2.0,0.0],[0.0,1.0,0.0],[0.0,0.0,1.0]]}"#);
        let p = HomogeneousPoint::new(v(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"coords":[1.0,2.0,3.0]}"#);
        assert!(serde_json::from_str::<ProjectiveMap>(r#"{"mat":[[1,0],[0,0]]}"#).is_err());
    }
}
