//! Generators of random domains, maps and isometries shared by the integration tests.
#![allow(dead_code)]

use hilbert_core::domain::{ConvexDomain, Ellipse};
use hilbert_core::projective::{vector, Matrix, ProjectiveMap, Vector};
use hilbert_core::surface::sl2_to_so21;
use nalgebra::{Matrix2, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Ellipse with center in `[-1, 1]^2`, semi-axes in `[0.5, 2]` and a random tilt.
pub fn random_ellipse<R: Rng>(rng: &mut R) -> ConvexDomain {
    let center = vector(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
    let (a, b) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
    let (s, c) = rng.random_range(0.0..std::f64::consts::PI).sin_cos();
    let r = Matrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let d = Matrix::from_row_slice(2, 2, &[1.0 / (a * a), 0.0, 0.0, 1.0 / (b * b)]);
    ConvexDomain::ellipse(center, &r * d * r.transpose()).unwrap()
}

pub fn ellipse_of(domain: &ConvexDomain) -> &Ellipse {
    match domain {
        ConvexDomain::Ellipse(e) => e,
        _ => panic!("not an ellipse"),
    }
}

/// Perturbation of the identity that keeps the closed ellipse inside the chart.
pub fn random_chart_map<R: Rng>(rng: &mut R, domain: &ConvexDomain) -> (ProjectiveMap, Ellipse) {
    loop {
        let mut m = Matrix::identity(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] += rng.random_range(-0.4..0.4) * if i == 2 && j < 2 { 0.3 } else { 1.0 };
            }
        }
        let Ok(t) = ProjectiveMap::new(m) else { continue };
        if ConvexDomain::transformed(domain.clone(), t.clone()).is_err() {
            continue;
        }
        if let Some(image) = ellipse_of(domain).projective_image(&t) {
            return (t, image);
        }
    }
}

pub fn sl2_rotation(t: f64) -> Matrix2<f64> {
    let (s, c) = t.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Random isometry of the unit disk: rotation, boost, rotation in SL(2) mapped to SO(2,1).
pub fn random_disk_isometry<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let t: f64 = rng.random_range(-1.2..1.2);
    let m = sl2_rotation(rng.random_range(0.0..6.3))
        * Matrix2::new(t.exp(), 0.0, 0.0, (-t).exp())
        * sl2_rotation(rng.random_range(0.0..6.3));
    sl2_to_so21(&m).unwrap()
}

pub fn to_dynamic(m: &Matrix3<f64>) -> ProjectiveMap {
    ProjectiveMap::new(Matrix::from_fn(3, 3, |i, j| m[(i, j)])).unwrap()
}

pub fn random_disk_point<R: Rng>(rng: &mut R, radius: f64) -> Vector {
    loop {
        let v = vector(&[rng.random_range(-radius..radius), rng.random_range(-radius..radius)]);
        if v.norm() < radius {
            return v;
        }
    }
}
