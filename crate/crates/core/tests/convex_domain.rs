mod common;

use hilbert_core::domain::{ConvexDomain, DomainSpec};
use hilbert_core::metric::*;
use hilbert_core::projective::{vector, Matrix, ProjectiveMap, Vector};
use hilbert_core::GeometryError;
use proptest::prelude::*;
use rand::Rng;

fn close(a: &Vector, b: &Vector, tol: f64) -> bool {
    (a - b).norm() < tol
}

#[test]
fn disk_and_ellipse_chords() {
    let disk = ConvexDomain::unit_disk();
    let (a, b) = disk.boundary_intersections(&vector(&[0.0, 0.0]), &vector(&[0.5, 0.0])).unwrap();
    assert!(close(&a, &vector(&[-1.0, 0.0]), 1e-15) && close(&b, &vector(&[1.0, 0.0]), 1e-15));
    let e = ConvexDomain::ellipse_axes(vector(&[0.0, 0.0]), &[2.0, 1.0]).unwrap();
    let (a, b) = e.boundary_intersections(&vector(&[0.0, 0.0]), &vector(&[1.0, 0.0])).unwrap();
    assert!(close(&a, &vector(&[-2.0, 0.0]), 1e-14) && close(&b, &vector(&[2.0, 0.0]), 1e-14));
    assert!(matches!(
        disk.boundary_intersections(&vector(&[0.1, 0.0]), &vector(&[0.1, 0.0])),
        Err(GeometryError::NoUniqueLine)
    ));
}

#[test]
fn pball_chord_matches_gauge_bisection() {
    let ball = ConvexDomain::pball(4.0, vector(&[0.1, -0.2]), 1.3).unwrap();
    let ConvexDomain::PBall(pb) = &ball else { unreachable!() };
    let mut rng = common::rng(4);
    for _ in 0..20 {
        let x = ball.sample_interior(&mut rng);
        let y = ball.sample_interior(&mut rng);
        let (_, b) = ball.boundary_intersections(&x, &y).unwrap();
        let u = &y - &x;
        let (mut lo, mut hi) = (0.0, 100.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if pb.gauge(&(&x + &u * mid)) < 1.0 { lo = mid } else { hi = mid }
        }
        assert!(close(&b, &(&x + &u * lo), 1e-12));
    }
}

#[test]
fn strictness_validation() {
    let disk = ConvexDomain::unit_disk();
    assert!(disk.validate_strict_convexity(1000, 0).unwrap().min_margin > 0.0);
    let p15 = ConvexDomain::pball(1.5, vector(&[0.0, 0.0]), 1.0).unwrap();
    assert!(p15.validate_strict_convexity(1000, 0).is_ok());
    let flat = ConvexDomain::ellipse(vector(&[0.0, 0.0]), Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
    assert!(matches!(flat, Err(GeometryError::InvalidDomain(_))));
    let poly: Result<ConvexDomain, _> =
        serde_json::from_str(r#"{"type": "polygon", "vertices": [[0,0],[1,0],[0,1]]}"#);
    assert!(poly.is_err());
}

#[test]
fn transformed_membership_is_pullback() {
    let mut rng = common::rng(8);
    let base = common::random_ellipse(&mut rng);
    let (t, _) = common::random_chart_map(&mut rng, &base);
    let image = ConvexDomain::transformed(base.clone(), t.clone()).unwrap();
    let inv = t.inverse();
    let c = image.center();
    for _ in 0..1000 {
        let x = &c + vector(&[rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]);
        let pulled = inv.apply_affine(&x).map(|p| base.contains(&p)).unwrap_or(false)
            && inv.chart_denominator(&x).signum() == inv.chart_denominator(&c).signum();
        assert_eq!(image.contains(&x), pulled, "{x:?}");
    }
}

#[test]
fn sampling_is_deterministic_and_inside() {
    let disk = ConvexDomain::unit_disk();
    assert!(disk.contains(&disk.random_interior_point(0)));
    assert_eq!(disk.random_interior_point(9), disk.random_interior_point(9));
    let mut rng = common::rng(1);
    let base = common::random_ellipse(&mut rng);
    let (t, _) = common::random_chart_map(&mut rng, &base);
    let image = ConvexDomain::transformed(base, t).unwrap();
    assert!(image.contains(&image.random_interior_point(3)));
}

#[test]
fn domain_json_round_trip() {
    let mut rng = common::rng(2);
    let base = common::random_ellipse(&mut rng);
    let (t, _) = common::random_chart_map(&mut rng, &base);
    for d in [
        ConvexDomain::unit_disk(),
        ConvexDomain::pball(3.0, vector(&[0.0, 1.0]), 2.0).unwrap(),
        ConvexDomain::transformed(base, t).unwrap(),
    ] {
        let text = serde_json::to_string(&d).unwrap();
        let back: ConvexDomain = serde_json::from_str(&text).unwrap();
        let x = d.random_interior_point(5);
        assert_eq!(d.contains(&x), back.contains(&x));
        assert!((d.residual(&x) - back.residual(&x)).abs() < 1e-12);
        let _: DomainSpec = serde_json::from_str(&text).unwrap();
    }
}

#[test]
fn disk_closed_form() {
    let disk = ConvexDomain::unit_disk();
    let o = vector(&[0.0, 0.0]);
    assert_eq!(hilbert_distance(&disk, &o, &o).unwrap(), 0.0);
    for r in [0.1, 0.3, 0.5, 0.9] {
        let d = hilbert_distance(&disk, &o, &vector(&[r, 0.0])).unwrap();
        assert!((d - ((1.0 + r) / (1.0 - r)).ln()).abs() < 1e-12);
    }
    assert!((hilbert_distance(&disk, &o, &vector(&[0.5, 0.0])).unwrap() - 1.0986123).abs() < 1e-7);
    assert!(matches!(hilbert_distance(&disk, &o, &vector(&[1.0, 0.0])), Err(GeometryError::OutsideDomain)));
}

#[test]
fn geodesic_parametrization() {
    let disk = ConvexDomain::unit_disk();
    let o = vector(&[0.0, 0.0]);
    let p = point_at_distance(&disk, &o, &vector(&[1.0, 0.0]), 3f64.ln()).unwrap();
    assert!(close(&p, &vector(&[0.5, 0.0]), 1e-14));
    let x = vector(&[0.2, -0.3]);
    let y = vector(&[-0.5, 0.4]);
    assert_eq!(geodesic_point(&disk, &x, &y, 0.0).unwrap(), x);
    let d = hilbert_distance(&disk, &x, &y).unwrap();
    assert!(close(&geodesic_point(&disk, &x, &y, d).unwrap(), &y, 1e-10));
    assert!(geodesic_point(&disk, &x, &y, 100.0).is_err());
}

#[test]
fn ball_boundary_profile() {
    let disk = ConvexDomain::unit_disk();
    let o = vector(&[0.0, 0.0]);
    for radius in [0.3, 1.0, 2.5] {
        let expected = (f64::exp(radius) - 1.0) / (f64::exp(radius) + 1.0);
        for p in ball_boundary_sample(&disk, &o, radius, 24).unwrap() {
            assert!((p.norm() - expected).abs() < 1e-12);
        }
    }
    for p in ball_boundary_sample(&disk, &o, 1e-12, 8).unwrap() {
        assert!(p.norm() < 1e-11);
    }
    let e = ConvexDomain::ellipse_axes(vector(&[1.0, 0.5]), &[2.0, 0.7]).unwrap();
    let c = vector(&[1.6, 0.3]);
    for p in ball_boundary_sample(&e, &c, 0.8, 32).unwrap() {
        assert!((hilbert_distance(&e, &c, &p).unwrap() - 0.8).abs() < 1e-9);
    }
}

#[test]
fn axiom_suite_on_three_domains() {
    for d in [
        ConvexDomain::unit_disk(),
        ConvexDomain::ellipse_axes(vector(&[0.3, 0.0]), &[1.5, 0.6]).unwrap(),
        ConvexDomain::pball(4.0, vector(&[0.0, 0.0]), 1.0).unwrap(),
    ] {
        let report = metric_axiom_suite(&d, 500, 7).unwrap();
        assert!(report.passes(), "{report:?}");
    }
    let disk = ConvexDomain::unit_disk();
    let x = vector(&[0.1, 0.2]);
    let t = triple_defects(&disk, &x, &x, &x, 0.5).unwrap();
    assert_eq!((t.symmetry, t.triangle, t.additivity), (0.0, 0.0, 0.0));
}

#[test]
fn transformed_suite_matches_base() {
    let mut rng = common::rng(13);
    let base = common::random_ellipse(&mut rng);
    let (t, _) = common::random_chart_map(&mut rng, &base);
    let image = ConvexDomain::transformed(base.clone(), t.clone()).unwrap();
    for _ in 0..200 {
        let x = base.sample_interior(&mut rng);
        let y = base.sample_interior(&mut rng);
        let before = hilbert_distance(&base, &x, &y).unwrap();
        let after = hilbert_distance(&image, &t.apply_affine(&x).unwrap(), &t.apply_affine(&y).unwrap()).unwrap();
        assert!((before - after).abs() < 1e-9);
    }
}

#[test]
fn projective_image_of_ellipse_is_isometric() {
    let mut rng = common::rng(3);
    for _ in 0..50 {
        let base = common::random_ellipse(&mut rng);
        let (t, image) = common::random_chart_map(&mut rng, &base);
        let image = ConvexDomain::Ellipse(image);
        let x = base.sample_interior(&mut rng);
        let y = base.sample_interior(&mut rng);
        let before = hilbert_distance(&base, &x, &y).unwrap();
        let after = hilbert_distance(&image, &t.apply_affine(&x).unwrap(), &t.apply_affine(&y).unwrap()).unwrap();
        assert!((before - after).abs() < 1e-8, "{before} vs {after}");
    }
    let shift = ProjectiveMap::new(Matrix::from_row_slice(3, 3, &[1.0, 0.0, 5.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
    let moved = ConvexDomain::transformed(ConvexDomain::unit_disk(), shift).unwrap();
    assert!(moved.contains(&vector(&[5.0, 0.0])));
}

proptest! {
    #[test]
    fn disk_distance_is_a_metric(
        a in prop::collection::vec(-0.6..0.6f64, 2),
        b in prop::collection::vec(-0.6..0.6f64, 2),
        c in prop::collection::vec(-0.6..0.6f64, 2),
    ) {
        let disk = ConvexDomain::unit_disk();
        let (x, y, z) = (Vector::from_vec(a), Vector::from_vec(b), Vector::from_vec(c));
        let d = triple_defects(&disk, &x, &y, &z, 0.37).unwrap();
        prop_assert!(d.symmetry < 1e-9 && d.triangle < 1e-9 && d.additivity < 1e-9);
    }

    #[test]
    fn pball_distance_is_symmetric(
        a in prop::collection::vec(-0.5..0.5f64, 2),
        b in prop::collection::vec(-0.5..0.5f64, 2),
        p in 1.2..6.0f64,
    ) {
        let ball = ConvexDomain::pball(p, vector(&[0.0, 0.0]), 1.0).unwrap();
        let (x, y) = (Vector::from_vec(a), Vector::from_vec(b));
        let d1 = hilbert_distance(&ball, &x, &y).unwrap();
        let d2 = hilbert_distance(&ball, &y, &x).unwrap();
        prop_assert!((d1 - d2).abs() < 1e-9 && d1 >= 0.0);
    }
}
