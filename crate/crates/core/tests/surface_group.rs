mod common;

use hilbert_core::domain::ConvexDomain;
use hilbert_core::metric::hilbert_distance;
use hilbert_core::projective::vector;
use hilbert_core::surface::*;
use hilbert_core::word::GroupWord;
use nalgebra::{Matrix2, Matrix3};
use proptest::prelude::*;
use rand::Rng;

fn w(s: &str) -> GroupWord {
    s.parse().unwrap()
}

fn random_sl2<R: Rng>(rng: &mut R) -> Matrix2<f64> {
    let t: f64 = rng.random_range(-1.0..1.0);
    common::sl2_rotation(rng.random_range(0.0..6.3))
        * Matrix2::new(t.exp(), rng.random_range(-1.0..1.0), 0.0, (-t).exp())
}

#[test]
fn embedding_is_a_homomorphism() {
    let mut rng = common::rng(70);
    assert!((sl2_to_so21(&Matrix2::identity()).unwrap() - Matrix3::identity()).amax() < 1e-15);
    for _ in 0..100 {
        let (a, b) = (random_sl2(&mut rng), random_sl2(&mut rng));
        let lhs = sl2_to_so21(&(a * b)).unwrap();
        let rhs = sl2_to_so21(&a).unwrap() * sl2_to_so21(&b).unwrap();
        assert!((lhs - rhs).amax() < 1e-12 * lhs.amax().max(1.0));
    }
    assert!(sl2_to_so21(&Matrix2::new(2.0, 0.0, 0.0, 1.0)).is_err());
}

#[test]
fn diagonal_spectrum() {
    let lambda: f64 = 3.5;
    let m = sl2_to_so21(&Matrix2::new(lambda.sqrt(), 0.0, 0.0, 1.0 / lambda.sqrt())).unwrap();
    let mut spectrum: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.re).collect();
    spectrum.sort_by(f64::total_cmp);
    for (got, want) in spectrum.iter().zip([1.0 / lambda, 1.0, lambda]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn boost_length_matches_distance_along_axis() {
    let e = std::f64::consts::E;
    let m = sl2_to_so21(&Matrix2::new(e, 0.0, 0.0, 1.0 / e)).unwrap();
    let disk = ConvexDomain::unit_disk();
    assert!((translation_length(&m, &disk).unwrap() - 4.0).abs() < 1e-12);
    let (rep, att) = axis(&m, &disk).unwrap();
    assert!((rep - vector(&[-1.0, 0.0])).norm() < 1e-12 && (att - vector(&[1.0, 0.0])).norm() < 1e-12);
    for k in 0..10 {
        let x = vector(&[-0.9 + 0.18 * k as f64, 0.0]);
        let d = hilbert_distance(&disk, &x, &act(&m, &x).unwrap()).unwrap();
        assert!((d - 4.0).abs() < 1e-8);
    }
    let inv = m.try_inverse().unwrap();
    assert!((translation_length(&inv, &disk).unwrap() - 4.0).abs() < 1e-12);
    let (rep_i, att_i) = axis(&inv, &disk).unwrap();
    assert!((rep_i - vector(&[1.0, 0.0])).norm() < 1e-12 && (att_i - vector(&[-1.0, 0.0])).norm() < 1e-12);
    assert!((translation_length(&(m * m), &disk).unwrap() - 8.0).abs() < 1e-12);
}

#[test]
fn conjugation_moves_the_axis() {
    let mut rng = common::rng(71);
    let disk = ConvexDomain::unit_disk();
    let m = sl2_to_so21(&Matrix2::new(1.7, 0.0, 0.0, 1.0 / 1.7)).unwrap();
    let (rep, att) = axis(&m, &disk).unwrap();
    for _ in 0..20 {
        let g = common::random_disk_isometry(&mut rng);
        let c = g * m * g.try_inverse().unwrap();
        assert!((translation_length(&c, &disk).unwrap() - translation_length(&m, &disk).unwrap()).abs() < 1e-9);
        let (r, a) = axis(&c, &disk).unwrap();
        assert!((r - act(&g, &rep).unwrap()).norm() < 1e-8);
        assert!((a - act(&g, &att).unwrap()).norm() < 1e-8);
    }
}

#[test]
fn preset_is_a_valid_group() {
    let g = standard_genus2_group().unwrap();
    assert_eq!(g.genus(), 2);
    assert!((g.evaluate(&GroupWord::surface_relator(2)) - Matrix3::identity()).amax() < 1e-8);
    for word in GroupWord::all_reduced(4, 4).into_iter().skip(1) {
        assert!(g.classify_word(&word).is_hyperbolic(), "{word}");
    }
    let x = w("a1b2A2b1a1");
    let m = g.evaluate(&x);
    assert!((m * g.evaluate(&x.inverse()) - Matrix3::identity()).amax() < 1e-15 * m.norm_squared());
}

#[test]
fn group_json_round_trip() {
    let g = standard_genus2_group().unwrap();
    let text = serde_json::to_string(&g.to_spec()).unwrap();
    let spec: GroupSpec = serde_json::from_str(&text).unwrap();
    let back = SurfaceGroup::from_spec(&spec).unwrap();
    for (a, b) in back.generators().iter().zip(g.generators()) {
        assert!((a - b).amax() < 1e-12);
    }
    let mut bad = spec.clone();
    bad.generators.swap(0, 1);
    assert!(SurfaceGroup::from_spec(&bad).is_err());
}

#[test]
fn enumeration_contract() {
    let g = standard_genus2_group().unwrap();
    let one = g.enumerate_closed_geodesics(1).unwrap();
    assert_eq!(one.len(), 4);
    assert!(one.iter().all(|c| c.word.len() == 1 && !c.word.letters()[0].inverse));
    let three = g.enumerate_closed_geodesics(3).unwrap();
    let mut words: Vec<_> = three.iter().map(|c| c.word.clone()).collect();
    words.sort();
    words.dedup();
    assert_eq!(words.len(), three.len());
    assert!(three.windows(2).all(|p| p[0].length <= p[1].length));
    for c in &three {
        assert!(c.length > 0.0);
        assert!(!three.iter().any(|o| o.word == c.word.inverse() && o.word != c.word));
        let x = c.axis_point(g.domain(), 0.3).unwrap();
        let y = act(&c.rep, &x).unwrap();
        let d = hilbert_distance(g.domain(), &x, &y).unwrap();
        assert!((d - c.length).abs() < 1e-8, "{}: {d} vs {}", c.word, c.length);
        assert!((c.axis_parameter(g.domain(), &y).unwrap() - 0.3 - c.length).abs() < 1e-8);
    }
}

#[test]
fn square_has_twice_the_length() {
    let g = standard_genus2_group().unwrap();
    let a = g.geodesic(&w("a1b1")).unwrap();
    let sq = g.geodesic(&w("a1b1a1b1")).unwrap();
    assert!((sq.length - 2.0 * a.length).abs() < 1e-10);
    assert_eq!(sq.multiplicity, 2);
    assert!((sq.primitive_length - a.length).abs() < 1e-10);
    assert!(same_axis(&a, &sq, 1e-9));
}

#[test]
fn reduction_round_trip_for_deep_points() {
    let g = standard_genus2_group().unwrap();
    let mut rng = common::rng(72);
    for _ in 0..30 {
        let word = GroupWord::new((0..5).map(|_| hilbert_core::word::Letter::from_code(rng.random_range(0..8))));
        let p = act(&g.evaluate(&word), g.basepoint()).unwrap();
        let r = g.dirichlet_reduce(&p, 200).unwrap();
        // the orbit point sits close to the boundary, so the chart coordinates lose digits
        assert!((&r.point - g.basepoint()).norm() < 1e-3, "{word}");
        assert_eq!(r.word, word.inverse());
        let back = act(&g.evaluate(&r.word.concat(&word)), g.basepoint()).unwrap();
        assert!((back - g.basepoint()).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduced_point_is_closest_to_the_basepoint(x in -0.95..0.95f64, y in -0.95..0.95f64) {
        prop_assume!(x * x + y * y < 0.9);
        let g = standard_genus2_group().unwrap();
        let r = g.dirichlet_reduce(&vector(&[x, y]), 500).unwrap();
        let d0 = hilbert_distance(g.domain(), &r.point, g.basepoint()).unwrap();
        for k in 0..8 {
            let l = hilbert_core::word::Letter::from_code(k);
            let moved = act(g.letter_matrix(l), &r.point).unwrap();
            prop_assert!(hilbert_distance(g.domain(), &moved, g.basepoint()).unwrap() >= d0 - 1e-9);
        }
    }

    #[test]
    fn canonical_word_is_a_class_invariant(codes in prop::collection::vec(0usize..8, 1..7), k in 0usize..7) {
        let word = GroupWord::new(codes.into_iter().map(hilbert_core::word::Letter::from_code));
        let (_, core) = word.cyclic_reduction();
        prop_assert_eq!(core.rotation(k).canonical(), word.canonical());
        prop_assert_eq!(word.inverse().canonical(), word.canonical());
    }
}
