//! Acceptance suite: one PASS/FAIL line per criterion with its measured
//! error, tolerance, runtime and runtime limit. Exits non-zero on any failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hilbert_core::domain::ConvexDomain;
use hilbert_core::intersection::*;
use hilbert_core::metric::{hilbert_distance, metric_axiom_suite};
use hilbert_core::projective::{vector, Matrix, ProjectiveMap};
use hilbert_core::rigidity::*;
use hilbert_core::surface::{act, axis, sl2_to_so21, standard_genus2_group, translation_length, SurfaceGroup};
use hilbert_core::word::GroupWord;
use nalgebra::Matrix2;
use rand::Rng;

const PANTS: [&str; 3] = ["a1", "a2", "a1b1A1B1"];
const FILLING: [&str; 6] = ["a1", "a2", "a1b1A1B1", "b1", "b2", "b1b2"];
const CUTOFF: usize = 6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

type Check = fn() -> Result<Outcome, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn collection(g: &SurfaceGroup, list: &[&str]) -> Result<GeodesicCollection, String> {
    let words: Vec<GroupWord> = list.iter().map(|w| w.parse()).collect::<Result<_, _>>().map_err(err)?;
    GeodesicCollection::new(g, &list.join(","), &words).map_err(err)
}

fn closed_form() -> Result<Outcome, String> {
    let disk = ConvexDomain::unit_disk();
    let o = vector(&[0.0, 0.0]);
    let mut worst: f64 = 0.0;
    for r in [0.1, 0.3, 0.5, 0.9] {
        let d = hilbert_distance(&disk, &o, &vector(&[r, 0.0])).map_err(err)?;
        worst = worst.max((d - ((1.0 + r) / (1.0 - r)).ln()).abs());
    }
    let log3 = (hilbert_distance(&disk, &o, &vector(&[0.5, 0.0])).map_err(err)? - 3f64.ln()).abs();
    worst = worst.max(log3);
    Ok(outcome(worst < 1e-9, format!("max error {worst:.2e} (tol 1e-9)")))
}

fn projective_invariance() -> Result<Outcome, String> {
    let mut rng = common::rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let base = common::random_ellipse(&mut rng);
        let (t, image) = common::random_chart_map(&mut rng, &base);
        let image = ConvexDomain::Ellipse(image);
        let x = base.sample_interior(&mut rng);
        let y = base.sample_interior(&mut rng);
        let before = hilbert_distance(&base, &x, &y).map_err(err)?;
        let tx = t.apply_affine(&x).map_err(err)?;
        let ty = t.apply_affine(&y).map_err(err)?;
        let after = hilbert_distance(&image, &tx, &ty).map_err(err)?;
        worst = worst.max((after - before).abs());
    }
    Ok(outcome(worst < 1e-8, format!("1000 instances, max defect {worst:.2e} (tol 1e-8)")))
}

fn metric_axioms() -> Result<Outcome, String> {
    let domains = [
        ("disk", ConvexDomain::unit_disk()),
        ("ellipse", ConvexDomain::ellipse_axes(vector(&[0.2, -0.1]), &[1.8, 0.7]).map_err(err)?),
        ("p4-ball", ConvexDomain::pball(4.0, vector(&[0.0, 0.0]), 1.0).map_err(err)?),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, d) in &domains {
        let r = metric_axiom_suite(d, 500, 3).map_err(err)?;
        let worst = r.max_symmetry_defect.max(r.max_triangle_defect).max(r.max_additivity_defect);
        pass &= worst < 1e-9;
        parts.push(format!("{name} {worst:.1e}"));
    }
    Ok(outcome(pass, format!("500 triples each, max defect {} (tol 1e-9)", parts.join(", "))))
}

fn separating_constructor() -> Result<Outcome, String> {
    let mut rng = common::rng(4);
    let mut held = 0;
    let mut runs = 0;
    while runs < 500 {
        let e = common::random_ellipse(&mut rng);
        let x = e.sample_interior(&mut rng);
        let y = e.sample_interior(&mut rng);
        let mut s: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        s.sort_by(f64::total_cmp);
        if s[1] - s[0] < 1e-3 || s[2] - s[1] < 1e-3 || (&x - &y).norm() < 1e-3 {
            continue;
        }
        runs += 1;
        let [a, b, c] = s.map(|t| &x + (&y - &x) * t);
        if construct_separating(&e, &a, &b, &c).map(|cfg| cfg.checks.all_hold()).unwrap_or(false) {
            held += 1;
        }
    }
    Ok(outcome(held == runs, format!("{held}/{runs} configurations satisfy all three checks (predicates at 1e-9)")))
}

fn rigidity_round_trip() -> Result<Outcome, String> {
    let mut rng = common::rng(5);
    let disk = ConvexDomain::unit_disk();
    let (mut fit_err, mut iso_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let truth = common::to_dynamic(&common::random_disk_isometry(&mut rng));
        let samples = SampledLineMap::sample_map(&truth, &disk, 10, 5, rng.random()).map_err(err)?;
        let fit = fit_projective_map(samples.pairs()).map_err(err)?;
        fit_err = fit_err.max(fit.map.distance_up_to_scale(&truth));
        let report = verify_isometry(&fit.map, &disk, 100, rng.random()).map_err(err)?;
        iso_err = iso_err.max(report.max_defect);
    }
    Ok(outcome(
        fit_err < 1e-6 && iso_err < 1e-8,
        format!("20 isometries x 50 samples, Frobenius {fit_err:.2e} (tol 1e-6), isometry defect {iso_err:.2e} (tol 1e-8)"),
    ))
}

fn with_origin(t: &ProjectiveMap, seed: u64) -> Result<SampledLineMap, String> {
    let disk = ConvexDomain::unit_disk();
    let m = SampledLineMap::sample_map(t, &disk, 5, 4, seed).map_err(err)?;
    let mut pairs = m.pairs().to_vec();
    let o = vector(&[0.0, 0.0]);
    pairs.push((o.clone(), t.apply_affine(&o).map_err(err)?));
    SampledLineMap::new(pairs, m.lines().to_vec(), vec![]).map_err(err)
}

fn orthogonal_recovery() -> Result<Outcome, String> {
    let mut rng = common::rng(6);
    let mut recovered = 0;
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let (s, c) = rng.random_range(0.0..std::f64::consts::TAU).sin_cos();
        let flip = if k % 2 == 0 { 1.0 } else { -1.0 };
        let b = Matrix::from_row_slice(3, 3, &[c, -s * flip, 0.0, s, c * flip, 0.0, 0.0, 0.0, 1.0]);
        let t = ProjectiveMap::new(b).map_err(err)?;
        if let Ok(r) = disk_recover_orthogonal(&with_origin(&t, rng.random())?) {
            worst = worst.max(r.orthogonality_defect);
            recovered += (r.orthogonality_defect < 1e-6) as usize;
        }
    }
    let mut rejected = 0;
    for _ in 0..5 {
        let t: f64 = rng.random_range(0.2..1.0);
        let boost = sl2_to_so21(&(common::sl2_rotation(rng.random_range(0.0..6.3)) * Matrix2::new(t.exp(), 0.0, 0.0, (-t).exp())))
            .map_err(err)?;
        if disk_recover_orthogonal(&with_origin(&common::to_dynamic(&boost), rng.random())?).is_err() {
            rejected += 1;
        }
    }
    Ok(outcome(
        recovered == 20 && rejected == 5,
        format!("{recovered}/20 recovered, max |B^T B - I| {worst:.2e} (tol 1e-6); {rejected}/5 boosts rejected"),
    ))
}

fn order_checkers() -> Result<Outcome, String> {
    let mut rng = common::rng(7);
    let disk = ConvexDomain::unit_disk();
    let (mut caught, mut accepted) = (0, 0);
    for _ in 0..100 {
        let t = common::to_dynamic(&common::random_disk_isometry(&mut rng));
        let m = SampledLineMap::sample_map(&t, &disk, 4, 5, rng.random()).map_err(err)?;
        if check_order_preserving(&m).map_err(err)?.status == VerdictStatus::Holds
            && check_interval_preserving(&m).map_err(err)?.status == VerdictStatus::Holds
        {
            accepted += 1;
        }
        let line = &m.lines()[rng.random_range(0..4)];
        let (i, j) = (line[0], line[1 + rng.random_range(0..4)]);
        let mut pairs = m.pairs().to_vec();
        let tmp = pairs[i].1.clone();
        pairs[i].1 = pairs[j].1.clone();
        pairs[j].1 = tmp;
        let swapped = SampledLineMap::new(pairs, m.lines().to_vec(), vec![]).map_err(err)?;
        let v = check_order_preserving(&swapped).map_err(err)?;
        if v.status == VerdictStatus::Fails && v.witness.is_some_and(|w| w.indices.len() == 3) {
            caught += 1;
        }
    }
    Ok(outcome(
        caught == 100 && accepted == 100,
        format!("{caught}/100 swaps rejected with a witness triple, {accepted}/100 isometries accepted"),
    ))
}

fn translation_length_check() -> Result<Outcome, String> {
    let e = std::f64::consts::E;
    let m = sl2_to_so21(&Matrix2::new(e, 0.0, 0.0, 1.0 / e)).map_err(err)?;
    let disk = ConvexDomain::unit_disk();
    let len = translation_length(&m, &disk).map_err(err)?;
    let (rep, att) = axis(&m, &disk).map_err(err)?;
    let mut worst: f64 = 0.0;
    for k in 1..=10 {
        let x = &rep + (&att - &rep) * (k as f64 / 11.0);
        let mx = act(&m, &x).ok_or("image at infinity")?;
        worst = worst.max((hilbert_distance(&disk, &x, &mx).map_err(err)? - 4.0).abs());
    }
    Ok(outcome(
        (len - 4.0).abs() < 1e-8 && worst < 1e-8,
        format!("length {len:.12}, max |d(x, Mx) - 4| {worst:.2e} over 10 axis points (tol 1e-8)"),
    ))
}

fn enumeration() -> Result<Outcome, String> {
    let g = standard_genus2_group().map_err(err)?;
    let one = g.enumerate_closed_geodesics(1).map_err(err)?;
    let three = g.enumerate_closed_geodesics(3).map_err(err)?;
    let mut words: Vec<_> = three.iter().map(|c| c.word.clone()).collect();
    words.sort();
    words.dedup();
    let mut worst: f64 = 0.0;
    for c in &three {
        let x = c.axis_point(g.domain(), 0.0).map_err(err)?;
        let y = act(&c.rep, &x).ok_or("image at infinity")?;
        worst = worst.max((hilbert_distance(g.domain(), &x, &y).map_err(err)? - c.length).abs());
    }
    Ok(outcome(
        one.len() == 4 && words.len() == three.len() && worst < 1e-8,
        format!(
            "{} geodesics at length 1, {} distinct classes at length 3, axis/length defect {worst:.2e} (tol 1e-8)",
            one.len(),
            three.len()
        ),
    ))
}

fn traced_total(g: &SurfaceGroup, c: &GeodesicCollection) -> Result<usize, String> {
    let mut total = 0;
    for (i, gi) in c.items.iter().enumerate() {
        total += trace_geodesic_oracle(g, gi, 1).map_err(err)?.crossings.len();
        for gj in &c.items[i + 1..] {
            total += trace_pair_oracle(g, gi, gj).map_err(err)?.len();
        }
    }
    Ok(total)
}

fn filling_decision() -> Result<Outcome, String> {
    let g = standard_genus2_group().map_err(err)?;
    let pants = collection(&g, &PANTS)?;
    let fill = collection(&g, &FILLING)?;
    let vp = is_filling(&g, &pants, CUTOFF).map_err(err)?;
    let vf = is_filling(&g, &fill, CUTOFF).map_err(err)?;
    let traced = traced_total(&g, &fill)?;
    let pass = !vp.filling && vf.filling && vf.euler_characteristic == -2 && traced == vf.vertices;
    Ok(outcome(
        pass,
        format!(
            "pants filling={} (V={}); pants+duals filling={} V={} E={} F={} V-E+F={}, traced crossings {traced}; cutoff {CUTOFF}",
            vp.filling, vp.vertices, vf.filling, vf.vertices, vf.edges, vf.faces, vf.euler_characteristic
        ),
    ))
}

fn oracle_cross_validation() -> Result<Outcome, String> {
    let g = standard_genus2_group().map_err(err)?;
    let classes = g.enumerate_closed_geodesics(3).map_err(err)?;
    let mut agree = 0;
    let mut mismatches = Vec::new();
    for c in &classes {
        let linked = self_intersections(&g, c, CUTOFF).map_err(err)?.crossings.len();
        let traced = trace_geodesic_oracle(&g, c, 1).map_err(err)?.crossings.len();
        if linked == traced {
            agree += 1;
        } else {
            mismatches.push(format!("{}: {linked} vs {traced}", c.word));
        }
    }
    let mut simple = 0;
    for w in ["a1", "b1", "a2", "b2"] {
        let gamma = g.geodesic(&w.parse().map_err(err)?).map_err(err)?;
        simple += is_simple(&g, &gamma, CUTOFF).map_err(err)?.simple as usize;
    }
    let mut detail = format!("{agree}/{} classes agree at cutoff {CUTOFF}, {simple}/4 generators simple", classes.len());
    if !mismatches.is_empty() {
        detail.push_str(&format!("; mismatches {}", mismatches.join(", ")));
    }
    Ok(outcome(agree == classes.len() && simple == 4, detail))
}

fn closedness_windows() -> Result<Outcome, String> {
    let g = standard_genus2_group().map_err(err)?;
    let fill = collection(&g, &FILLING)?;
    let a = g.geodesic(&"a1".parse().map_err(err)?).map_err(err)?;
    let r = classify_against_filling(&g, (&a.repelling, &a.attracting), &fill, a.primitive_length).map_err(err)?;
    let constant = r.window_counts.len() == 3 && r.window_counts.iter().all(|&k| k == r.window_counts[0]);
    Ok(outcome(
        constant && r.verdict == Closedness::ClosedLike,
        format!("a1 window counts {:?} over windows of length {:.4}", r.window_counts, r.window),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, u64); 12] = [
        ("Hilbert distance closed form", closed_form, 1),
        ("projective invariance of the metric", projective_invariance, 5),
        ("metric axioms", metric_axioms, 5),
        ("separating construction", separating_constructor, 5),
        ("rigidity round trip", rigidity_round_trip, 10),
        ("disk orthogonal recovery", orthogonal_recovery, 5),
        ("order and interval checkers", order_checkers, 5),
        ("translation length", translation_length_check, 1),
        ("conjugacy enumeration", enumeration, 30),
        ("filling decision", filling_decision, 60),
        ("oracle cross-validation", oracle_cross_validation, 60),
        ("closedness windows", closedness_windows, 10),
    ];
    let mut failures = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (pass, detail) = match result {
            Ok(o) => (o.pass && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} {:>2} {name}: {detail}; {:.2}s (limit {limit}s)",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
