//! Command dispatch. Every command returns a JSON report; pictures are
//! written only when `--svg` is given.

use hilbert_core::domain::ConvexDomain;
use hilbert_core::intersection::{
    build_crossing_graph, classify_against_filling, intersection_points, is_filling, is_simple, verify_finite_lamination,
    CrossingPoint, GeodesicCollection, CollectionSpec, CLOSEDNESS_WINDOWS, PARAM_TOL, REDUCE_CUTOFF, TRANSVERSALITY_TOL,
};
use hilbert_core::metric::{ball_boundary_sample, geodesic_point, hilbert_distance, metric_axiom_suite, AXIOM_TOL};
use hilbert_core::projective::{Matrix, ProjectiveMap, Vector, COLLINEAR_TOL, POINT_TOL};
use hilbert_core::rigidity::{
    check_interval_preserving, check_order_preserving, construct_separating, disk_recover_orthogonal, fit_projective_map,
    subspace_preservation_check, verify_isometry, BETWEEN_TOL, DISK_BLOCK_TOL, INTERSECTION_TOL, PRESERVATION_TOL,
};
use hilbert_core::surface::{standard_genus2_group, SurfaceGroup, EIGEN_GAP_TOL, RELATOR_TOL};
use hilbert_core::word::GroupWord;
use serde_json::{json, Value};

use crate::cli::{CheckMode, Command, Preset, SurfaceCommand, SvgArgs};
use crate::io::{self, CliResult};
use crate::svg::{self, Scene, Style};

/// Default acceptance tolerance for fitted maps and isometry defects.
const MAP_TOL: f64 = 1e-8;
/// Classifier window for geodesics given by endpoints.
const DEFAULT_WINDOW: f64 = 10.0;

fn coords(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

/// Writes the picture if requested and returns its report entry.
fn emit_svg(args: &SvgArgs, scene: &Scene) -> CliResult<Value> {
    let Some(path) = &args.svg else {
        return Ok(Value::Null);
    };
    let style = Style { size: args.size, stroke: args.stroke, labels: !args.no_labels };
    let (text, warnings) = svg::render(scene, &style);
    io::write_file(path, &text)?;
    Ok(json!({ "path": path.display().to_string(), "warnings": warnings }))
}

/// Chord of `domain` through `p` in direction `dir`.
fn chord_through(domain: &ConvexDomain, p: &Vector, dir: &[f64]) -> CliResult<(Vector, Vector)> {
    let q = p + Vector::from_vec(dir.to_vec()) * 1e-3;
    Ok(domain.boundary_intersections(p, &q)?)
}

pub fn run(command: &Command, tolerance: Option<f64>) -> CliResult<Value> {
    match command {
        Command::Validate { domain, samples, seed } => {
            let d = io::load_domain(domain)?;
            let report = d.validate_strict_convexity(*samples as usize, *seed)?;
            Ok(json!({
                "strictly_convex": true,
                "dim": d.dim(),
                "samples": report.samples,
                "min_margin": report.min_margin,
                "witness": report.witness,
                "margin_threshold": 0.0,
                "seed": seed,
            }))
        }
        Command::Dist { domain, x, y, svg } => {
            let d = io::load_domain(domain)?;
            let (xv, yv) = (x.vector(), y.vector());
            let distance = hilbert_distance(&d, &xv, &yv)?;
            let mut scene = Scene::with_domain(&d);
            let mut ends = Value::Null;
            if (&xv - &yv).norm() > POINT_TOL {
                let (a, b) = d.boundary_intersections(&xv, &yv)?;
                scene.chord(&a, &b);
                scene.point(&a, "a");
                scene.point(&b, "b");
                ends = json!([coords(&a), coords(&b)]);
            }
            scene.point(&xv, "x");
            scene.point(&yv, "y");
            Ok(json!({
                "distance": distance,
                "x": x.0,
                "y": y.0,
                "boundary_points": ends,
                "tolerance": POINT_TOL,
                "svg": emit_svg(svg, &scene)?,
            }))
        }
        Command::Geodesic { domain, x, y, steps, until, svg } => {
            let d = io::load_domain(domain)?;
            let (xv, yv) = (x.vector(), y.vector());
            let distance = hilbert_distance(&d, &xv, &yv)?;
            let end = until.unwrap_or(distance);
            let mut points = Vec::new();
            let mut path = Vec::new();
            for k in 0..=*steps {
                let t = end * k as f64 / *steps as f64;
                let p = geodesic_point(&d, &xv, &yv, t)?;
                points.push(json!({ "t": t, "point": coords(&p) }));
                path.push(p);
            }
            let mut scene = Scene::with_domain(&d);
            scene.path(&path);
            scene.point(&xv, "x");
            scene.point(&yv, "y");
            Ok(json!({
                "distance": distance,
                "until": end,
                "points": points,
                "tolerance": POINT_TOL,
                "svg": emit_svg(svg, &scene)?,
            }))
        }
        Command::Ball { domain, center, radius, k, svg } => {
            let d = io::load_domain(domain)?;
            let c = center.vector();
            let pts = ball_boundary_sample(&d, &c, *radius, *k as usize)?;
            let mut scene = Scene::with_domain(&d);
            let mut closed = pts.clone();
            if let Some(first) = pts.first() {
                closed.push(first.clone());
            }
            scene.path(&closed);
            scene.point(&c, "c");
            Ok(json!({
                "center": center.0,
                "radius": radius,
                "boundary": pts.iter().map(coords).collect::<Vec<_>>(),
                "tolerance": POINT_TOL,
                "svg": emit_svg(svg, &scene)?,
            }))
        }
        Command::Axioms { domain, samples, seed } => {
            let d = io::load_domain(domain)?;
            let mut report = metric_axiom_suite(&d, *samples as usize, *seed)?;
            report.tolerance = tolerance.unwrap_or(AXIOM_TOL);
            let passes = report.passes();
            let mut out = serde_json::to_value(&report).expect("report serializes");
            out["passes"] = json!(passes);
            out["seed"] = json!(seed);
            Ok(out)
        }
        Command::Separate { domain, a, b, c, svg } => {
            let d = io::load_domain(domain)?;
            let (av, bv, cv) = (a.vector(), b.vector(), c.vector());
            let cfg = construct_separating(&d, &av, &bv, &cv)?;
            let mut scene = Scene::with_domain(&d);
            for (p, q) in cfg.chords() {
                scene.chord(&p, &q);
            }
            for (p, label) in [(&av, "a"), (&bv, "b"), (&cv, "c")] {
                scene.point(p, label);
            }
            for (p, label) in [(&cfg.x, "x"), (&cfg.y, "y"), (&cfg.z, "z")] {
                scene.point(&Vector::from_vec(p.clone()), label);
            }
            let holds = cfg.checks.all_hold();
            Ok(json!({
                "configuration": cfg,
                "all_checks_hold": holds,
                "tolerances": { "between": BETWEEN_TOL, "intersection": INTERSECTION_TOL },
                "svg": emit_svg(svg, &scene)?,
            }))
        }
        Command::CheckOrder { samples, mode } => {
            let m = io::load_samples(samples)?;
            let verdict = match mode {
                CheckMode::Order => check_order_preserving(&m)?,
                CheckMode::Interval => check_interval_preserving(&m)?,
                CheckMode::Subspace => subspace_preservation_check(&m)?,
            };
            Ok(json!({
                "mode": format!("{mode:?}").to_lowercase(),
                "verdict": verdict,
                "holds": verdict.is_true(),
                "pairs": m.pairs().len(),
                "tolerances": { "between": BETWEEN_TOL, "collinear": COLLINEAR_TOL },
            }))
        }
        Command::Fit { samples } => {
            let m = io::load_samples(samples)?;
            let fit = fit_projective_map(m.pairs())?;
            let tol = tolerance.unwrap_or(MAP_TOL);
            Ok(json!({
                "matrix": normalized_rows(&fit.map),
                "residual": fit.residual,
                "conditioning": fit.conditioning,
                "consistent": fit.residual <= tol,
                "pairs": m.pairs().len(),
                "tolerance": tol,
            }))
        }
        Command::VerifyIsometry { map, domain, pairs, seed } => {
            let t = io::load_map(map)?;
            let d = io::load_domain(domain)?;
            let report = verify_isometry(&t, &d, *pairs as usize, *seed)?;
            let tol = tolerance.unwrap_or(MAP_TOL);
            Ok(json!({
                "isometry": report.max_defect <= tol && report.preservation.preserved(PRESERVATION_TOL),
                "report": report,
                "tolerance": tol,
                "preservation_tolerance": PRESERVATION_TOL,
                "seed": seed,
            }))
        }
        Command::DiskOrthogonal { samples } => {
            let m = io::load_samples(samples)?;
            let r = disk_recover_orthogonal(&m)?;
            let tol = tolerance.unwrap_or(DISK_BLOCK_TOL);
            Ok(json!({
                "orthogonal": r.orthogonal,
                "orthogonality_defect": r.orthogonality_defect,
                "fit_residual": r.fit_residual,
                "is_orthogonal": r.orthogonality_defect <= tol,
                "tolerance": tol,
            }))
        }
        Command::Surface { command } => surface(command),
        Command::Render { scene, svg } => {
            let s: Scene = io::read_json(scene)?;
            let (_, warnings) = svg::render(&s, &Style { size: svg.size, stroke: svg.stroke, labels: !svg.no_labels });
            Ok(json!({
                "chords": s.chords.len(),
                "paths": s.paths.len(),
                "points": s.points.len(),
                "warnings": warnings,
                "svg": emit_svg(svg, &s)?,
            }))
        }
    }
}

/// Matrix scaled so its bottom-right entry is 1, or to unit norm when that
/// entry vanishes.
fn normalized_rows(t: &ProjectiveMap) -> Vec<Vec<f64>> {
    let m = t.matrix();
    let n = m.nrows() - 1;
    let corner = m[(n, n)];
    let scaled: Matrix = if corner.abs() > 1e-12 * m.norm() {
        m / corner
    } else {
        let s = m.iter().copied().fold(0.0, |acc: f64, v| if v.abs() > acc.abs() { v } else { acc });
        m / (m.norm() * s.signum())
    };
    (0..=n).map(|i| scaled.row(i).iter().copied().collect()).collect()
}

fn crossing_json(c: &CrossingPoint) -> Value {
    json!({
        "surface_point": c.surface_point,
        "lift": c.lift,
        "incidence": c.incidence,
        "angle": c.angle,
        "element": c.element,
    })
}

fn collection(group: &SurfaceGroup, path: &std::path::Path) -> CliResult<GeodesicCollection> {
    let spec: CollectionSpec = io::read_json(path)?;
    Ok(GeodesicCollection::from_spec(group, &spec)?)
}

fn geodesic_tolerances() -> Value {
    json!({ "transversality": TRANSVERSALITY_TOL, "parameter": PARAM_TOL, "eigen_gap": EIGEN_GAP_TOL })
}

fn surface(command: &SurfaceCommand) -> CliResult<Value> {
    match command {
        SurfaceCommand::New { preset, out } => {
            let group = match preset {
                Preset::Genus2Octagon => standard_genus2_group()?,
            };
            let spec = group.to_spec();
            let relator = group.evaluate(&GroupWord::surface_relator(group.genus()));
            let defect = (relator - nalgebra::Matrix3::identity()).amax();
            let mut report = json!({
                "preset": "genus2-octagon",
                "genus": group.genus(),
                "relator_defect": defect,
                "tolerance": RELATOR_TOL,
            });
            match out {
                Some(path) => {
                    let text = serde_json::to_string_pretty(&spec).expect("group serializes");
                    io::write_file(path, &(text + "\n"))?;
                    report["out"] = json!(path.display().to_string());
                }
                None => report["group"] = serde_json::to_value(&spec).expect("group serializes"),
            }
            Ok(report)
        }
        SurfaceCommand::Enumerate { group, max_len } => {
            let g = io::load_group(group.group.as_deref())?;
            let list = g.enumerate_closed_geodesics(*max_len as usize)?;
            let items: Vec<Value> = list
                .iter()
                .map(|c| {
                    json!({
                        "word": c.word,
                        "length": c.length,
                        "primitive": c.primitive,
                        "multiplicity": c.multiplicity,
                        "repelling": coords(&c.repelling),
                        "attracting": coords(&c.attracting),
                    })
                })
                .collect();
            Ok(json!({
                "max_len": max_len,
                "count": items.len(),
                "geodesics": items,
                "tolerances": { "eigen_gap": EIGEN_GAP_TOL },
            }))
        }
        SurfaceCommand::Intersect { group, a, b, cutoff, svg } => {
            let g = io::load_group(group.group.as_deref())?;
            let ga = g.geodesic(&io::parse_word(a)?)?;
            let gb = g.geodesic(&io::parse_word(b)?)?;
            let report = intersection_points(&g, &ga, &gb, cutoff.cutoff as usize)?;
            let mut scene = Scene::with_domain(g.domain());
            for (k, c) in report.crossings.iter().enumerate() {
                let lift = Vector::from_vec(c.lift.clone());
                for t in &c.tangents {
                    let (p, q) = chord_through(g.domain(), &lift, t)?;
                    scene.chord(&p, &q);
                }
                scene.point(&lift, &format!("p{k}"));
            }
            Ok(json!({
                "a": ga.word,
                "b": gb.word,
                "lengths": [ga.length, gb.length],
                "count": report.crossings.len(),
                "lower_bound": report.lower_bound,
                "elements_tested": report.elements_tested,
                "crossings": report.crossings.iter().map(crossing_json).collect::<Vec<_>>(),
                "cutoff": report.cutoff,
                "tolerances": geodesic_tolerances(),
                "svg": emit_svg(svg, &scene)?,
            }))
        }
        SurfaceCommand::Simple { group, word, cutoff } => {
            let g = io::load_group(group.group.as_deref())?;
            let gamma = g.geodesic(&io::parse_word(word)?)?;
            let v = is_simple(&g, &gamma, cutoff.cutoff as usize)?;
            Ok(json!({
                "word": gamma.word,
                "simple": v.simple,
                "self_crossings": v.self_crossings,
                "witness": v.witness,
                "cutoff": v.cutoff,
                "tolerances": geodesic_tolerances(),
            }))
        }
        SurfaceCommand::Filling { group, collection: path, cutoff, svg } => {
            let g = io::load_group(group.group.as_deref())?;
            let c = collection(&g, path)?;
            let verdict = is_filling(&g, &c, cutoff.cutoff as usize)?;
            let mut scene = Scene::with_domain(g.domain());
            let mut vertices = Vec::new();
            if svg.svg.is_some() || verdict.vertices > 0 {
                let graph = build_crossing_graph(&g, &c, cutoff.cutoff as usize)?;
                for (k, v) in graph.vertices.iter().enumerate() {
                    scene.point(&Vector::from_vec(v.point.clone()), &format!("v{k}"));
                    vertices.push(json!({ "point": v.point, "valence": 2 * v.branches }));
                }
            }
            for item in &c.items {
                scene.chord(&item.repelling, &item.attracting);
            }
            let mut out = serde_json::to_value(&verdict).expect("verdict serializes");
            out["label"] = json!(c.label);
            out["graph_vertices"] = json!(vertices);
            out["tolerances"] = geodesic_tolerances();
            out["svg"] = emit_svg(svg, &scene)?;
            Ok(out)
        }
        SurfaceCommand::Classify { group, collection: path, word, repelling, attracting, window } => {
            let g = io::load_group(group.group.as_deref())?;
            let c = collection(&g, path)?;
            let (r, a, source, natural) = match (word, repelling, attracting) {
                (Some(w), _, _) => {
                    let gamma = g.geodesic(&io::parse_word(w)?)?;
                    (gamma.repelling.clone(), gamma.attracting.clone(), json!(gamma.word), gamma.primitive_length)
                }
                (None, Some(r), Some(a)) => {
                    let center = g.domain().center();
                    let r = g.domain().boundary_point(&(r.vector() - &center))?;
                    let a = g.domain().boundary_point(&(a.vector() - &center))?;
                    (r, a, Value::Null, DEFAULT_WINDOW)
                }
                _ => {
                    return Err(hilbert_core::GeometryError::InvalidInput(
                        "give --word or both --repelling and --attracting".into(),
                    )
                    .into())
                }
            };
            let report = classify_against_filling(&g, (&r, &a), &c, window.unwrap_or(natural))?;
            let mut out = serde_json::to_value(&report).expect("report serializes");
            out["word"] = source;
            out["repelling"] = json!(coords(&r));
            out["attracting"] = json!(coords(&a));
            out["windows"] = json!(CLOSEDNESS_WINDOWS);
            out["label"] = json!(c.label);
            out["tolerances"] = geodesic_tolerances();
            Ok(out)
        }
        SurfaceCommand::Lamination { group, collection: path, cutoff } => {
            let g = io::load_group(group.group.as_deref())?;
            let c = collection(&g, path)?;
            let v = verify_finite_lamination(&g, &c, cutoff.cutoff as usize)?;
            let mut out = serde_json::to_value(&v).expect("verdict serializes");
            out["label"] = json!(c.label);
            out["reduce_cutoff"] = json!(REDUCE_CUTOFF);
            out["tolerances"] = geodesic_tolerances();
            Ok(out)
        }
    }
}
