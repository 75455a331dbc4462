//! Crossings of closed geodesics on a surface, simplicity, filling, and
//! finite laminations.
//!
//! Two methods are provided and kept independent:
//!
//! * linking: translate one axis by every group element up to a word-length
//!   cutoff and test whether its boundary endpoints interleave with the other
//!   axis. Counts are lower bounds certified only up to the cutoff.
//! * tracing: follow the axis chord through copies of the Dirichlet domain
//!   and intersect the resulting segments inside one copy.
//!
//! Positions along a geodesic are signed Hilbert distances from the foot of
//! the axis (see [`ClosedGeodesic::foot`]) taken modulo the primitive length,
//! so both methods report directly comparable parameters.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::domain::ConvexDomain;
use crate::error::{GeometryError, Result};
use crate::metric::{hilbert_distance, point_at_distance};
use crate::surface::{act, dehomogenize, homogenize, ClosedGeodesic, SurfaceGroup};
use crate::word::GroupWord;

/// Smallest accepted crossing angle, radians.
pub const TRANSVERSALITY_TOL: f64 = 1e-6;
/// Two crossings with parameters this close (modulo length) are the same.
/// Endpoint errors are amplified by the conjugating element, so this is
/// looser than the accuracy of short words.
pub const PARAM_TOL: f64 = 1e-6;
/// Step limit for Dirichlet reduction of crossing points.
pub const REDUCE_CUTOFF: usize = 500;
/// Angular tolerance for coincident boundary endpoints.
const ENDPOINT_TOL: f64 = 1e-9;

fn angle_about(center: &crate::projective::Vector, p: &crate::projective::Vector) -> f64 {
    (p[1] - center[1]).atan2(p[0] - center[0])
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Position of `a` relative to `b` on a circle of length `l`, in `(-l/2, l/2]`.
fn periodic_gap(a: f64, b: f64, l: f64) -> f64 {
    let d = (a - b).rem_euclid(l);
    d.min(l - d)
}

/// Whether two boundary pairs interleave in the cyclic order of the boundary,
/// read by angle about the domain center. Pairs sharing one endpoint do not
/// interleave; identical pairs are an error.
pub fn endpoints_linked(
    domain: &ConvexDomain,
    first: (&crate::projective::Vector, &crate::projective::Vector),
    second: (&crate::projective::Vector, &crate::projective::Vector),
) -> Result<bool> {
    let c = domain.center();
    let (a1, a2) = (angle_about(&c, first.0), angle_about(&c, first.1));
    let (b1, b2) = (angle_about(&c, second.0), angle_about(&c, second.1));
    let same = |x: f64, y: f64| circular_gap(x, y) <= ENDPOINT_TOL;
    if (same(a1, b1) && same(a2, b2)) || (same(a1, b2) && same(a2, b1)) {
        return Err(GeometryError::SameAxis);
    }
    if same(a1, b1) || same(a1, b2) || same(a2, b1) || same(a2, b2) {
        return Ok(false);
    }
    let (lo, hi) = if a1 < a2 { (a1, a2) } else { (a2, a1) };
    let inside = |x: f64| x > lo && x < hi;
    Ok(inside(b1) != inside(b2))
}

/// Boundary linking of the axes of two closed geodesics.
pub fn axes_linked(domain: &ConvexDomain, gamma: &ClosedGeodesic, delta: &ClosedGeodesic) -> Result<bool> {
    endpoints_linked(domain, (&gamma.repelling, &gamma.attracting), (&delta.repelling, &delta.attracting))
}

fn vec3(p: &crate::projective::Vector) -> Vector3<f64> {
    homogenize(p)
}

/// `ln(beta / alpha)` for `p = alpha r + beta a` (homogeneous).
fn line_coordinate(r: &Vector3<f64>, a: &Vector3<f64>, p: &Vector3<f64>) -> f64 {
    let n = r.cross(a);
    let alpha = p.cross(a).dot(&n);
    let beta = r.cross(p).dot(&n);
    (beta / alpha).ln()
}

/// Axis parameter of `p` on the lift `g . axis(gamma)` with homogeneous
/// endpoints `big_r = g r`, `big_a = g a`.
fn lift_parameter(gamma: &ClosedGeodesic, big_r: &Vector3<f64>, big_a: &Vector3<f64>, p: &Vector3<f64>) -> f64 {
    let r = vec3(&gamma.repelling);
    let a = vec3(&gamma.attracting);
    let f = vec3(&gamma.foot);
    line_coordinate(big_r, big_a, p) - line_coordinate(&r, &a, &f)
}

/// One transverse crossing of two lifts, located in the chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingPoint {
    /// Representative in the Dirichlet domain of the basepoint.
    pub surface_point: Vec<f64>,
    /// `(geodesic index, parameter in [0, primitive length))` for both branches.
    pub incidence: [(usize, f64); 2],
    /// Angle between the two branches in the chart, in `(0, pi/2]`.
    pub angle: f64,
    /// The crossing in the chart before reduction.
    pub lift: Vec<f64>,
    /// Unit chart tangents of the two branches at `lift`, oriented by increasing parameter.
    pub tangents: [Vec<f64>; 2],
    /// Element `g` with the first branch on `g` applied to its axis.
    pub element: GroupWord,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingReport {
    pub crossings: Vec<CrossingPoint>,
    pub cutoff: usize,
    pub elements_tested: usize,
    /// Counts are lower bounds: only elements up to the cutoff were examined.
    pub lower_bound: bool,
}

fn primitive(group: &SurfaceGroup, g: &ClosedGeodesic) -> Result<ClosedGeodesic> {
    if g.primitive {
        Ok(g.clone())
    } else {
        group.geodesic(&g.word.root().0)
    }
}

/// `g` is not shortened by `w` or `w^-1` on the right.
fn right_minimal(g: &GroupWord, w: &GroupWord, w_inv: &GroupWord) -> bool {
    2 * g.cancellation(w) <= w.len() && 2 * g.cancellation(w_inv) <= w.len()
}

/// `g` is not shortened by `w` or `w^-1` on the left.
fn left_minimal(g: &GroupWord, w: &GroupWord, w_inv: &GroupWord) -> bool {
    2 * w.cancellation(g) <= w.len() && 2 * w_inv.cancellation(g) <= w.len()
}

/// Crossings of translates `g . axis(moving)` with `axis(fixed)` for `g` in
/// the word ball of the cutoff. `moving` and `fixed` must be primitive.
fn linked_crossings(
    group: &SurfaceGroup,
    moving: (usize, &ClosedGeodesic),
    fixed: (usize, &ClosedGeodesic),
    cutoff: usize,
) -> Result<CrossingReport> {
    let domain = group.domain();
    let same_curve = moving.1.word == fixed.1.word;
    let (mw, mw_inv) = (&moving.1.word, moving.1.word.inverse());
    let (fw, fw_inv) = (&fixed.1.word, fixed.1.word.inverse());
    let r_m = vec3(&moving.1.repelling);
    let a_m = vec3(&moving.1.attracting);
    let r_f = vec3(&fixed.1.repelling);
    let a_f = vec3(&fixed.1.attracting);
    let fixed_line = r_f.cross(&a_f);
    let fixed_dir = (&fixed.1.attracting - &fixed.1.repelling).normalize();
    let ball = group.ball(cutoff);
    let mut tested = 0;
    let mut found: Vec<CrossingPoint> = Vec::new();
    for el in ball.iter() {
        if same_curve && el.word.is_empty() {
            continue;
        }
        if !right_minimal(&el.word, mw, &mw_inv) || !left_minimal(&el.word, fw, &fw_inv) {
            continue;
        }
        tested += 1;
        let big_r = el.matrix * r_m;
        let big_a = el.matrix * a_m;
        let (Some(gr), Some(ga)) = (dehomogenize(&big_r), dehomogenize(&big_a)) else { continue };
        let linked = match endpoints_linked(domain, (&gr, &ga), (&fixed.1.repelling, &fixed.1.attracting)) {
            Ok(l) => l,
            Err(GeometryError::SameAxis) => continue,
            Err(e) => return Err(e),
        };
        if !linked {
            continue;
        }
        let p_h = big_r.cross(&big_a).cross(&fixed_line);
        let p = dehomogenize(&p_h).ok_or_else(|| GeometryError::Consistency("crossing at infinity".into()))?;
        if !domain.contains(&p) {
            return Err(GeometryError::Consistency(format!(
                "linked axes for element {} meet outside the domain",
                el.word
            )));
        }
        let t_moving = moving.1.wrap(lift_parameter(moving.1, &big_r, &big_a, &p_h));
        let t_fixed = fixed.1.wrap(lift_parameter(fixed.1, &r_f, &a_f, &p_h));
        let duplicate = found.iter().any(|c| {
            let (u, v) = (c.incidence[0].1, c.incidence[1].1);
            let direct = periodic_gap(u, t_moving, moving.1.primitive_length) < PARAM_TOL
                && periodic_gap(v, t_fixed, fixed.1.primitive_length) < PARAM_TOL;
            let swapped = same_curve
                && periodic_gap(u, t_fixed, moving.1.primitive_length) < PARAM_TOL
                && periodic_gap(v, t_moving, fixed.1.primitive_length) < PARAM_TOL;
            direct || swapped
        });
        if duplicate {
            continue;
        }
        let moving_dir = (&ga - &gr).normalize();
        let angle = moving_dir.dot(&fixed_dir).abs().min(1.0).acos();
        if angle < TRANSVERSALITY_TOL {
            return Err(GeometryError::Tangency { geodesic: fixed.0 });
        }
        let reduced = group.dirichlet_reduce(&p, REDUCE_CUTOFF)?;
        found.push(CrossingPoint {
            surface_point: reduced.point.iter().copied().collect(),
            incidence: [(moving.0, t_moving), (fixed.0, t_fixed)],
            angle,
            lift: p.iter().copied().collect(),
            tangents: [moving_dir.iter().copied().collect(), fixed_dir.iter().copied().collect()],
            element: el.word.clone(),
        });
    }
    found.sort_by(|a, b| {
        a.incidence[1].1.total_cmp(&b.incidence[1].1).then(a.incidence[0].1.total_cmp(&b.incidence[0].1))
    });
    Ok(CrossingReport { crossings: found, cutoff, elements_tested: tested, lower_bound: true })
}

/// Transverse crossings of two distinct closed geodesics, found by boundary
/// linking over group elements of word length at most `cutoff`.
///
/// Incidence index 0 refers to `gamma`, 1 to `delta`.
pub fn intersection_points(
    group: &SurfaceGroup,
    gamma: &ClosedGeodesic,
    delta: &ClosedGeodesic,
    cutoff: usize,
) -> Result<CrossingReport> {
    if cutoff < 1 {
        return Err(GeometryError::Precondition("cutoff must be at least 1".into()));
    }
    let g = primitive(group, gamma)?;
    let d = primitive(group, delta)?;
    if g.word == d.word {
        return Err(GeometryError::Precondition(format!(
            "{} and {} are the same geodesic as sets",
            gamma.word, delta.word
        )));
    }
    linked_crossings(group, (0, &g), (1, &d), cutoff)
}

/// Transverse self-crossings; each is reported once with both parameters.
pub fn self_intersections(group: &SurfaceGroup, gamma: &ClosedGeodesic, cutoff: usize) -> Result<CrossingReport> {
    if cutoff < 1 {
        return Err(GeometryError::Precondition("cutoff must be at least 1".into()));
    }
    let g = primitive(group, gamma)?;
    linked_crossings(group, (0, &g), (0, &g), cutoff)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplicityVerdict {
    pub simple: bool,
    pub self_crossings: usize,
    pub witness: Option<CrossingPoint>,
    pub cutoff: usize,
}

pub fn is_simple(group: &SurfaceGroup, gamma: &ClosedGeodesic, cutoff: usize) -> Result<SimplicityVerdict> {
    let report = self_intersections(group, gamma, cutoff)?;
    Ok(SimplicityVerdict {
        simple: report.crossings.is_empty(),
        self_crossings: report.crossings.len(),
        witness: report.crossings.first().cloned(),
        cutoff,
    })
}

/// Piece of a traced chord inside the Dirichlet domain, with the chord
/// parameters of its ends.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracedSegment {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub s0: f64,
    pub s1: f64,
}

/// Follows chords through translates of a Dirichlet domain.
///
/// The domain is centered at a slight generic offset of the group basepoint:
/// for symmetric basepoints the sides of the fundamental polygon can line up
/// into closed geodesics, which a tracer cannot follow robustly.
pub struct Tracer<'a> {
    group: &'a SurfaceGroup,
    center: crate::projective::Vector,
    /// Elements whose translates touch the domain, with the images of `center`.
    neighbors: Vec<(Matrix3<f64>, crate::projective::Vector)>,
    step: f64,
}

/// Chart offset of the tracing center from the basepoint.
pub const TRACE_CENTER_OFFSET: [f64; 2] = [2.3e-3, 1.1e-3];
/// Slack before a point counts as outside.
const INSIDE_TOL: f64 = 1e-9;
const EXIT_NUDGE: f64 = 1e-9;
const CORNER_TOL: f64 = 1e-6;
const CORNER_NUDGE: f64 = 1e-7;
const MAX_TRACE_STEPS: usize = 100_000;

impl<'a> Tracer<'a> {
    pub fn new(group: &'a SurfaceGroup) -> Result<Self> {
        let mut center = group.basepoint().clone();
        center[0] += TRACE_CENTER_OFFSET[0];
        center[1] += TRACE_CENTER_OFFSET[1];
        if !group.domain().contains(&center) {
            return Err(GeometryError::Precondition("basepoint too close to the boundary for tracing".into()));
        }
        let letters = (0..2 * group.generators().len()).map(|code| *group.letter_matrix(crate::word::Letter::from_code(code)));
        let corners = group.vertex_elements().iter().map(|el| el.matrix);
        let neighbors = letters
            .chain(corners)
            .filter_map(|m| act(&m, &center).map(|image| (m, image)))
            .collect();
        Ok(Tracer { group, center, neighbors, step: 0.25 })
    }

    /// `d(x, c) - min_h d(x, h c)`; nonpositive exactly on the domain.
    fn excess(&self, x: &crate::projective::Vector) -> Result<f64> {
        let domain = self.group.domain();
        let own = hilbert_distance(domain, x, &self.center)?;
        let mut worst = f64::NEG_INFINITY;
        for (_, n) in &self.neighbors {
            worst = worst.max(own - hilbert_distance(domain, x, n)?);
        }
        Ok(worst)
    }

    /// Greedy descent of `x` into the domain; returns the image and the element used.
    fn reduce(&self, x: &crate::projective::Vector) -> Result<(crate::projective::Vector, Matrix3<f64>)> {
        let domain = self.group.domain();
        if !domain.contains(x) {
            return Err(GeometryError::OutsideDomain);
        }
        let mut q = x.clone();
        let mut m = Matrix3::identity();
        let mut current = hilbert_distance(domain, &q, &self.center)?;
        for _ in 0..REDUCE_CUTOFF {
            let mut best: Option<(f64, Matrix3<f64>, crate::projective::Vector)> = None;
            for (h, _) in &self.neighbors {
                let Some(image) = act(h, &q) else { continue };
                if !domain.contains(&image) {
                    continue;
                }
                let d = hilbert_distance(domain, &image, &self.center)?;
                if best.as_ref().is_none_or(|b| d < b.0) {
                    best = Some((d, *h, image));
                }
            }
            match best {
                Some((d, h, image)) if d < current - 1e-12 => {
                    q = image;
                    m = h * m;
                    current = d;
                }
                _ => return Ok((q, m)),
            }
        }
        Err(GeometryError::NonConvergence { cutoff: REDUCE_CUTOFF })
    }

    /// Trace `length` along the chord from `repelling` to `attracting`,
    /// starting at `start` (a chart point on the chord) with parameter `s_start`.
    ///
    /// The lift is carried by its boundary endpoints, which are projected
    /// back onto the boundary after every side pairing so that rounding
    /// cannot pull them into or out of the domain.
    pub fn trace(
        &self,
        repelling: &crate::projective::Vector,
        attracting: &crate::projective::Vector,
        start: &crate::projective::Vector,
        s_start: f64,
        length: f64,
    ) -> Result<TraceRun> {
        let domain = self.group.domain();
        let (start_reduced, start_frame) = self.reduce(start)?;
        let mut r = self.snap(&act(&start_frame, repelling).ok_or_else(|| GeometryError::Tracing("endpoint at infinity".into()))?)?;
        let mut a = self.snap(&act(&start_frame, attracting).ok_or_else(|| GeometryError::Tracing("endpoint at infinity".into()))?)?;
        let mut q = start_reduced.clone();
        let mut s = s_start;
        let end = s_start + length;
        let mut segments = Vec::new();
        let mut steps = 0;
        while s < end - 1e-15 {
            steps += 1;
            if steps > MAX_TRACE_STEPS {
                return Err(GeometryError::Tracing(format!("no progress after {MAX_TRACE_STEPS} steps at parameter {s}")));
            }
            let remaining = end - s;
            let dir = &a - &r;
            let at = |t: f64| -> Result<crate::projective::Vector> {
                point_at_distance(domain, &q, &dir, t).map_err(|e| {
                    GeometryError::Tracing(format!("step underflow near the boundary at parameter {}: {e}", s + t))
                })
            };
            // fine samples first so thin corner passages are not skipped
            let mut samples: Vec<f64> = (1..=16).map(|k| self.step * k as f64 / 16.0).collect();
            let mut t = self.step;
            while t < remaining {
                t += self.step;
                samples.push(t);
            }
            let mut prev = 0.0;
            let mut exit: Option<(f64, f64)> = None;
            for &t in &samples {
                let t = t.min(remaining);
                if self.excess(&at(t)?)? > INSIDE_TOL {
                    exit = Some((prev, t));
                    break;
                }
                prev = t;
                if t >= remaining {
                    break;
                }
            }
            let Some((mut lo, mut hi)) = exit else {
                let last = at(remaining)?;
                segments.push(TracedSegment {
                    start: q.iter().copied().collect(),
                    end: last.iter().copied().collect(),
                    s0: s,
                    s1: end,
                });
                q = last;
                break;
            };
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.excess(&at(mid)?)? > INSIDE_TOL {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let t_exit = lo;
            let x_exit = at(t_exit)?;
            if t_exit > 0.0 {
                segments.push(TracedSegment {
                    start: q.iter().copied().collect(),
                    end: x_exit.iter().copied().collect(),
                    s0: s,
                    s1: s + t_exit,
                });
            }
            // a chord through a vertex of the domain exits again immediately;
            // step past the vertex instead of bouncing between its copies
            let corner = t_exit < CORNER_TOL;
            let nudge = if corner { CORNER_NUDGE } else { EXIT_NUDGE };
            let beyond = at(t_exit + nudge)?;
            let (_, hop) = self.reduce(&beyond)?;
            if hop == Matrix3::identity() {
                q = beyond;
                s += t_exit + nudge;
                continue;
            }
            if corner {
                segments.push(TracedSegment {
                    start: x_exit.iter().copied().collect(),
                    end: beyond.iter().copied().collect(),
                    s0: s + t_exit,
                    s1: s + t_exit + nudge,
                });
            }
            let (entry, advance) = if corner { (&beyond, t_exit + nudge) } else { (&x_exit, t_exit) };
            let moved = |p: &crate::projective::Vector| {
                act(&hop, p).ok_or_else(|| GeometryError::Tracing("endpoint at infinity".into())).and_then(|x| self.snap(&x))
            };
            r = moved(&r)?;
            a = moved(&a)?;
            q = act(&hop, entry).ok_or_else(|| GeometryError::Tracing("entry point at infinity".into()))?;
            s += advance;
        }
        Ok(TraceRun {
            segments,
            start_point: start_reduced.iter().copied().collect(),
            final_point: q.iter().copied().collect(),
            final_endpoints: (r.iter().copied().collect(), a.iter().copied().collect()),
        })
    }

    /// Radial projection onto the boundary from the domain center.
    fn snap(&self, p: &crate::projective::Vector) -> Result<crate::projective::Vector> {
        let domain = self.group.domain();
        domain.boundary_point(&(p - domain.center()))
    }
}

#[derive(Debug, Clone)]
pub struct TraceRun {
    pub segments: Vec<TracedSegment>,
    pub start_point: Vec<f64>,
    pub final_point: Vec<f64>,
    /// Boundary endpoints of the final lift.
    pub final_endpoints: (Vec<f64>, Vec<f64>),
}

/// Parameters `(s, s')` where two traced segments cross; closed intervals with
/// a small slack so crossings on the domain boundary are seen from both sides.
fn segment_crossing(domain: &ConvexDomain, p: &TracedSegment, q: &TracedSegment) -> Option<(f64, f64, [f64; 2])> {
    let (p0, p1) = ((p.start[0], p.start[1]), (p.end[0], p.end[1]));
    let (q0, q1) = ((q.start[0], q.start[1]), (q.end[0], q.end[1]));
    let u = (p1.0 - p0.0, p1.1 - p0.1);
    let v = (q1.0 - q0.0, q1.1 - q0.1);
    let w = (q0.0 - p0.0, q0.1 - p0.1);
    let den = u.0 * v.1 - u.1 * v.0;
    let scale = (u.0.hypot(u.1)) * (v.0.hypot(v.1));
    if den.abs() <= 1e-12 * scale || scale == 0.0 {
        return None;
    }
    let a = (w.0 * v.1 - w.1 * v.0) / den;
    let b = (w.0 * u.1 - w.1 * u.0) / den;
    let slack = 1e-9;
    if a < -slack || a > 1.0 + slack || b < -slack || b > 1.0 + slack {
        return None;
    }
    let x = crate::projective::Vector::from_vec(vec![p0.0 + a * u.0, p0.1 + a * u.1]);
    let along = |seg: &TracedSegment, frac: f64| -> f64 {
        let start = crate::projective::Vector::from_vec(seg.start.clone());
        let d = hilbert_distance(domain, &start, &x).unwrap_or(0.0);
        if frac < 0.0 { seg.s0 - d } else { seg.s0 + d }
    };
    Some((along(p, a), along(q, b), [x[0], x[1]]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracedCrossing {
    pub params: [f64; 2],
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceReport {
    pub crossings: Vec<TracedCrossing>,
    pub segments: Vec<TracedSegment>,
    pub periods: usize,
    /// Distance between the start and the end of the traced loop in the domain.
    pub closure_defect: f64,
}

/// Loop closure accepted for one traced period, chart units.
pub const CLOSURE_TOL: f64 = 1e-6;

/// Segments of `periods` turns around a closed geodesic. One period is
/// traced and repeated: the flow amplifies rounding exponentially, so
/// tracing further would only add error.
fn trace_closed(group: &SurfaceGroup, gamma: &ClosedGeodesic, periods: usize) -> Result<(Vec<TracedSegment>, f64)> {
    let tracer = Tracer::new(group)?;
    let l = gamma.primitive_length;
    let run = tracer.trace(&gamma.repelling, &gamma.attracting, &gamma.foot, 0.0, l)?;
    let start = crate::projective::Vector::from_vec(run.start_point.clone());
    let finish = crate::projective::Vector::from_vec(run.final_point.clone());
    let closure = (start - finish).norm();
    if closure > CLOSURE_TOL {
        return Err(GeometryError::Tracing(format!(
            "traced loop of {} does not close (gap {closure:.3e})",
            gamma.word
        )));
    }
    let segments = (0..periods)
        .flat_map(|k| {
            run.segments.iter().map(move |seg| TracedSegment { s0: seg.s0 + k as f64 * l, s1: seg.s1 + k as f64 * l, ..seg.clone() })
        })
        .collect();
    Ok((segments, closure))
}

fn collect_crossings(
    domain: &ConvexDomain,
    first: &[TracedSegment],
    second: &[TracedSegment],
    lengths: (f64, f64),
    same_curve: bool,
) -> Vec<TracedCrossing> {
    let mut out: Vec<TracedCrossing> = Vec::new();
    for (i, p) in first.iter().enumerate() {
        let start_j = if same_curve { i + 1 } else { 0 };
        for q in &second[start_j.min(second.len())..] {
            let Some((s, t, x)) = segment_crossing(domain, p, q) else { continue };
            let (s, t) = (s.rem_euclid(lengths.0), t.rem_euclid(lengths.1));
            if same_curve && periodic_gap(s, t, lengths.0) < PARAM_TOL {
                continue;
            }
            let dup = out.iter().any(|c| {
                let direct = periodic_gap(c.params[0], s, lengths.0) < PARAM_TOL
                    && periodic_gap(c.params[1], t, lengths.1) < PARAM_TOL;
                let swapped = same_curve
                    && periodic_gap(c.params[0], t, lengths.0) < PARAM_TOL
                    && periodic_gap(c.params[1], s, lengths.1) < PARAM_TOL;
                direct || swapped
            });
            if !dup {
                out.push(TracedCrossing { params: [s, t], point: x.to_vec() });
            }
        }
    }
    out.sort_by(|a, b| a.params[0].total_cmp(&b.params[0]).then(a.params[1].total_cmp(&b.params[1])));
    out
}

/// Independent check of self-crossings: trace the axis through copies of the
/// Dirichlet domain for the given number of periods and intersect the pieces.
pub fn trace_geodesic_oracle(group: &SurfaceGroup, gamma: &ClosedGeodesic, periods: usize) -> Result<TraceReport> {
    if periods < 1 {
        return Err(GeometryError::Precondition("periods must be at least 1".into()));
    }
    let g = primitive(group, gamma)?;
    let (segments, closure) = trace_closed(group, &g, periods)?;
    let l = g.primitive_length;
    let crossings = collect_crossings(group.domain(), &segments, &segments, (l, l), true);
    Ok(TraceReport { crossings, segments, periods, closure_defect: closure })
}

/// Tracing-based crossings between two distinct closed geodesics.
pub fn trace_pair_oracle(group: &SurfaceGroup, gamma: &ClosedGeodesic, delta: &ClosedGeodesic) -> Result<Vec<TracedCrossing>> {
    let g = primitive(group, gamma)?;
    let d = primitive(group, delta)?;
    if g.word == d.word {
        return Err(GeometryError::Precondition("geodesics coincide as sets".into()));
    }
    let (sg, _) = trace_closed(group, &g, 1)?;
    let (sd, _) = trace_closed(group, &d, 1)?;
    Ok(collect_crossings(group.domain(), &sg, &sd, (g.primitive_length, d.primitive_length), false))
}

/// Named list of closed geodesics, distinct as sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicCollection {
    pub label: String,
    pub items: Vec<ClosedGeodesic>,
}

/// JSON form: `{"label": "...", "words": ["a1", "a1b1A1B1", ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CollectionSpec {
    #[serde(default)]
    pub label: String,
    pub words: Vec<GroupWord>,
}

impl GeodesicCollection {
    /// Geodesics for the words; powers are replaced by their primitive roots.
    pub fn new(group: &SurfaceGroup, label: &str, words: &[GroupWord]) -> Result<Self> {
        let mut items: Vec<ClosedGeodesic> = Vec::new();
        for w in words {
            let g = primitive(group, &group.geodesic(w)?)?;
            if items.iter().any(|o| o.word == g.word) {
                return Err(GeometryError::InvalidInput(format!("{w} appears twice in the collection")));
            }
            items.push(g);
        }
        Ok(GeodesicCollection { label: label.to_string(), items })
    }

    pub fn from_spec(group: &SurfaceGroup, spec: &CollectionSpec) -> Result<Self> {
        Self::new(group, &spec.label, &spec.words)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphArc {
    pub geodesic: usize,
    pub from_vertex: usize,
    pub to_vertex: usize,
    pub from_param: f64,
    pub to_param: f64,
}

/// Point of the surface where two or more branches of the collection cross.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphVertex {
    pub point: Vec<f64>,
    /// Indices into [`CrossingGraph::crossings`] located at this point.
    pub crossings: Vec<usize>,
    /// Number of branches through the point.
    pub branches: usize,
}

/// Crossing graph with its rotation system. Darts `2e` and `2e + 1` are arc
/// `e` leaving its start and its end vertex respectively.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingGraph {
    pub crossings: Vec<CrossingPoint>,
    pub vertices: Vec<GraphVertex>,
    pub arcs: Vec<GraphArc>,
    /// Darts leaving each vertex in counterclockwise order.
    pub rotation: Vec<Vec<usize>>,
    pub faces: usize,
    /// Collection members with no crossings at all.
    pub crossing_free: Vec<usize>,
    pub cutoff: usize,
}

impl CrossingGraph {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.arcs.len() as i64 + self.faces as i64
    }
}

/// All pairwise and self crossings of the collection at the cutoff.
pub fn collection_crossings(group: &SurfaceGroup, c: &GeodesicCollection, cutoff: usize) -> Result<Vec<CrossingPoint>> {
    let mut all = Vec::new();
    for (i, gi) in c.items.iter().enumerate() {
        all.extend(linked_crossings(group, (i, gi), (i, gi), cutoff)?.crossings);
        for (j, gj) in c.items.iter().enumerate().skip(i + 1) {
            all.extend(linked_crossings(group, (i, gi), (j, gj), cutoff)?.crossings);
        }
    }
    Ok(all)
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Differential of a projective map on a chart direction at `p`.
fn push_tangent(h: &Matrix3<f64>, p: &[f64], dir: &[f64]) -> [f64; 2] {
    let x = Vector3::new(p[0], p[1], 1.0);
    let dx = Vector3::new(dir[0], dir[1], 0.0);
    let hx = h * x;
    let hd = h * dx;
    let w = hx[2];
    let y = [hx[0] / w, hx[1] / w];
    [(hd[0] - y[0] * hd[2]) / w, (hd[1] - y[1] * hd[2]) / w]
}

/// Element taking `p` to `target`, both lifts of one surface point.
fn transfer(group: &SurfaceGroup, p: &[f64], target: &[f64]) -> Result<Matrix3<f64>> {
    const SAME: f64 = 1e-7;
    let pv = crate::projective::Vector::from_vec(p.to_vec());
    let tv = crate::projective::Vector::from_vec(target.to_vec());
    if (&pv - &tv).norm() <= SAME {
        return Ok(Matrix3::identity());
    }
    let rp = group.dirichlet_reduce(&pv, REDUCE_CUTOFF)?;
    let rt = group.dirichlet_reduce(&tv, REDUCE_CUTOFF)?;
    let back = rt
        .matrix
        .try_inverse()
        .ok_or_else(|| GeometryError::Consistency("reduction matrix is singular".into()))?;
    // points on the domain boundary may reduce to different copies; the
    // copies around one vertex are reached by short words
    for el in group.ball(4).iter() {
        let Some(q) = act(&el.matrix, &rp.point) else { continue };
        if (&q - &rt.point).norm() <= SAME {
            return Ok(back * el.matrix * rp.matrix);
        }
    }
    Err(GeometryError::Consistency("crossings merged into one vertex are not equivalent".into()))
}

pub fn build_crossing_graph(group: &SurfaceGroup, c: &GeodesicCollection, cutoff: usize) -> Result<CrossingGraph> {
    let crossings = collection_crossings(group, c, cutoff)?;
    // incidences per geodesic: (param, crossing, slot)
    let mut along: Vec<Vec<(f64, usize, usize)>> = vec![Vec::new(); c.items.len()];
    for (v, x) in crossings.iter().enumerate() {
        for (slot, &(g, t)) in x.incidence.iter().enumerate() {
            along[g].push((t, v, slot));
        }
    }
    // a pass is one branch through a point; crossings sharing a pass coincide
    struct Pass {
        geodesic: usize,
        param: f64,
        members: Vec<(usize, usize)>,
    }
    let mut passes_on: Vec<Vec<Pass>> = Vec::with_capacity(c.items.len());
    let mut parent: Vec<usize> = (0..crossings.len()).collect();
    let mut crossing_free = Vec::new();
    for (g, list) in along.iter_mut().enumerate() {
        list.sort_by(|a, b| a.0.total_cmp(&b.0));
        if list.is_empty() {
            crossing_free.push(g);
        }
        let l = c.items[g].primitive_length;
        let mut passes: Vec<Pass> = Vec::new();
        for &(t, v, slot) in list.iter() {
            match passes.last_mut() {
                Some(p) if periodic_gap(p.param, t, l) < PARAM_TOL => p.members.push((v, slot)),
                _ => passes.push(Pass { geodesic: g, param: t, members: vec![(v, slot)] }),
            }
        }
        if passes.len() > 1 && periodic_gap(passes[0].param, passes[passes.len() - 1].param, l) < PARAM_TOL {
            let last = passes.pop().unwrap();
            passes[0].members.extend(last.members);
        }
        for p in &passes {
            let slots: Vec<usize> = p.members.iter().map(|m| m.0).collect();
            if slots.windows(2).any(|w| w[0] == w[1]) {
                return Err(GeometryError::Tangency { geodesic: g });
            }
            let r0 = find(&mut parent, p.members[0].0);
            for &(v, _) in &p.members[1..] {
                let r = find(&mut parent, v);
                parent[r] = r0;
            }
        }
        passes_on.push(passes);
    }
    let mut node_of = vec![usize::MAX; crossings.len()];
    let mut vertices: Vec<GraphVertex> = Vec::new();
    for v in 0..crossings.len() {
        let r = find(&mut parent, v);
        if node_of[r] == usize::MAX {
            node_of[r] = vertices.len();
            vertices.push(GraphVertex { point: crossings[r].surface_point.clone(), crossings: Vec::new(), branches: 0 });
        }
        node_of[v] = node_of[r];
        vertices[node_of[v]].crossings.push(v);
    }
    // reference lift per vertex and the map from each crossing's lift to it
    let mut to_reference: Vec<Matrix3<f64>> = Vec::with_capacity(crossings.len());
    for (v, x) in crossings.iter().enumerate() {
        let reference = &crossings[vertices[node_of[v]].crossings[0]].lift;
        to_reference.push(transfer(group, &x.lift, reference)?);
    }
    let mut arcs = Vec::new();
    let mut ends: Vec<Vec<(f64, usize)>> = vec![Vec::new(); vertices.len()];
    for passes in &passes_on {
        let n = passes.len();
        for k in 0..n {
            let (here, next) = (&passes[k], &passes[(k + 1) % n]);
            let e = arcs.len();
            let from_vertex = node_of[here.members[0].0];
            let to_vertex = node_of[next.members[0].0];
            arcs.push(GraphArc {
                geodesic: here.geodesic,
                from_vertex,
                to_vertex,
                from_param: here.param,
                to_param: next.param,
            });
            let leave = |pass: &Pass| -> f64 {
                let (v, slot) = pass.members[0];
                let x = &crossings[v];
                let t = push_tangent(&to_reference[v], &x.lift, &x.tangents[slot]);
                t[1].atan2(t[0])
            };
            ends[from_vertex].push((leave(here).rem_euclid(2.0 * PI), 2 * e));
            ends[to_vertex].push(((leave(next) + PI).rem_euclid(2.0 * PI), 2 * e + 1));
        }
    }
    let mut rotation = Vec::with_capacity(vertices.len());
    let mut sigma = vec![usize::MAX; 2 * arcs.len()];
    for (v, mut list) in ends.into_iter().enumerate() {
        list.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in list.windows(2) {
            if w[1].0 - w[0].0 < TRANSVERSALITY_TOL {
                return Err(GeometryError::Tangency { geodesic: arcs[w[0].1 / 2].geodesic });
            }
        }
        let darts: Vec<usize> = list.iter().map(|e| e.1).collect();
        for k in 0..darts.len() {
            sigma[darts[k]] = darts[(k + 1) % darts.len()];
        }
        vertices[v].branches = darts.len() / 2;
        rotation.push(darts);
    }
    let mut seen = vec![false; sigma.len()];
    let mut faces = 0;
    for d0 in 0..sigma.len() {
        if seen[d0] {
            continue;
        }
        faces += 1;
        let mut d = d0;
        while !seen[d] {
            seen[d] = true;
            d = sigma[d ^ 1];
        }
    }
    Ok(CrossingGraph { crossings, vertices, arcs, rotation, faces, crossing_free, cutoff })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FillingVerdict {
    pub filling: bool,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub surface_euler_characteristic: i64,
    pub crossing_free: Vec<GroupWord>,
    pub cutoff: usize,
}

/// Filling iff every complementary region is a disk, detected as
/// `V - E + F = 2 - 2g` for the crossing graph.
pub fn is_filling(group: &SurfaceGroup, c: &GeodesicCollection, cutoff: usize) -> Result<FillingVerdict> {
    if c.items.is_empty() {
        return Err(GeometryError::Precondition("collection is empty".into()));
    }
    let chi_surface = 2 - 2 * group.genus() as i64;
    let graph = build_crossing_graph(group, c, cutoff)?;
    let v = graph.vertices.len();
    let e = graph.arcs.len();
    let chi = graph.euler_characteristic();
    let filling = v > 0 && graph.crossing_free.is_empty() && chi == chi_surface;
    Ok(FillingVerdict {
        filling,
        vertices: v,
        edges: e,
        faces: graph.faces,
        euler_characteristic: chi,
        surface_euler_characteristic: chi_surface,
        crossing_free: graph.crossing_free.iter().map(|&i| c.items[i].word.clone()).collect(),
        cutoff,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Closedness {
    ClosedLike,
    NonClosedLike,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosednessReport {
    pub verdict: Closedness,
    pub window_counts: Vec<usize>,
    pub window: f64,
    /// Always true: finitely many windows cannot decide closedness.
    pub heuristic: bool,
}

/// Number of windows examined by [`classify_against_filling`].
pub const CLOSEDNESS_WINDOWS: usize = 3;
/// Offset of the first window from the chart foot, as a fraction of the window.
const WINDOW_OFFSET: f64 = 0.137;

/// Count crossings of the chord between two boundary points with the lifts of
/// a filling collection over consecutive windows of flow distance `window`;
/// constant counts suggest a closed geodesic.
pub fn classify_against_filling(
    group: &SurfaceGroup,
    endpoints: (&crate::projective::Vector, &crate::projective::Vector),
    c: &GeodesicCollection,
    window: f64,
) -> Result<ClosednessReport> {
    if !(window > 0.0) {
        return Ok(ClosednessReport {
            verdict: Closedness::Indeterminate,
            window_counts: Vec::new(),
            window,
            heuristic: true,
        });
    }
    let domain = group.domain();
    let (r, a) = endpoints;
    if (r - a).norm() <= 1e-12 {
        return Err(GeometryError::Precondition("endpoints must be distinct".into()));
    }
    let center = domain.center();
    let u = a - r;
    let s = ((&center - r).dot(&u) / u.norm_squared()).clamp(0.05, 0.95);
    let foot = r + &u * s;
    let start = point_at_distance(domain, &foot, &u, WINDOW_OFFSET * window)?;
    let total = window * CLOSEDNESS_WINDOWS as f64;
    let chord = Tracer::new(group)?.trace(r, a, &start, 0.0, total)?.segments;
    let mut counts = vec![0usize; CLOSEDNESS_WINDOWS];
    for g in &c.items {
        let (segs, _) = trace_closed(group, g, 1)?;
        let hits = collect_crossings(domain, &chord, &segs, (f64::INFINITY, g.primitive_length), false);
        for h in hits {
            let k = (h.params[0] / window).floor();
            if k >= 0.0 && (k as usize) < CLOSEDNESS_WINDOWS {
                counts[k as usize] += 1;
            }
        }
    }
    let verdict = if counts.iter().all(|&k| k == counts[0]) { Closedness::ClosedLike } else { Closedness::NonClosedLike };
    Ok(ClosednessReport { verdict, window_counts: counts, window, heuristic: true })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaminationVerdict {
    pub lamination: bool,
    pub non_simple: Vec<GroupWord>,
    pub crossing_pairs: Vec<(GroupWord, GroupWord)>,
    pub cutoff: usize,
}

/// A finite collection is a lamination iff its members are simple and pairwise disjoint.
pub fn verify_finite_lamination(group: &SurfaceGroup, c: &GeodesicCollection, cutoff: usize) -> Result<LaminationVerdict> {
    if c.items.is_empty() {
        return Err(GeometryError::Precondition("collection is empty".into()));
    }
    let mut non_simple = Vec::new();
    let mut crossing_pairs = Vec::new();
    for (i, gi) in c.items.iter().enumerate() {
        if !is_simple(group, gi, cutoff)?.simple {
            non_simple.push(gi.word.clone());
        }
        for gj in c.items.iter().skip(i + 1) {
            if !intersection_points(group, gi, gj, cutoff)?.crossings.is_empty() {
                crossing_pairs.push((gi.word.clone(), gj.word.clone()));
            }
        }
    }
    Ok(LaminationVerdict {
        lamination: non_simple.is_empty() && crossing_pairs.is_empty(),
        non_simple,
        crossing_pairs,
        cutoff,
    })
}
