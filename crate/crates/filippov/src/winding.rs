//! The index engine: rotation of a vector field along circle arcs, corner
//! corrections where the circle crosses the switching set, the resulting
//! integer index, and perturbation-hypothesis checking.
//!
//! The index of `Z` on a ball `B` is assembled counterclockwise: the sweep
//! of `F+` along the boundary arc inside `{f >= 0}`, the corner swept by
//! the straight-line homotopy from `F+` to `F-` where the boundary passes
//! into `{f <= 0}`, the sweep of `F-` along its arc, and the corner back.
//! Divided by 2 pi this is an integer whenever the boundary is free of
//! singularities.

use std::f64::consts::TAU;

use crate::defaults;
use crate::error::{Error, Result};
use crate::field::{PlanarFilippovField, Singularity, SigmaTag, VectorField};
use crate::geom::{vec2, Vec2};

/// A counterclockwise circle arc `t -> center + radius (cos t, sin t)`,
/// `t` in `[t_start, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcSpec {
    pub center: Vec2,
    pub radius: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl ArcSpec {
    pub fn full_circle(center: Vec2, radius: f64) -> ArcSpec {
        ArcSpec {
            center,
            radius,
            t_start: 0.0,
            t_end: TAU,
        }
    }

    pub fn point(&self, t: f64) -> Vec2 {
        self.center + vec2(t.cos(), t.sin()) * self.radius
    }

    /// Derivative of the parametrization.
    pub fn velocity(&self, t: f64) -> Vec2 {
        vec2(-t.sin(), t.cos()) * self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepResult {
    /// Total signed angle swept by the field image, in radians.
    pub total_angle: f64,
    /// Smallest field norm encountered; the sweep is invalid unless > 0.
    pub min_norm: f64,
    /// Number of field evaluations.
    pub samples: usize,
}

/// Sweep the image of an arbitrary evaluable field along an arc,
/// accumulating `atan2(det(V_k | V_k+1), <V_k, V_k+1>)` over adaptively
/// refined intervals: every interval ends at most `1e-3` of the parameter
/// range long and turns at most `pi/4`.
pub fn sweep_values_along_arc<F>(eval: F, arc: &ArcSpec, tol: f64) -> Result<SweepResult>
where
    F: Fn(Vec2) -> Result<Vec2>,
{
    let range = arc.t_end - arc.t_start;
    assert!(range > 0.0, "arc must have positive parameter range");
    assert!(arc.radius > 0.0, "arc radius must be positive");

    let mut state = SweepState {
        total_angle: 0.0,
        min_norm: f64::INFINITY,
        samples: 0,
    };
    let at = |t: f64, state: &mut SweepState| -> Result<Vec2> {
        let v = eval(arc.point(t))?;
        state.samples += 1;
        let norm = v.norm();
        if norm < state.min_norm {
            state.min_norm = norm;
        }
        if norm <= tol {
            return Err(Error::FieldVanishesOnArc(norm, tol));
        }
        Ok(v)
    };

    // Initial uniform subdivision already satisfies the interval-length
    // bound; refinement below only has to meet the angle bound.
    let n0 = (1.0 / defaults::SWEEP_MAX_STEP_FRACTION).ceil() as usize;
    let mut prev_t = arc.t_start;
    let mut prev_v = at(prev_t, &mut state)?;
    for k in 1..=n0 {
        let t = arc.t_start + range * (k as f64 / n0 as f64);
        let v = at(t, &mut state)?;
        refine_interval(&at, prev_t, prev_v, t, v, 0, &mut state, tol)?;
        prev_t = t;
        prev_v = v;
    }
    Ok(SweepResult {
        total_angle: state.total_angle,
        min_norm: state.min_norm,
        samples: state.samples,
    })
}

struct SweepState {
    total_angle: f64,
    min_norm: f64,
    samples: usize,
}

fn angle_between(a: Vec2, b: Vec2) -> f64 {
    a.cross(b).atan2(a.dot(b))
}

fn refine_interval<F>(
    at: &F,
    t0: f64,
    v0: Vec2,
    t1: f64,
    v1: Vec2,
    depth: usize,
    state: &mut SweepState,
    tol: f64,
) -> Result<()>
where
    F: Fn(f64, &mut SweepState) -> Result<Vec2>,
{
    let delta = angle_between(v0, v1);
    if delta.abs() <= defaults::SWEEP_MAX_ANGLE {
        state.total_angle += delta;
        return Ok(());
    }
    if depth >= 48 {
        // A quarter-turn across a vanishing interval means the field
        // effectively vanishes between samples.
        return Err(Error::FieldVanishesOnArc(state.min_norm, tol));
    }
    let tm = 0.5 * (t0 + t1);
    let vm = at(tm, state)?;
    refine_interval(at, t0, v0, tm, vm, depth + 1, state, tol)?;
    refine_interval(at, tm, vm, t1, v1, depth + 1, state, tol)
}

/// Sweep of a vector field's image along an arc.
pub fn sweep_along_arc(field: &VectorField, arc: &ArcSpec, tol: f64) -> Result<SweepResult> {
    sweep_values_along_arc(|p| field.eval(p), arc, tol)
}

/// Sample the field image along an arc at `n + 1` uniform parameters,
/// for curve export.
pub fn sample_curve(field: &VectorField, arc: &ArcSpec, n: usize) -> Result<Vec<(f64, Vec2)>> {
    let mut rows = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = arc.t_start + (arc.t_end - arc.t_start) * (k as f64 / n as f64);
        rows.push((t, field.eval(arc.point(t))?));
    }
    Ok(rows)
}

/// The corner auxiliary function
/// `H(A, B) = (|A|^2 - <A, B>) / det(B | A)`,
/// where `det(B | A)` is the determinant of the matrix with first column
/// `B` and second column `A`.
pub fn corner_h(a: Vec2, b: Vec2) -> Result<f64> {
    let det = b.cross(a);
    if det.abs() <= defaults::DET_REL_TOL * a.norm() * b.norm() {
        return Err(Error::DegenerateDeterminant(det.abs()));
    }
    Ok((a.norm_sq() - a.dot(b)) / det)
}

/// Minimum of `|(1 - t) A + t B|` over `t` in `[0, 1]`, in closed form:
/// the norm is a quadratic in `t` whose critical point is clamped to the
/// interval.
pub fn min_segment_norm(a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let dd = d.norm_sq();
    let mut best = a.norm_sq().min(b.norm_sq());
    if dd > 0.0 {
        let t = (-a.dot(d) / dd).clamp(0.0, 1.0);
        best = best.min((a + d * t).norm_sq());
    }
    best.max(0.0).sqrt()
}

/// Signed angle swept by the straight-line homotopy from `A` to `B`,
/// computed via the arctangent pair `atan(H(B, A)) - atan(H(A, B))`
/// (0 when the determinant degenerates). The segment must not pass
/// through the origin, i.e. `A` and `B` must not be anti-parallel.
///
/// An independent closed form, `atan2(det(A | B), <A, B>)`, serves as the
/// cross-check oracle in the test suites.
pub fn corner_sweep(a: Vec2, b: Vec2) -> Result<f64> {
    let scale = a.norm().max(b.norm());
    if min_segment_norm(a, b) <= defaults::DET_REL_TOL * scale {
        return Err(Error::SegmentThroughOrigin);
    }
    if a.cross(b).abs() <= defaults::DET_REL_TOL * a.norm() * b.norm() {
        return Ok(0.0);
    }
    Ok(corner_h(b, a)?.atan() - corner_h(a, b)?.atan())
}

/// Index of `Z` on the ball of the given center and radius, with the raw
/// winding and its distance to the nearest integer.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IndexResult {
    pub index: i64,
    /// Total swept angle divided by 2 pi, before rounding.
    pub raw_turns: f64,
    /// `|raw_turns - index|`; must be at most 1e-6.
    pub residual: f64,
}

fn round_to_index(total_angle: f64) -> Result<IndexResult> {
    let raw_turns = total_angle / TAU;
    let nearest = raw_turns.round();
    let residual = (raw_turns - nearest).abs();
    if residual > defaults::INTEGER_RESIDUAL_TOL {
        return Err(Error::IntegerResidualTooLarge(
            raw_turns,
            residual,
            defaults::INTEGER_RESIDUAL_TOL,
        ));
    }
    Ok(IndexResult {
        index: nearest as i64,
        raw_turns,
        residual,
    })
}

/// The two parameters (in `[0, 2 pi)`) where the boundary circle crosses
/// the switching set, or `None` when it stays on one side. More than two
/// crossings, or a tangent touch, is rejected: the corner construction
/// assumes exactly two transversal crossings.
pub fn boundary_sigma_crossings(
    z: &PlanarFilippovField,
    center: Vec2,
    radius: f64,
) -> Result<Option<(f64, f64)>> {
    const SCAN: usize = 1024;
    let arc = ArcSpec::full_circle(center, radius);
    let mut values = Vec::with_capacity(SCAN);
    for k in 0..SCAN {
        let t = TAU * (k as f64 / SCAN as f64);
        values.push((t, z.switch.eval(arc.point(t))?));
    }
    let positive = |v: f64| v > 0.0;
    let mut brackets = Vec::new();
    let mut scale = 0.0f64;
    for k in 0..SCAN {
        let (t0, f0) = values[k];
        let (t1, f1) = if k + 1 == SCAN {
            (TAU, values[0].1)
        } else {
            values[k + 1]
        };
        scale = scale.max(f0.abs());
        if positive(f0) != positive(f1) {
            brackets.push((t0, f0, t1));
        }
    }
    match brackets.len() {
        0 => {
            // Reject a tangential touch of the circle with the set.
            let min_abs = values.iter().map(|(_, f)| f.abs()).fold(f64::INFINITY, f64::min);
            if min_abs <= 1e-9 * (1.0 + scale) {
                return Err(Error::NonTransversalIntersection(format!(
                    "boundary circle touches the switching set (min |f| = {min_abs:e})"
                )));
            }
            Ok(None)
        }
        2 => {
            let mut roots = [0.0f64; 2];
            for (i, (t0, f0, t1)) in brackets.iter().enumerate() {
                roots[i] = bisect_circle_crossing(z, &arc, *t0, *f0, *t1)?;
            }
            // Transversality at each crossing.
            for t in roots {
                let p = arc.point(t);
                let grad = z.switch_gradient(p)?;
                let dgdt = grad.dot(arc.velocity(t));
                if dgdt.abs() <= 1e-7 * grad.norm() * radius {
                    return Err(Error::NonTransversalIntersection(format!(
                        "crossing at t = {t} is tangent to the circle"
                    )));
                }
            }
            Ok(Some((roots[0], roots[1])))
        }
        n => Err(Error::NonTransversalIntersection(format!(
            "boundary circle crosses the switching set {n} times; shrink the ball"
        ))),
    }
}

fn bisect_circle_crossing(
    z: &PlanarFilippovField,
    arc: &ArcSpec,
    t0: f64,
    f0: f64,
    t1: f64,
) -> Result<f64> {
    let mut lo = t0;
    let mut hi = t1;
    let mut flo = f0;
    for _ in 0..defaults::BISECT_MAX_ITER {
        let tm = 0.5 * (lo + hi);
        let fm = z.switch.eval(arc.point(tm))?;
        if fm == 0.0 {
            return Ok(tm);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = tm;
            flo = fm;
        } else {
            hi = tm;
        }
        if hi - lo <= 1e-16 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Index of the Filippov field on the closed ball `B(center, radius)`.
///
/// The boundary must be free of singularities and must cross the switching
/// set transversally in 0 or 2 points. With no crossing the index is the
/// smooth rotation number of whichever piece governs the boundary; with two
/// crossings the two arc sweeps and two corner terms are assembled.
pub fn filippov_index_on_ball(
    z: &PlanarFilippovField,
    center: Vec2,
    radius: f64,
) -> Result<IndexResult> {
    if !z.domain.contains_ball(center, radius) {
        return Err(Error::BallOutsideDomain(center.x, center.y, radius));
    }
    let tol = defaults::RESIDUAL_TOL;
    let crossings = boundary_sigma_crossings(z, center, radius)?;

    let Some((t_a, t_b)) = crossings else {
        let arc = ArcSpec::full_circle(center, radius);
        let side = z.switch.eval(arc.point(0.0))?;
        let field = if side >= 0.0 { &z.f_plus } else { &z.f_minus };
        let sweep = sweep_along_arc(field, &arc, tol)?;
        return round_to_index(sweep.total_angle);
    };

    // Decide which arc lies on the plus side.
    let arc = ArcSpec::full_circle(center, radius);
    let mid_ab = arc.point(0.5 * (t_a + t_b));
    let f_mid = z.switch.eval(mid_ab)?;
    let (plus_range, minus_range) = if f_mid > 0.0 {
        ((t_a, t_b), (t_b, t_a + TAU))
    } else {
        ((t_b, t_a + TAU), (t_a + TAU, t_b + TAU))
    };
    // Entry into the plus side happens at the start of the plus arc; exit at
    // its end.
    let q_enter = arc.point(plus_range.0);
    let q_exit = arc.point(plus_range.1);

    for q in [q_enter, q_exit] {
        check_regular_crossing(z, q)?;
    }

    let plus_arc = ArcSpec {
        center,
        radius,
        t_start: plus_range.0,
        t_end: plus_range.1,
    };
    let minus_arc = ArcSpec {
        center,
        radius,
        t_start: minus_range.0,
        t_end: minus_range.1,
    };
    let sweep_plus = sweep_along_arc(&z.f_plus, &plus_arc, tol)?;
    let sweep_minus = sweep_along_arc(&z.f_minus, &minus_arc, tol)?;

    let corner_exit = corner_sweep(z.f_plus.eval(q_exit)?, z.f_minus.eval(q_exit)?)?;
    let corner_enter = corner_sweep(z.f_minus.eval(q_enter)?, z.f_plus.eval(q_enter)?)?;

    round_to_index(sweep_plus.total_angle + corner_exit + sweep_minus.total_angle + corner_enter)
}

/// A boundary crossing point must be a regular crossing/sliding/escaping
/// point: no boundary equilibrium, no pseudo-equilibrium, and no tangency
/// unless the two pieces coincide there (a continuous field tangent to the
/// switching set crosses harmlessly: the corner term is zero and the
/// assembled image curve stays continuous).
fn check_regular_crossing(z: &PlanarFilippovField, q: Vec2) -> Result<()> {
    let class = z.classify_sigma_point(q, defaults::CLASS_TOL)?;
    match class.tag {
        SigmaTag::BoundaryEqPlus | SigmaTag::BoundaryEqMinus => Err(Error::SingularityOnBoundary(
            q.x,
            q.y,
            "boundary equilibrium".to_string(),
        )),
        SigmaTag::TangentialPlus | SigmaTag::TangentialMinus | SigmaTag::TangentialBoth => {
            let fp = z.f_plus.eval(q)?;
            let fm = z.f_minus.eval(q)?;
            let scale = fp.norm().max(fm.norm());
            if (fp - fm).norm() <= defaults::RESIDUAL_TOL * (1.0 + scale) {
                return Ok(());
            }
            Err(Error::SingularityOnBoundary(
                q.x,
                q.y,
                format!("tangential point ({})", class.tag),
            ))
        }
        SigmaTag::Sliding | SigmaTag::Escaping => {
            let slid = z.sliding_field(q)?;
            if slid.norm() <= defaults::RESIDUAL_TOL {
                return Err(Error::SingularityOnBoundary(
                    q.x,
                    q.y,
                    "pseudo-equilibrium".to_string(),
                ));
            }
            Ok(())
        }
        SigmaTag::Crossing => Ok(()),
    }
}

/// Index of `Z` at an isolated singularity: the ball index at half the
/// distance to the nearest other singularity (capped by the distance to
/// the domain boundary), recomputed at half that radius and required to
/// agree.
pub fn index_at_singularity(
    z: &PlanarFilippovField,
    s: &Singularity,
    all_singularities: &[Singularity],
) -> Result<i64> {
    let merge_radius = defaults::MERGE_FACTOR * defaults::RESIDUAL_TOL;
    let nearest = all_singularities
        .iter()
        .map(|other| other.location.dist(s.location))
        .filter(|d| *d > merge_radius)
        .fold(f64::INFINITY, f64::min);
    let boundary = z.domain.boundary_distance(s.location);
    let radius = (0.5 * nearest).min(0.99 * boundary);
    if !radius.is_finite() || radius <= 100.0 * defaults::RESIDUAL_TOL {
        return Err(Error::NotIsolated(s.location.x, s.location.y));
    }
    index_at_point(z, s.location, radius)
}

/// Compute the index of every singularity in the list, returning copies
/// with the `index` field filled in. Entries whose index cannot be
/// computed (e.g. not isolated enough) keep `None`.
pub fn attach_indices(z: &PlanarFilippovField, singularities: &[Singularity]) -> Vec<Singularity> {
    singularities
        .iter()
        .map(|s| Singularity {
            index: index_at_singularity(z, s, singularities).ok(),
            ..*s
        })
        .collect()
}

/// Ball index at the given isolation radius, verified against the value at
/// half the radius. Shrinks deterministically past non-transversal radii.
pub fn index_at_point(z: &PlanarFilippovField, center: Vec2, radius: f64) -> Result<i64> {
    let first = index_with_shrink(z, center, radius)?;
    let second = index_with_shrink(z, center, radius / 2.0)?;
    if first.index != second.index {
        return Err(Error::RadiusDisagreement(first.index, second.index));
    }
    Ok(first.index)
}

fn index_with_shrink(z: &PlanarFilippovField, center: Vec2, radius: f64) -> Result<IndexResult> {
    let mut r = radius;
    let mut last_err = None;
    for _ in 0..8 {
        match filippov_index_on_ball(z, center, r) {
            Err(Error::NonTransversalIntersection(msg)) => {
                last_err = Some(Error::NonTransversalIntersection(msg));
                r *= 0.9;
            }
            other => return other,
        }
    }
    Err(last_err.expect("loop ran"))
}

/// Outcome of checking the four perturbation-stability hypotheses for a
/// pair of fields on a boundary circle.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PerturbationReport {
    pub bullets: Vec<BulletCheck>,
    pub all_pass: bool,
}

#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BulletCheck {
    pub name: String,
    pub pass: bool,
    /// Worst `rhs - lhs` over the sampled points (strictly positive means
    /// the strict inequality held everywhere). `None` when no point was
    /// applicable.
    pub worst_margin: Option<f64>,
    pub worst_point: Option<Vec2>,
    pub samples: usize,
}

impl BulletCheck {
    fn new(name: &str) -> Self {
        BulletCheck {
            name: name.to_string(),
            pass: true,
            worst_margin: None,
            worst_point: None,
            samples: 0,
        }
    }

    fn record(&mut self, lhs: f64, rhs: f64, point: Vec2) {
        let margin = rhs - lhs;
        self.samples += 1;
        if self.worst_margin.map_or(true, |w| margin < w) {
            self.worst_margin = Some(margin);
            self.worst_point = Some(point);
        }
        if !(margin > 0.0) {
            self.pass = false;
        }
    }
}

/// Evaluate the four perturbation-stability hypotheses comparing `z` with
/// `z_tilde` on the boundary circle, at sampled points. Both fields are
/// assumed to switch across the same set; regions are decided by `z`'s
/// switching function. Report-only: failures are recorded, not raised.
pub fn verify_perturbation_bounds(
    z: &PlanarFilippovField,
    z_tilde: &PlanarFilippovField,
    center: Vec2,
    radius: f64,
) -> Result<PerturbationReport> {
    const SAMPLES: usize = 720;
    let arc = ArcSpec::full_circle(center, radius);

    let mut off_sigma = BulletCheck::new("|Z - Zt| < |Z| off the switching set");
    let mut lie_bullet = BulletCheck::new("|F(+-)f - Ft(+-)f| < |F(+-)f| at boundary crossings");
    let mut sliding_bullet = BulletCheck::new("|Zs - Zts| < |Zs| at sliding crossings");
    let mut segment_bullet =
        BulletCheck::new("|F(+-) - Ft(+-)| < min-segment-norm / 2 at boundary crossings");

    for k in 0..SAMPLES {
        let t = TAU * (k as f64 / SAMPLES as f64);
        let p = arc.point(t);
        let f_val = z.switch.eval(p)?;
        if f_val.abs() <= defaults::CLASS_TOL {
            continue;
        }
        let (zv, ztv) = if f_val > 0.0 {
            (z.f_plus.eval(p)?, z_tilde.f_plus.eval(p)?)
        } else {
            (z.f_minus.eval(p)?, z_tilde.f_minus.eval(p)?)
        };
        off_sigma.record((zv - ztv).norm(), zv.norm(), p);
    }

    if let Some((t_a, t_b)) = boundary_sigma_crossings(z, center, radius)? {
        for t in [t_a, t_b] {
            let q = arc.point(t);
            let grad = z.switch_gradient(q)?;
            let fp = z.f_plus.eval(q)?;
            let fm = z.f_minus.eval(q)?;
            let ftp = z_tilde.f_plus.eval(q)?;
            let ftm = z_tilde.f_minus.eval(q)?;

            let grad_t = z_tilde.switch_gradient(q)?;
            lie_bullet.record((grad.dot(fp) - grad_t.dot(ftp)).abs(), grad.dot(fp).abs(), q);
            lie_bullet.record((grad.dot(fm) - grad_t.dot(ftm)).abs(), grad.dot(fm).abs(), q);

            let class = z.classify_sigma_point(q, defaults::CLASS_TOL)?;
            if class.tag == SigmaTag::Sliding {
                let zs = z.sliding_field(q)?;
                match z_tilde.sliding_field(q) {
                    Ok(zts) => sliding_bullet.record((zs - zts).norm(), zs.norm(), q),
                    Err(_) => {
                        // The perturbed field lost the sliding region here.
                        sliding_bullet.record(f64::INFINITY, zs.norm(), q);
                    }
                }
            }

            let rhs = 0.5 * min_segment_norm(fp, fm);
            segment_bullet.record((fp - ftp).norm(), rhs, q);
            segment_bullet.record((fm - ftm).norm(), rhs, q);
        }
    }

    let bullets = vec![off_sigma, lie_bullet, sliding_bullet, segment_bullet];
    let all_pass = bullets.iter().all(|b| b.pass);
    Ok(PerturbationReport { bullets, all_pass })
}
