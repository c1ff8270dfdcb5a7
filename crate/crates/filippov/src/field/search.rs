//! Singularity search: grid-seeded 2-D Newton for equilibria of the smooth
//! pieces, marching-cell tracing of the switching curve, and 1-D root
//! finding along it for tangential points, pseudo-equilibria, and boundary
//! equilibria.

use crate::defaults;
use crate::error::{Error, Result};
use crate::field::{PlanarFilippovField, Singularity, SingularityKind, VectorField};
use crate::geom::{vec2, Rect, Vec2};

#[derive(Debug, Clone, Copy)]
pub struct SearchParams {
    /// Cells per axis; at least 8.
    pub grid_n: usize,
    /// Residual tolerance for reported roots.
    pub tol: f64,
    /// Tolerance for Lie-derivative signs and for deciding whether a point
    /// lies on the switching set.
    pub class_tol: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            grid_n: defaults::GRID_N,
            tol: defaults::RESIDUAL_TOL,
            class_tol: defaults::CLASS_TOL,
        }
    }
}

/// Locate all singularities of `z` inside `bounds`, deduplicated; roots
/// closer than `10 * tol` are merged with kind precedence. Seeds whose
/// Newton iterations do not converge are skipped (logged at trace level).
pub fn find_singularities(
    z: &PlanarFilippovField,
    bounds: Rect,
    params: &SearchParams,
) -> Result<Vec<Singularity>> {
    assert!(params.grid_n >= 8, "grid_n must be at least 8");
    assert!(
        bounds.is_inside(&z.domain),
        "search box must lie inside the field domain"
    );

    let mut found: Vec<Singularity> = Vec::new();

    // (i) + (ii): zeros of each smooth piece; the switching value at the
    // root decides between an interior equilibrium, a boundary equilibrium,
    // and a root belonging to the other piece's territory.
    for (field, owner) in [
        (&z.f_plus, SingularityKind::EquilibriumPlus),
        (&z.f_minus, SingularityKind::EquilibriumMinus),
    ] {
        for root in newton_scan(field, bounds, params)? {
            let f_val = z.switch.eval(root)?;
            let kind = if f_val.abs() <= params.class_tol {
                SingularityKind::BoundaryEquilibrium
            } else if f_val > 0.0 && owner == SingularityKind::EquilibriumPlus {
                SingularityKind::EquilibriumPlus
            } else if f_val < 0.0 && owner == SingularityKind::EquilibriumMinus {
                SingularityKind::EquilibriumMinus
            } else {
                continue;
            };
            found.push(Singularity {
                location: root,
                kind,
                index: None,
            });
        }
    }

    // (iii): trace the switching curve and run 1-D root finds along it.
    let polylines = trace_sigma(z, bounds, params.grid_n)?;
    for polyline in &polylines {
        scan_polyline(z, polyline, params, &mut found)?;
    }

    Ok(merge_singularities(found, 10.0 * params.tol))
}

// ---------------------------------------------------------------------------
// Newton scan
// ---------------------------------------------------------------------------

fn newton_scan(field: &VectorField, bounds: Rect, params: &SearchParams) -> Result<Vec<Vec2>> {
    let n = params.grid_n;
    let dx = bounds.width() / n as f64;
    let dy = bounds.height() / n as f64;
    // Iterates may wander slightly outside before coming back; only seeds
    // that leave the inflated box are discarded.
    let slack = Rect::new(
        bounds.x0 - dx,
        bounds.y0 - dy,
        bounds.x1 + dx,
        bounds.y1 + dy,
    );
    let mut roots = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let seed = vec2(
                bounds.x0 + (i as f64 + 0.5) * dx,
                bounds.y0 + (j as f64 + 0.5) * dy,
            );
            match newton_2d(field, seed, &slack, params.tol) {
                Ok(Some(root)) if bounds.contains(root) => roots.push(root),
                Ok(_) => {}
                Err(_) => {
                    // Evaluation failure at an iterate: treat like a
                    // non-convergent seed.
                    log::trace!("newton seed at {seed} hit an evaluation error");
                }
            }
        }
    }
    Ok(roots)
}

fn newton_2d(field: &VectorField, seed: Vec2, slack: &Rect, tol: f64) -> Result<Option<Vec2>> {
    let mut p = seed;
    let mut best: Option<(f64, Vec2)> = None;
    for _ in 0..defaults::NEWTON_MAX_ITER {
        if !slack.contains(p) {
            return Ok(None);
        }
        let v = field.eval(p)?;
        let res = v.norm();
        if best.map_or(true, |(b, _)| res < b) {
            best = Some((res, p));
        }
        // Keep polishing past `tol` so duplicate roots from different seeds
        // coincide to machine precision before the merge step.
        let scale = 1.0 + p.norm();
        let jac = field.jacobian(p)?;
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let step = vec2(
            (v.x * jac[1][1] - v.y * jac[0][1]) / det,
            (v.y * jac[0][0] - v.x * jac[1][0]) / det,
        );
        p = p - step;
        if step.norm() <= 1e-15 * scale {
            let v = field.eval(p)?;
            if best.map_or(true, |(b, _)| v.norm() < b) {
                best = Some((v.norm(), p));
            }
            break;
        }
    }
    match best {
        Some((res, root)) if res <= tol => Ok(Some(root)),
        _ => {
            log::trace!("newton seed at {seed} did not converge");
            Ok(None)
        }
    }
}

// ---------------------------------------------------------------------------
// Switching-curve tracing
// ---------------------------------------------------------------------------

/// Trace the zero set of the switching function inside `bounds` as a set of
/// polylines, by bisection on grid-cell edges with a sign change and
/// chaining crossings cell by cell.
pub(crate) fn trace_sigma(
    z: &PlanarFilippovField,
    bounds: Rect,
    grid_n: usize,
) -> Result<Vec<Vec<Vec2>>> {
    let n = grid_n;
    let dx = bounds.width() / n as f64;
    let dy = bounds.height() / n as f64;
    let node = |i: usize, j: usize| vec2(bounds.x0 + i as f64 * dx, bounds.y0 + j as f64 * dy);

    let mut values = vec![vec![0.0f64; n + 1]; n + 1];
    for i in 0..=n {
        for j in 0..=n {
            values[i][j] = z.switch.eval(node(i, j))?;
        }
    }
    // Consistent tie-break: exact zeros count as the negative side.
    let positive = |v: f64| v > 0.0;

    // Edge identifiers: horizontal edge (i, j) spans nodes (i,j)-(i+1,j);
    // vertical edge (i, j) spans nodes (i,j)-(i,j+1).
    #[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
    enum EdgeId {
        H(usize, usize),
        V(usize, usize),
    }

    let mut crossing_points: std::collections::HashMap<EdgeId, Vec2> =
        std::collections::HashMap::new();
    let mut edge_point = |id: EdgeId,
                          a: Vec2,
                          b: Vec2,
                          fa: f64,
                          fb: f64|
     -> Result<Vec2> {
        if let Some(p) = crossing_points.get(&id) {
            return Ok(*p);
        }
        let p = bisect_segment(z, a, b, fa, fb)?;
        crossing_points.insert(id, p);
        Ok(p)
    };

    // Collect per-cell segments between crossing edges.
    let mut segments: Vec<(EdgeId, Vec2, EdgeId, Vec2)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let corners = [
                (node(i, j), values[i][j]),
                (node(i + 1, j), values[i + 1][j]),
                (node(i + 1, j + 1), values[i + 1][j + 1]),
                (node(i, j + 1), values[i][j + 1]),
            ];
            let edges = [
                (EdgeId::H(i, j), 0usize, 1usize),     // bottom
                (EdgeId::V(i + 1, j), 1, 2),           // right
                (EdgeId::H(i, j + 1), 3, 2),           // top
                (EdgeId::V(i, j), 0, 3),               // left
            ];
            let mut crossed: Vec<(EdgeId, Vec2)> = Vec::new();
            for (id, a, b) in edges {
                let (pa, fa) = corners[a];
                let (pb, fb) = corners[b];
                if positive(fa) != positive(fb) {
                    crossed.push((id, edge_point(id, pa, pb, fa, fb)?));
                }
            }
            match crossed.len() {
                0 => {}
                2 => segments.push((crossed[0].0, crossed[0].1, crossed[1].0, crossed[1].1)),
                4 => {
                    // Ambiguous cell: the center sign decides the pairing.
                    let center = vec2(
                        bounds.x0 + (i as f64 + 0.5) * dx,
                        bounds.y0 + (j as f64 + 0.5) * dy,
                    );
                    let center_positive = positive(z.switch.eval(center)?);
                    // crossed is ordered bottom, right, top, left.
                    let pairs: [(usize, usize); 2] = if center_positive == positive(corners[0].1) {
                        [(0, 1), (2, 3)]
                    } else {
                        [(0, 3), (1, 2)]
                    };
                    for (a, b) in pairs {
                        segments.push((crossed[a].0, crossed[a].1, crossed[b].0, crossed[b].1));
                    }
                }
                _ => {
                    return Err(Error::NonTransversalIntersection(format!(
                        "switching curve meets a grid cell near ({}, {}) in an odd pattern",
                        corners[0].0.x, corners[0].0.y
                    )))
                }
            }
        }
    }

    // Chain segments sharing edge crossings into polylines.
    let mut adjacency: std::collections::HashMap<EdgeId, Vec<usize>> =
        std::collections::HashMap::new();
    for (idx, (ea, _, eb, _)) in segments.iter().enumerate() {
        adjacency.entry(*ea).or_default().push(idx);
        adjacency.entry(*eb).or_default().push(idx);
    }

    let point_of = |id: EdgeId| -> Vec2 { crossing_points[&id] };
    let mut used = vec![false; segments.len()];
    let mut polylines: Vec<Vec<Vec2>> = Vec::new();

    // Deterministic start order: open curves first (edges of degree 1),
    // then any remaining loops, in segment order.
    let mut starts: Vec<usize> = Vec::new();
    for (idx, (ea, _, eb, _)) in segments.iter().enumerate() {
        if adjacency[ea].len() == 1 || adjacency[eb].len() == 1 {
            starts.push(idx);
        }
    }
    starts.extend(0..segments.len());

    for start in starts {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (ea, _, eb, _) = segments[start];
        // Begin from a degree-1 end when there is one.
        let (tail_edge, head_edge) = if adjacency[&ea].len() == 1 {
            (eb, ea)
        } else {
            (ea, eb)
        };
        let mut polyline = vec![point_of(head_edge), point_of(tail_edge)];
        let mut current_edge = tail_edge;
        loop {
            let next_seg = adjacency[&current_edge]
                .iter()
                .copied()
                .find(|&s| !used[s]);
            let Some(seg) = next_seg else { break };
            used[seg] = true;
            let (sa, _, sb, _) = segments[seg];
            let next_edge = if sa == current_edge { sb } else { sa };
            polyline.push(point_of(next_edge));
            current_edge = next_edge;
            if current_edge == head_edge {
                break; // closed loop
            }
        }
        if polyline.len() >= 2 {
            polylines.push(polyline);
        }
    }

    Ok(polylines)
}

/// Bisection for the switching zero on the segment `[a, b]`, polished by a
/// few gradient-direction Newton steps.
fn bisect_segment(z: &PlanarFilippovField, a: Vec2, b: Vec2, fa: f64, fb: f64) -> Result<Vec2> {
    let mut lo = a;
    let mut hi = b;
    let mut flo = fa;
    let _ = fb;
    for _ in 0..defaults::BISECT_MAX_ITER {
        let mid = (lo + hi) * 0.5;
        let fm = z.switch.eval(mid)?;
        if fm == 0.0 {
            return project_to_sigma(z, mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo).norm() <= 1e-15 * (1.0 + lo.norm()) {
            break;
        }
    }
    project_to_sigma(z, (lo + hi) * 0.5)
}

/// Newton along the switching gradient, landing on the zero level to
/// machine precision. Degenerate gradients on the traced curve are hard
/// errors: 0 must be a regular value.
pub(crate) fn project_to_sigma(z: &PlanarFilippovField, start: Vec2) -> Result<Vec2> {
    let mut p = start;
    for _ in 0..30 {
        let jet = z.switch.jet(p)?;
        let grad = vec2(jet.dx, jet.dy);
        let g2 = grad.norm_sq();
        if g2.sqrt() <= defaults::GRAD_MIN {
            return Err(Error::DegenerateSwitch(p.x, p.y, g2.sqrt()));
        }
        if jet.value.abs() <= 1e-15 * (1.0 + grad.norm()) {
            return Ok(p);
        }
        p = p - grad * (jet.value / g2);
    }
    Ok(p)
}

// ---------------------------------------------------------------------------
// Root finding along the traced curve
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
struct SigmaSample {
    p: Vec2,
    lie_plus: f64,
    lie_minus: f64,
    f_plus: Vec2,
    f_minus: Vec2,
    /// Unit tangent aligned with the traversal direction.
    tangent: Vec2,
}

fn sample_sigma(z: &PlanarFilippovField, p: Vec2, direction: Vec2) -> Result<SigmaSample> {
    let grad = z.switch_gradient(p)?;
    let mut tangent = grad.perp() * (1.0 / grad.norm());
    if tangent.dot(direction) < 0.0 {
        tangent = -tangent;
    }
    let f_plus = z.f_plus.eval(p)?;
    let f_minus = z.f_minus.eval(p)?;
    Ok(SigmaSample {
        p,
        lie_plus: grad.dot(f_plus),
        lie_minus: grad.dot(f_minus),
        f_plus,
        f_minus,
        tangent,
    })
}

fn scan_polyline(
    z: &PlanarFilippovField,
    polyline: &[Vec2],
    params: &SearchParams,
    found: &mut Vec<Singularity>,
) -> Result<()> {
    const SUBSTEPS: usize = 4;

    // Refined sample points along the curve.
    let mut samples: Vec<SigmaSample> = Vec::new();
    for window in polyline.windows(2) {
        let (a, b) = (window[0], window[1]);
        let direction = b - a;
        let start = if samples.is_empty() { 0 } else { 1 };
        for k in start..=SUBSTEPS {
            let t = k as f64 / SUBSTEPS as f64;
            let q = project_to_sigma(z, a + direction * t)?;
            samples.push(sample_sigma(z, q, direction)?);
        }
    }
    if samples.len() < 2 {
        return Ok(());
    }

    for pair in samples.windows(2) {
        let (s0, s1) = (pair[0], pair[1]);
        let direction = s1.p - s0.p;

        // Tangential singularities: zeros of the Lie derivatives.
        for pick in [PickLie::Plus, PickLie::Minus] {
            let h0 = pick.value(&s0);
            let h1 = pick.value(&s1);
            if h0 == 0.0 || h0.signum() != h1.signum() {
                if let Some(point) =
                    bisect_on_sigma(z, s0.p, s1.p, direction, params, |s| pick.value(s))?
                {
                    found.push(Singularity {
                        location: point,
                        kind: SingularityKind::Tangential,
                        index: None,
                    });
                }
            }
        }

        // Pseudo-equilibria: zeros of the tangential sliding component on
        // segments that stay inside the sliding/escaping region.
        let sliding0 = s0.lie_plus * s0.lie_minus < 0.0;
        let sliding1 = s1.lie_plus * s1.lie_minus < 0.0;
        if sliding0 && sliding1 {
            let tau = |s: &SigmaSample| -> f64 {
                let denom = s.lie_minus - s.lie_plus;
                let zs = (s.f_plus * s.lie_minus - s.f_minus * s.lie_plus) * (1.0 / denom);
                zs.dot(s.tangent)
            };
            let t0 = tau(&s0);
            let t1 = tau(&s1);
            if t0 == 0.0 || t0.signum() != t1.signum() {
                if let Some(point) = bisect_on_sigma(z, s0.p, s1.p, direction, params, |s| tau(s))?
                {
                    // Residual gate: the sliding vector itself must vanish
                    // and the point must still be strictly sliding/escaping.
                    let s = sample_sigma(z, point, direction)?;
                    if s.lie_plus * s.lie_minus < 0.0 {
                        found.push(Singularity {
                            location: point,
                            kind: SingularityKind::PseudoEquilibrium,
                            index: None,
                        });
                    }
                }
            }
        }

        // Boundary equilibria: simultaneous zeros of a piece restricted to
        // the curve, detected through sign changes of either component.
        for pick in [
            PickComp::PlusX,
            PickComp::PlusY,
            PickComp::MinusX,
            PickComp::MinusY,
        ] {
            let h0 = pick.value(&s0);
            let h1 = pick.value(&s1);
            if h0 == 0.0 || h0.signum() != h1.signum() {
                if let Some(point) =
                    bisect_on_sigma(z, s0.p, s1.p, direction, params, |s| pick.value(s))?
                {
                    let norm = match pick {
                        PickComp::PlusX | PickComp::PlusY => z.f_plus.eval(point)?.norm(),
                        PickComp::MinusX | PickComp::MinusY => z.f_minus.eval(point)?.norm(),
                    };
                    if norm <= params.tol {
                        found.push(Singularity {
                            location: point,
                            kind: SingularityKind::BoundaryEquilibrium,
                            index: None,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum PickLie {
    Plus,
    Minus,
}

impl PickLie {
    fn value(self, s: &SigmaSample) -> f64 {
        match self {
            PickLie::Plus => s.lie_plus,
            PickLie::Minus => s.lie_minus,
        }
    }
}

#[derive(Clone, Copy)]
enum PickComp {
    PlusX,
    PlusY,
    MinusX,
    MinusY,
}

impl PickComp {
    fn value(self, s: &SigmaSample) -> f64 {
        match self {
            PickComp::PlusX => s.f_plus.x,
            PickComp::PlusY => s.f_plus.y,
            PickComp::MinusX => s.f_minus.x,
            PickComp::MinusY => s.f_minus.y,
        }
    }
}

/// Bisection of a scalar function along the projected curve between two
/// on-curve points. Returns the root point when the residual meets `tol`.
fn bisect_on_sigma(
    z: &PlanarFilippovField,
    a: Vec2,
    b: Vec2,
    direction: Vec2,
    params: &SearchParams,
    h: impl Fn(&SigmaSample) -> f64,
) -> Result<Option<Vec2>> {
    let eval_at = |t: f64| -> Result<(Vec2, f64)> {
        let q = project_to_sigma(z, a + (b - a) * t)?;
        let s = sample_sigma(z, q, direction)?;
        Ok((q, h(&s)))
    };
    let (qlo, mut hlo) = eval_at(0.0)?;
    let (qhi, hhi) = eval_at(1.0)?;
    if hlo == 0.0 {
        return Ok(Some(qlo));
    }
    if hhi == 0.0 {
        return Ok(Some(qhi));
    }
    if hlo.signum() == hhi.signum() {
        return Ok(None);
    }
    let (mut tlo, mut thi) = (0.0f64, 1.0f64);
    let mut best = if hlo.abs() <= hhi.abs() {
        (hlo.abs(), qlo)
    } else {
        (hhi.abs(), qhi)
    };
    for _ in 0..defaults::BISECT_MAX_ITER {
        let tm = 0.5 * (tlo + thi);
        let (q, hm) = eval_at(tm)?;
        if hm.abs() < best.0 {
            best = (hm.abs(), q);
        }
        if hm == 0.0 {
            break;
        }
        if hm.signum() == hlo.signum() {
            tlo = tm;
            hlo = hm;
        } else {
            thi = tm;
        }
        if thi - tlo <= 1e-16 {
            break;
        }
    }
    if best.0 <= params.tol {
        Ok(Some(best.1))
    } else {
        Ok(None)
    }
}

// ---------------------------------------------------------------------------
// Merging
// ---------------------------------------------------------------------------

fn kind_rank(kind: SingularityKind) -> u8 {
    match kind {
        SingularityKind::BoundaryEquilibrium => 0,
        SingularityKind::EquilibriumPlus => 1,
        SingularityKind::EquilibriumMinus => 2,
        SingularityKind::PseudoEquilibrium => 3,
        SingularityKind::Tangential => 4,
    }
}

/// Sort by coordinates and collapse clusters closer than `radius`,
/// keeping the strongest kind; deterministic regardless of discovery order.
fn merge_singularities(mut items: Vec<Singularity>, radius: f64) -> Vec<Singularity> {
    items.sort_by(|a, b| {
        (a.location.x, a.location.y, kind_rank(a.kind))
            .partial_cmp(&(b.location.x, b.location.y, kind_rank(b.kind)))
            .expect("finite coordinates")
    });
    let mut merged: Vec<Singularity> = Vec::new();
    let mut consumed = vec![false; items.len()];
    for i in 0..items.len() {
        if consumed[i] {
            continue;
        }
        let mut representative = items[i];
        consumed[i] = true;
        for j in (i + 1)..items.len() {
            if consumed[j] {
                continue;
            }
            if items[j].location.dist(representative.location) <= radius {
                consumed[j] = true;
                if kind_rank(items[j].kind) < kind_rank(representative.kind) {
                    representative.kind = items[j].kind;
                    representative.location = items[j].location;
                }
            }
        }
        merged.push(representative);
    }
    merged
}
