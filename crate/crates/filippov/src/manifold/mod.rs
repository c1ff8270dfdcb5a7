//! Filippov fields on compact surfaces, represented as an atlas of charts
//! carrying planar fields, with cross-chart consistency probes,
//! per-singularity indices computed in chart coordinates, and the
//! index-sum check against the declared Euler characteristic.

pub mod builtin;

use crate::defaults;
use crate::error::{Error, Result};
use crate::field::{
    find_singularities, PlanarFilippovField, PlanarMap, ScalarField, SearchParams, Singularity,
    SingularityKind, VectorField,
};
use crate::geom::{vec2, Rect, Vec2};
use crate::winding::index_at_point;

/// One chart of the atlas. `map_in` sends chart coordinates to the
/// designated reference coordinates; `map_out` is its inverse. The chart
/// region is the rectangle, optionally intersected with
/// `{predicate >= 0}`.
#[derive(Debug, Clone)]
pub struct Chart {
    pub name: String,
    pub map_in: PlanarMap,
    pub map_out: PlanarMap,
    pub domain: Rect,
    pub predicate: Option<ScalarField>,
}

impl Chart {
    /// Whether the chart-coordinate point lies in the chart region.
    pub fn contains(&self, p: Vec2) -> Result<bool> {
        if !self.domain.contains(p) {
            return Ok(false);
        }
        match &self.predicate {
            Some(pred) => Ok(pred.eval(p)? >= 0.0),
            None => Ok(true),
        }
    }

    /// Distance from `p` to the chart region boundary: the rectangle
    /// distance, reduced by a ray scan of the predicate when present.
    pub fn interior_margin(&self, p: Vec2) -> Result<f64> {
        let mut margin = self.domain.boundary_distance(p);
        let Some(pred) = &self.predicate else {
            return Ok(margin.max(0.0));
        };
        if pred.eval(p)? < 0.0 {
            return Ok(0.0);
        }
        const RAYS: usize = 16;
        const STEPS: usize = 64;
        for ray in 0..RAYS {
            let angle = std::f64::consts::TAU * (ray as f64 / RAYS as f64);
            let dir = vec2(angle.cos(), angle.sin());
            let mut prev_t = 0.0f64;
            for step in 1..=STEPS {
                let t = margin * (step as f64 / STEPS as f64);
                if pred.eval(p + dir * t)? < 0.0 {
                    // Bisect the first crossing along this ray.
                    let (mut lo, mut hi) = (prev_t, t);
                    for _ in 0..30 {
                        let mid = 0.5 * (lo + hi);
                        if pred.eval(p + dir * mid)? < 0.0 {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    margin = margin.min(lo);
                    break;
                }
                prev_t = t;
            }
        }
        Ok(margin.max(0.0))
    }

    pub fn diameter(&self) -> f64 {
        self.domain.diagonal()
    }
}

/// Declared overlap between two charts, with probe points given in the
/// first chart's coordinates.
#[derive(Debug, Clone)]
pub struct OverlapProbe {
    pub chart_a: String,
    pub chart_b: String,
    pub samples: Vec<Vec2>,
}

/// A Filippov field on a compact surface: one planar field per chart, the
/// declared Euler characteristic, overlap probes, and (for quotient
/// surfaces such as the flat torus) the periods identifying reference
/// coordinates.
#[derive(Debug, Clone)]
pub struct ManifoldField {
    pub charts: Vec<Chart>,
    pub fields: Vec<PlanarFilippovField>,
    pub euler_characteristic: i64,
    pub overlaps: Vec<OverlapProbe>,
    pub periods: Option<(f64, f64)>,
}

/// A deduplicated manifold singularity with its index.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ManifoldSingularity {
    /// Chart in which the index was computed.
    pub chart: String,
    /// Coordinates in that chart.
    pub location: Vec2,
    pub kind: SingularityKind,
    pub index: i64,
    /// All charts in which the point was found, sorted.
    pub charts_seen: Vec<String>,
}

#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PoincareHopfReport {
    pub singularities: Vec<ManifoldSingularity>,
    pub sum: i64,
    pub chi: i64,
    /// Seam-coverage notes; a nonempty list makes the report inconclusive.
    pub inconclusive: Vec<String>,
    pub pass: bool,
}

impl PoincareHopfReport {
    pub fn summary_line(&self) -> String {
        format!(
            "sum={} chi={} {}",
            self.sum,
            self.chi,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Push a planar Filippov field forward through the diffeomorphism with
/// the given coordinate maps. The map pair is probed for regularity
/// (Jacobian bounded away from zero, inverse really inverts) on a grid
/// over the domain; the new domain is the bounding box of the mapped one.
pub fn pushforward(
    field: &PlanarFilippovField,
    forward: PlanarMap,
    inverse: PlanarMap,
) -> Result<PlanarFilippovField> {
    let map = crate::field::Diffeo::new(forward, inverse);
    let d = field.domain;
    const PROBE_N: usize = 8;
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for i in 0..=PROBE_N {
        for j in 0..=PROBE_N {
            let p = vec2(
                d.x0 + d.width() * (i as f64 / PROBE_N as f64),
                d.y0 + d.height() * (j as f64 / PROBE_N as f64),
            );
            map.probe(p, defaults::CHART_ROUNDTRIP_TOL)?;
            let q = map.forward.eval(p)?;
            x_min = x_min.min(q.x);
            x_max = x_max.max(q.x);
            y_min = y_min.min(q.y);
            y_max = y_max.max(q.y);
        }
    }
    let inverse_map = map.inverse.clone();
    Ok(PlanarFilippovField {
        f_plus: field.f_plus.clone().pushforward(map.clone()),
        f_minus: field.f_minus.clone().pushforward(map),
        switch: field.switch.clone().compose_with(inverse_map),
        domain: Rect::new(x_min, y_min, x_max, y_max),
    })
}

impl ManifoldField {
    pub fn chart_index(&self, name: &str) -> Result<usize> {
        self.charts
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::UnknownChart(name.to_string()))
    }

    /// Coordinate change from one chart to another, through the reference
    /// coordinates (wrapped when the surface is periodic).
    pub fn transition(&self, from: usize, to: usize) -> PlanarMap {
        let mut chain = vec![self.charts[from].map_in.clone()];
        if let Some((px, py)) = self.periods {
            chain.push(PlanarMap::Wrap {
                period_x: px,
                period_y: py,
            });
        }
        chain.push(self.charts[to].map_out.clone());
        if let Some((px, py)) = self.periods {
            chain.push(PlanarMap::Wrap {
                period_x: px,
                period_y: py,
            });
        }
        PlanarMap::Chain(chain)
    }

    pub fn transition_diffeo(&self, from: usize, to: usize) -> crate::field::Diffeo {
        crate::field::Diffeo::new(self.transition(from, to), self.transition(to, from))
    }

    /// Validate the atlas: each chart's map pair must round-trip to the
    /// identity on its domain, and on the declared overlap probes the
    /// transitions must be regular and mutually inverse, the switching
    /// sets must agree, and the pushforward of one chart's field must
    /// match the other's.
    pub fn validate(&self) -> Result<()> {
        for chart in &self.charts {
            const N: usize = 5;
            let d = chart.domain;
            for i in 0..=N {
                for j in 0..=N {
                    let p = vec2(
                        d.x0 + d.width() * (i as f64 / N as f64),
                        d.y0 + d.height() * (j as f64 / N as f64),
                    );
                    if !chart.contains(p)? {
                        continue;
                    }
                    // Points where the reference image is undefined (e.g.
                    // the pole opposite a stereographic chart) are skipped;
                    // the invariant applies wherever the maps evaluate.
                    let Ok(reference) = chart.map_in.eval(p) else {
                        continue;
                    };
                    let Ok(back) = chart.map_out.eval(reference) else {
                        continue;
                    };
                    // Periodic surfaces identify reference coordinates
                    // modulo the periods.
                    let back = match self.periods {
                        Some((px, py)) => {
                            let wrap = |v: f64, period: f64| {
                                let mut w = (v + period / 2.0).rem_euclid(period) - period / 2.0;
                                if w >= period / 2.0 {
                                    w -= period;
                                }
                                w
                            };
                            vec2(wrap(back.x - p.x, px) + p.x, wrap(back.y - p.y, py) + p.y)
                        }
                        None => back,
                    };
                    let err = back.dist(p);
                    if err > defaults::CHART_ROUNDTRIP_TOL * (1.0 + p.norm()) {
                        return Err(Error::MapsNotInverse(p.x, p.y, err));
                    }
                }
            }
        }
        for probe in &self.overlaps {
            let a = self.chart_index(&probe.chart_a)?;
            let b = self.chart_index(&probe.chart_b)?;
            let t_ab = self.transition_diffeo(a, b);
            let field_a = &self.fields[a];
            let field_b = &self.fields[b];
            for &p in &probe.samples {
                t_ab.probe(p, defaults::CHART_ROUNDTRIP_TOL)?;
                let (q, jac) = t_ab.forward.eval_with_jacobian(p)?;

                // Switching sets coincide: a sample is on the zero set in
                // one chart exactly when it is in the other. The sign
                // labels of the two sides may legitimately swap between
                // charts, so signs themselves are not compared.
                let fa = field_a.switch.eval(p)?;
                let fb = field_b.switch.eval(q)?;
                let on_a = fa.abs() <= defaults::CLASS_TOL;
                let on_b = fb.abs() <= defaults::CLASS_TOL;
                if on_a != on_b {
                    return Err(Error::OverlapMismatch(
                        probe.chart_a.clone(),
                        probe.chart_b.clone(),
                        p.x,
                        p.y,
                        (fa - fb).abs(),
                    ));
                }

                // Field consistency, comparing the governing piece values
                // through the transition Jacobian (skip points on the set,
                // where the governing piece is ambiguous).
                if on_a {
                    continue;
                }
                let va = if fa > 0.0 {
                    field_a.f_plus.eval(p)?
                } else {
                    field_a.f_minus.eval(p)?
                };
                let vb = if fb > 0.0 {
                    field_b.f_plus.eval(q)?
                } else {
                    field_b.f_minus.eval(q)?
                };
                let pushed = vec2(
                    jac[0][0] * va.x + jac[0][1] * va.y,
                    jac[1][0] * va.x + jac[1][1] * va.y,
                );
                let diff = (pushed - vb).norm();
                if diff > defaults::OVERLAP_TOL * (1.0 + vb.norm()) {
                    return Err(Error::OverlapMismatch(
                        probe.chart_a.clone(),
                        probe.chart_b.clone(),
                        p.x,
                        p.y,
                        diff,
                    ));
                }
            }
        }
        Ok(())
    }

    /// Whether chart-`a` point `p` and chart-`b` point `q` describe the
    /// same manifold point, compared through the chart transitions within
    /// the dedup tolerance.
    pub fn same_point(&self, a: usize, p: Vec2, b: usize, q: Vec2) -> bool {
        if a == b {
            return p.dist(q) <= defaults::CHART_DEDUP_TOL;
        }
        if let Ok(mapped) = self.transition(a, b).eval(p) {
            if mapped.x.is_finite() && mapped.y.is_finite() && mapped.dist(q) <= defaults::CHART_DEDUP_TOL
            {
                return true;
            }
        }
        if let Ok(mapped) = self.transition(b, a).eval(q) {
            if mapped.x.is_finite() && mapped.y.is_finite() && mapped.dist(p) <= defaults::CHART_DEDUP_TOL
            {
                return true;
            }
        }
        false
    }

    /// Index of a singularity given in a chart's coordinates, computed in
    /// the best-margin chart containing it and verified against the
    /// second-best when the point is visible there too.
    pub fn index_at_singularity(
        &self,
        chart_name: &str,
        s: &Singularity,
        grid_n: usize,
    ) -> Result<i64> {
        let report = self.poincare_hopf_check(grid_n)?;
        let home = self.chart_index(chart_name)?;
        for record in &report.singularities {
            let rec_chart = self.chart_index(&record.chart)?;
            if self.same_point(home, s.location, rec_chart, record.location) {
                return Ok(record.index);
            }
        }
        Err(Error::NotIsolated(s.location.x, s.location.y))
    }

    /// Locate all singularities chart by chart, deduplicate them across
    /// charts, compute each index (asserting cross-chart agreement when a
    /// point is visible in two charts), and compare the sum with the
    /// declared Euler characteristic.
    pub fn poincare_hopf_check(&self, grid_n: usize) -> Result<PoincareHopfReport> {
        self.validate()?;
        let params = SearchParams {
            grid_n,
            ..Default::default()
        };

        // Collect raw findings per chart, filtered to the chart region.
        let mut findings: Vec<(usize, Singularity)> = Vec::new();
        for (idx, field) in self.fields.iter().enumerate() {
            let chart = &self.charts[idx];
            for s in find_singularities(field, field.domain, &params)? {
                if chart.contains(s.location)? {
                    findings.push((idx, s));
                }
            }
        }

        // Group findings describing the same manifold point.
        let mut group_of: Vec<usize> = (0..findings.len()).collect();
        for i in 0..findings.len() {
            for j in (i + 1)..findings.len() {
                if group_of[j] != j {
                    continue;
                }
                let (ci, si) = &findings[i];
                let (cj, sj) = &findings[j];
                if self.same_point(*ci, si.location, *cj, sj.location) {
                    group_of[j] = group_of[i];
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for root in 0..findings.len() {
            if group_of[root] == root {
                let members: Vec<usize> = (0..findings.len())
                    .filter(|&k| group_of[k] == root)
                    .collect();
                groups.push(members);
            }
        }
        // Deterministic report order: by the first member's chart and
        // coordinates.
        groups.sort_by(|a, b| {
            let (ca, sa) = &findings[a[0]];
            let (cb, sb) = &findings[b[0]];
            (ca, sa.location.x, sa.location.y)
                .partial_cmp(&(cb, sb.location.x, sb.location.y))
                .expect("finite coordinates")
        });

        let mut inconclusive = Vec::new();
        let mut records = Vec::new();
        for members in &groups {
            // Rank member charts by interior margin.
            let mut ranked: Vec<(f64, usize)> = Vec::new();
            for &m in members {
                let (chart_idx, s) = &findings[m];
                let margin = self.charts[*chart_idx].interior_margin(s.location)?;
                ranked.push((margin, m));
            }
            ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite margins"));
            let (best_margin, best_member) = ranked[0];
            let (best_chart, best_sing) = &findings[best_member];
            let seam_floor = 0.05 * self.charts[*best_chart].diameter();
            if best_margin < seam_floor {
                inconclusive.push(format!(
                    "singularity at {} in chart `{}` sits within {best_margin:.3e} of every chart seam",
                    best_sing.location, self.charts[*best_chart].name
                ));
                continue;
            }

            let index = self.index_in_chart(*best_chart, best_sing, best_margin, &groups, &findings)?;

            // Cross-chart agreement whenever a second chart sees the point
            // comfortably.
            if let Some(&(second_margin, second_member)) = ranked.get(1) {
                let (second_chart, second_sing) = &findings[second_member];
                if *second_chart != *best_chart && second_margin >= seam_floor {
                    let other =
                        self.index_in_chart(*second_chart, second_sing, second_margin, &groups, &findings)?;
                    if other != index {
                        return Err(Error::ChartDisagreement(
                            self.charts[*best_chart].name.clone(),
                            self.charts[*second_chart].name.clone(),
                            index,
                            other,
                        ));
                    }
                }
            }

            let mut charts_seen: Vec<String> = members
                .iter()
                .map(|&m| self.charts[findings[m].0].name.clone())
                .collect();
            charts_seen.sort();
            charts_seen.dedup();
            records.push(ManifoldSingularity {
                chart: self.charts[*best_chart].name.clone(),
                location: best_sing.location,
                kind: best_sing.kind,
                index,
                charts_seen,
            });
        }

        let sum: i64 = records.iter().map(|r| r.index).sum();
        let pass = sum == self.euler_characteristic && inconclusive.is_empty();
        Ok(PoincareHopfReport {
            singularities: records,
            sum,
            chi: self.euler_characteristic,
            inconclusive,
            pass,
        })
    }

    /// Ball index of a grouped singularity inside one chart, isolating it
    /// from every other group mapped into that chart.
    fn index_in_chart(
        &self,
        chart_idx: usize,
        s: &Singularity,
        margin: f64,
        groups: &[Vec<usize>],
        findings: &[(usize, Singularity)],
    ) -> Result<i64> {
        let mut nearest = f64::INFINITY;
        for other in groups {
            for &m in other {
                let (oc, os) = &findings[m];
                if self.same_point(*oc, os.location, chart_idx, s.location) {
                    continue;
                }
                let in_chart = if *oc == chart_idx {
                    Some(os.location)
                } else {
                    match self.transition(*oc, chart_idx).eval(os.location) {
                        Ok(q) if q.x.is_finite() && q.y.is_finite() => Some(q),
                        _ => None,
                    }
                };
                if let Some(q) = in_chart {
                    nearest = nearest.min(q.dist(s.location));
                }
            }
        }
        if nearest <= defaults::MERGE_FACTOR * defaults::RESIDUAL_TOL {
            return Err(Error::NonIsolatedSingularity(
                s.location.x,
                s.location.y,
                s.location.x + nearest,
                s.location.y,
            ));
        }
        let radius = (0.5 * nearest).min(0.99 * margin);
        if !radius.is_finite() || radius <= 100.0 * defaults::RESIDUAL_TOL {
            return Err(Error::SingularityTooCloseToChartBoundary(
                s.location.x,
                s.location.y,
                self.charts[chart_idx].name.clone(),
            ));
        }
        index_at_point(&self.fields[chart_idx], s.location, radius)
    }
}

/// Convenience: field equality probe used by pushforward tests.
pub fn fields_agree_at(
    a: &VectorField,
    b: &VectorField,
    points: &[Vec2],
    tol: f64,
) -> Result<bool> {
    for &p in points {
        let va = a.eval(p)?;
        let vb = b.eval(p)?;
        if (va - vb).norm() > tol * (1.0 + vb.norm()) {
            return Ok(false);
        }
    }
    Ok(true)
}
