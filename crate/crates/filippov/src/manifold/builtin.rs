//! Built-in surfaces: the sphere with two stereographic charts and the
//! flat torus with four translated square charts.
//!
//! Sphere charts use the involutive transition `(x, y) -> (x, y) / (x^2 +
//! y^2)` between the two stereographic projections; each chart is the disk
//! of radius 2 (overlap annulus 1/2 <= r <= 2), the equator is the unit
//! circle of both charts. Torus charts are the four unit-half translates
//! of a square of side 0.7, with reference coordinates identified modulo
//! 1 in each axis.

use crate::expr::{ScalarExpr, VectorFieldExpr};
use crate::field::{PlanarFilippovField, PlanarMap, ScalarField, VectorField};
use crate::geom::{vec2, Rect, Vec2};
use crate::manifold::{Chart, ManifoldField, OverlapProbe};

fn x() -> ScalarExpr {
    ScalarExpr::var_x()
}

fn y() -> ScalarExpr {
    ScalarExpr::var_y()
}

fn num(v: f64) -> ScalarExpr {
    ScalarExpr::num(v)
}

/// The sphere carrying a rotation about the polar axis (speed `rotation`
/// plus a latitude-profiled component `profile`) and a meridian drift of
/// strength `drift` toward the pole of each hemisphere. The switching set
/// is the equator; with `drift != 0` it is escaping (or sliding) all
/// around, the only singularities are the two poles, and each has index
/// +1.
pub fn sphere(rotation: f64, profile: f64, drift: f64) -> ManifoldField {
    let disk = Rect::new(-2.0, -2.0, 2.0, 2.0);
    let predicate = || -> ScalarField {
        ScalarField::Expr(num(4.0) - (x() * x() + y() * y()))
    };
    let inversion = || -> PlanarMap {
        let r2 = || x() * x() + y() * y();
        PlanarMap::from_exprs(x() / r2(), y() / r2())
    };
    let identity = PlanarMap::identity;

    let r2 = || x() * x() + y() * y();
    // Angular components: plain rotation has angular speed 1 in both
    // charts; the profiled component has speed r^2/(1+r^2) in the south
    // chart and 1/(1+r^2) in the north chart (the same intrinsic field).
    let south_angular = |coeff_rot: f64, coeff_prof: f64| -> ScalarExpr {
        num(coeff_rot) + num(coeff_prof) * (r2() / (num(1.0) + r2()))
    };
    let north_angular = |coeff_rot: f64, coeff_prof: f64| -> ScalarExpr {
        num(coeff_rot) + num(coeff_prof) / (num(1.0) + r2())
    };
    let field_from = |angular: ScalarExpr, radial: f64| -> VectorField {
        VectorField::Exprs(VectorFieldExpr::new(
            -y() * angular.clone() + num(radial) * x(),
            x() * angular + num(radial) * y(),
        ))
    };

    // South chart: f = r^2 - 1 >= 0 is the northern hemisphere; the
    // northern piece drifts outward (toward the north pole at infinity),
    // the southern piece drifts toward the origin (the south pole).
    let south_field = PlanarFilippovField::new(
        field_from(south_angular(rotation, profile), drift),
        field_from(south_angular(rotation, profile), -drift),
        ScalarField::Expr(r2() - num(1.0)),
        disk,
    );
    // North chart: f = 1 - r^2 >= 0 is the northern hemisphere around the
    // origin (the north pole); drifts mirror accordingly.
    let north_field = PlanarFilippovField::new(
        field_from(north_angular(rotation, profile), -drift),
        field_from(north_angular(rotation, profile), drift),
        ScalarField::Expr(num(1.0) - r2()),
        disk,
    );

    let mut samples = Vec::new();
    for &r in &[0.7, 1.0, 1.3, 1.7] {
        for k in 0..4 {
            let theta = std::f64::consts::TAU * (k as f64 + 0.37) / 4.0;
            samples.push(vec2(r * theta.cos(), r * theta.sin()));
        }
    }

    ManifoldField {
        charts: vec![
            Chart {
                name: "south".to_string(),
                map_in: identity(),
                map_out: identity(),
                domain: disk,
                predicate: Some(predicate()),
            },
            Chart {
                name: "north".to_string(),
                map_in: inversion(),
                map_out: inversion(),
                domain: disk,
                predicate: Some(predicate()),
            },
        ],
        fields: vec![south_field, north_field],
        euler_characteristic: 2,
        overlaps: vec![OverlapProbe {
            chart_a: "south".to_string(),
            chart_b: "north".to_string(),
            samples,
        }],
        periods: None,
    }
}

/// Default sphere scenario: unit rotation, no profile, drift 0.3.
pub fn sphere_default() -> ManifoldField {
    sphere(1.0, 0.0, 0.3)
}

const TORUS_CENTERS: [(f64, f64); 4] = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)];
const TORUS_HALF: f64 = 0.35;

fn torus_chart(name: &str, cx: f64, cy: f64) -> Chart {
    Chart {
        name: name.to_string(),
        map_in: PlanarMap::from_exprs(x() + num(cx), y() + num(cy)),
        map_out: PlanarMap::from_exprs(x() - num(cx), y() - num(cy)),
        domain: Rect::new(-TORUS_HALF, -TORUS_HALF, TORUS_HALF, TORUS_HALF),
        predicate: None,
    }
}

fn torus_overlaps() -> Vec<OverlapProbe> {
    let names = ["c00", "c10", "c01", "c11"];
    let mut probes = Vec::new();
    for a in 0..4 {
        for b in (a + 1)..4 {
            // Sample points in chart-a coordinates that land inside
            // chart b's square (possibly through the periodic wrap).
            let mut samples: Vec<Vec2> = Vec::new();
            let candidates = [
                vec2(0.2, 0.2),
                vec2(0.25, -0.2),
                vec2(-0.2, 0.25),
                vec2(-0.25, -0.25),
                vec2(0.3, 0.0),
                vec2(0.0, 0.3),
                vec2(-0.3, 0.0),
                vec2(0.0, -0.3),
                vec2(0.2, 0.25),
            ];
            let (ax, ay) = TORUS_CENTERS[a];
            let (bx, by) = TORUS_CENTERS[b];
            for &p in &candidates {
                let global = vec2(p.x + ax, p.y + ay);
                let wrap = |v: f64| {
                    let mut w = (v + 0.5).rem_euclid(1.0) - 0.5;
                    if w >= 0.5 {
                        w -= 1.0;
                    }
                    w
                };
                let q = vec2(wrap(global.x - bx), wrap(global.y - by));
                if q.x.abs() <= TORUS_HALF && q.y.abs() <= TORUS_HALF {
                    samples.push(p);
                }
            }
            if !samples.is_empty() {
                probes.push(OverlapProbe {
                    chart_a: names[a].to_string(),
                    chart_b: names[b].to_string(),
                    samples,
                });
            }
        }
    }
    probes
}

/// Flat torus atlas around two given band fields. `band_zero` is the field
/// on the band of global `y` in `(-1/4, 1/4)`, `band_half` on the band
/// around `y = 1/2`; each is produced in chart-local coordinates for a
/// chart centered at the given global offset. The switching set is the
/// pair of circles `y = +-1/4`, appearing as `0.0625 - y^2 = 0` in every
/// chart.
pub fn flat_torus(
    chi_fields: impl Fn(f64, f64) -> (VectorFieldExpr, VectorFieldExpr),
) -> ManifoldField {
    let names = ["c00", "c10", "c01", "c11"];
    let mut charts = Vec::new();
    let mut fields = Vec::new();
    for (idx, (cx, cy)) in TORUS_CENTERS.iter().enumerate() {
        charts.push(torus_chart(names[idx], *cx, *cy));
        let (band_zero, band_half) = chi_fields(*cx, *cy);
        let switch = ScalarField::Expr(num(0.0625) - y() * y());
        // Charts centered on a band see that band as {f >= 0}.
        let (f_plus, f_minus) = if *cy == 0.0 {
            (band_zero, band_half)
        } else {
            (band_half, band_zero)
        };
        fields.push(PlanarFilippovField::new(
            VectorField::Exprs(f_plus),
            VectorField::Exprs(f_minus),
            switch,
            Rect::new(-TORUS_HALF, -TORUS_HALF, TORUS_HALF, TORUS_HALF),
        ));
    }
    ManifoldField {
        charts,
        fields,
        euler_characteristic: 0,
        overlaps: torus_overlaps(),
        periods: Some((1.0, 1.0)),
    }
}

/// Flat torus carrying one constant field per band, crossing the switching
/// circles everywhere: no singularities at all, matching chi = 0.
pub fn torus_constant() -> ManifoldField {
    flat_torus(|_cx, _cy| {
        (
            VectorFieldExpr::parse("2", "1").expect("static expressions"),
            VectorFieldExpr::parse("1", "1").expect("static expressions"),
        )
    })
}

/// Flat torus with a saddle/node pair in the `y = 0` band and a pair of
/// pseudo-equilibria on the escaping circle `y = 1/4`; indices sum to 0.
pub fn torus_mixed() -> ManifoldField {
    flat_torus(|cx, cy| {
        let tau = std::f64::consts::TAU;
        let band_zero = VectorFieldExpr::parse(
            &format!("sin({tau}*(x + {cx} - 0.25))"),
            &format!("-sin({tau}*(y + {cy}))/{tau}"),
        )
        .expect("static expressions");
        let band_half = VectorFieldExpr::parse("1", "0.2").expect("static expressions");
        (band_zero, band_half)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SingularityKind;

    #[test]
    fn sphere_atlas_is_consistent() {
        sphere_default().validate().unwrap();
        sphere(0.9, 0.25, -0.3).validate().unwrap();
    }

    #[test]
    fn torus_atlases_are_consistent() {
        torus_constant().validate().unwrap();
        torus_mixed().validate().unwrap();
    }

    #[test]
    fn sphere_poles_sum_to_two() {
        let report = sphere_default().poincare_hopf_check(32).unwrap();
        assert_eq!(report.sum, 2, "{report:?}");
        assert!(report.pass);
        assert_eq!(report.singularities.len(), 2);
        for s in &report.singularities {
            assert_eq!(s.index, 1);
            assert!(s.location.norm() < 1e-7);
        }
        let charts: Vec<&str> = report
            .singularities
            .iter()
            .map(|s| s.chart.as_str())
            .collect();
        assert!(charts.contains(&"south") && charts.contains(&"north"));
    }

    #[test]
    fn pole_index_queried_through_a_chart() {
        use crate::field::Singularity;
        use crate::geom::vec2;
        let mf = sphere_default();
        let pole = Singularity {
            location: vec2(0.0, 0.0),
            kind: SingularityKind::EquilibriumPlus,
            index: None,
        };
        assert_eq!(mf.index_at_singularity("north", &pole, 32).unwrap(), 1);
    }

    #[test]
    fn torus_constant_has_no_singularities() {
        let report = torus_constant().poincare_hopf_check(16).unwrap();
        assert!(report.singularities.is_empty(), "{report:?}");
        assert_eq!(report.sum, 0);
        assert!(report.pass);
    }

    #[test]
    fn torus_mixed_sums_to_zero() {
        let report = torus_mixed().poincare_hopf_check(32).unwrap();
        assert_eq!(report.sum, 0, "{report:?}");
        assert!(report.pass, "{report:?}");
        // saddle + node + two pseudo-equilibria
        assert_eq!(report.singularities.len(), 4, "{report:?}");
        let pseudo = report
            .singularities
            .iter()
            .filter(|s| s.kind == SingularityKind::PseudoEquilibrium)
            .count();
        assert_eq!(pseudo, 2, "{report:?}");
        // The equilibria are each visible in two charts.
        for s in &report.singularities {
            assert!(s.charts_seen.len() >= 2, "{s:?}");
        }
    }
}
