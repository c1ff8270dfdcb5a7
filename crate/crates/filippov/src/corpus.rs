//! Catalog of ready-made planar Filippov fields with admissible boundary
//! circles and, where analytically established, the expected index. The
//! regression and acceptance suites iterate over this corpus; it doubles
//! as a set of usage examples.

use crate::field::PlanarFilippovField;
use crate::geom::{vec2, Rect, Vec2};
use crate::manifold::pushforward;

#[derive(Debug, Clone, Copy)]
pub struct Ball {
    pub center: Vec2,
    pub radius: f64,
    /// Expected ball index when analytically established.
    pub known_index: Option<i64>,
}

fn ball(cx: f64, cy: f64, radius: f64, known_index: Option<i64>) -> Ball {
    Ball {
        center: vec2(cx, cy),
        radius,
        known_index,
    }
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub field: PlanarFilippovField,
    pub balls: Vec<Ball>,
}

fn domain() -> Rect {
    Rect::new(-4.0, -4.0, 4.0, 4.0)
}

fn entry(
    name: &'static str,
    f_plus: (&str, &str),
    f_minus: (&str, &str),
    switch: &str,
    balls: Vec<Ball>,
) -> CorpusEntry {
    CorpusEntry {
        name,
        field: PlanarFilippovField::parse(f_plus, f_minus, switch, domain())
            .expect("corpus expressions are static"),
        balls,
    }
}

/// The standard corpus: smooth classics, sliding-mode singularities of
/// every kind, curved switching sets, and a coordinate-changed field.
pub fn standard_corpus() -> Vec<CorpusEntry> {
    let mut entries = vec![
        entry(
            "smooth_source",
            ("x", "y"),
            ("x", "y"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(1)),
                ball(0.0, 0.0, 0.55, Some(1)),
                ball(0.0, 0.0, 0.3, Some(1)),
                ball(1.5, 1.5, 0.4, Some(0)),
            ],
        ),
        entry(
            "smooth_sink",
            ("-x", "-y"),
            ("-x", "-y"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(1)),
                ball(0.0, 0.0, 0.4, Some(1)),
                ball(0.0, 0.0, 0.15, Some(1)),
                ball(-1.4, 0.0, 0.5, Some(0)),
            ],
        ),
        entry(
            "smooth_saddle",
            ("x", "-y"),
            ("x", "-y"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(-1)),
                ball(0.0, 0.0, 0.6, Some(-1)),
                ball(0.0, 0.0, 0.25, Some(-1)),
                ball(2.0, 1.0, 0.5, Some(0)),
            ],
        ),
        entry(
            "smooth_center",
            ("-y", "x"),
            ("-y", "x"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(1)),
                ball(0.0, 0.0, 0.5, Some(1)),
                ball(0.0, 0.0, 0.2, Some(1)),
            ],
        ),
        entry(
            "smooth_shear_center",
            ("-y", "4*x"),
            ("-y", "4*x"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(1)),
                ball(0.0, 0.0, 0.45, Some(1)),
                ball(0.0, 0.0, 0.2, Some(1)),
            ],
        ),
        entry(
            "smooth_stiff_source",
            ("3*x", "0.5*y"),
            ("3*x", "0.5*y"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(1)),
                ball(0.0, 0.0, 0.5, Some(1)),
                ball(0.0, 0.0, 0.25, Some(1)),
            ],
        ),
        entry(
            "z_squared",
            ("x^2 - y^2", "2*x*y"),
            ("x^2 - y^2", "2*x*y"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(2)),
                ball(0.0, 0.0, 0.6, Some(2)),
                ball(0.0, 0.0, 0.3, Some(2)),
                ball(1.2, 0.8, 0.3, Some(0)),
            ],
        ),
        entry(
            "z_cubed",
            ("x^3 - 3*x*y^2", "3*x^2*y - y^3"),
            ("x^3 - 3*x*y^2", "3*x^2*y - y^3"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(3)),
                ball(0.0, 0.0, 0.5, Some(3)),
                ball(0.0, 0.0, 0.25, Some(3)),
            ],
        ),
        entry(
            "conjugate_z_squared",
            ("x^2 - y^2", "-2*x*y"),
            ("x^2 - y^2", "-2*x*y"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(-2)),
                ball(0.0, 0.0, 0.55, Some(-2)),
                ball(0.0, 0.0, 0.3, Some(-2)),
            ],
        ),
        entry(
            "pseudo_node_unstable",
            ("x", "-1"),
            ("x", "1"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(-1)),
                ball(0.0, 0.0, 0.5, Some(-1)),
                ball(0.0, 0.0, 0.2, Some(-1)),
                ball(0.8, 0.0, 0.3, Some(0)),
            ],
        ),
        entry(
            "pseudo_node_stable",
            ("-x", "-1"),
            ("-x", "1"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(1)),
                ball(0.0, 0.0, 0.45, Some(1)),
                ball(0.0, 0.0, 0.2, Some(1)),
                ball(-1.0, 0.0, 0.4, Some(0)),
            ],
        ),
        entry(
            "escaping_pseudo_node",
            ("x", "1"),
            ("x", "-1"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(1)),
                ball(0.0, 0.0, 0.5, Some(1)),
                ball(0.0, 0.0, 0.25, Some(1)),
                ball(0.9, 0.1, 0.3, Some(0)),
            ],
        ),
        entry(
            "crossing_constants",
            ("1", "1"),
            ("1", "1"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(0)),
                ball(0.3, -0.1, 0.7, Some(0)),
                ball(-1.0, 0.5, 1.2, Some(0)),
            ],
        ),
        entry(
            "crossing_constants_skew",
            ("1", "1"),
            ("2", "1"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(0)),
                ball(0.5, 0.2, 0.8, Some(0)),
                ball(-0.7, 0.0, 0.5, Some(0)),
            ],
        ),
        entry(
            "sliding_no_pseudo",
            ("1", "-1"),
            ("1", "1"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(0)),
                ball(0.4, 0.0, 0.6, Some(0)),
                ball(-0.8, -0.1, 0.5, Some(0)),
            ],
        ),
        // A fold of the upper piece against a transversal lower piece: the
        // blended field never vanishes, so the tangential point has index 0.
        entry(
            "tangential_fold",
            ("1", "x"),
            ("1", "1"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(0)),
                ball(0.0, 0.0, 0.5, Some(0)),
                ball(0.0, 0.0, 0.2, Some(0)),
            ],
        ),
        // Fold-fold whose blend rotates once: zeros of (phi(y/eps), -x).
        entry(
            "fused_focus",
            ("1", "-x"),
            ("-1", "-x"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(1)),
                ball(0.0, 0.0, 0.5, Some(1)),
                ball(0.0, 0.0, 0.25, Some(1)),
            ],
        ),
        entry(
            "boundary_equilibrium_zero_index",
            ("x", "y + x^2"),
            ("0", "1"),
            "y",
            vec![
                ball(0.0, 0.0, 1.0, Some(0)),
                ball(0.0, 0.0, 0.5, Some(0)),
                ball(0.0, 0.0, 0.25, Some(0)),
            ],
        ),
        entry(
            "saddle_above_sigma",
            ("x", "0.5 - y"),
            ("1", "1"),
            "y",
            vec![
                ball(0.0, 0.5, 0.3, Some(-1)),
                ball(0.0, 0.5, 0.15, Some(-1)),
                ball(0.0, 0.5, 0.42, Some(-1)),
                ball(0.0, 0.0, 1.5, Some(-1)),
            ],
        ),
        entry(
            "mixed_quadratic",
            ("x^2 - y", "y + x"),
            ("x^2 - y", "y + x"),
            "y",
            vec![
                ball(-1.0, 1.0, 0.4, Some(-1)),
                ball(-1.0, 1.0, 0.2, Some(-1)),
                ball(0.0, 0.0, 0.5, Some(1)),
            ],
        ),
        // Two smooth equilibria above the switching set plus two
        // pseudo-equilibria where the sliding component x^2 - 0.5 vanishes.
        entry(
            "multi_two_plus_two",
            ("x^2 - 1", "y - 0.5"),
            ("1", "1"),
            "y",
            vec![
                ball(0.0, 0.25, 2.2, Some(0)),
                ball(1.0, 0.5, 0.3, Some(1)),
                ball(-1.0, 0.5, 0.3, Some(-1)),
                ball(2.0, -1.0, 0.4, Some(0)),
            ],
        ),
        entry(
            "smooth_dipole",
            ("x^2 - y^2 - 0.16", "2*x*y - 0.3"),
            ("x^2 - y^2 - 0.16", "2*x*y - 0.3"),
            "y",
            vec![
                ball(0.0, 0.0, 1.5, Some(2)),
                ball(0.5, 0.3, 0.25, Some(1)),
                ball(-0.5, -0.3, 0.25, Some(1)),
            ],
        ),
        entry(
            "pseudo_node_offcenter",
            ("x - 0.3", "-1"),
            ("x - 0.3", "1"),
            "y - 0.2",
            vec![
                ball(0.3, 0.2, 1.0, Some(-1)),
                ball(0.3, 0.2, 0.5, Some(-1)),
                ball(0.3, 0.2, 0.2, Some(-1)),
            ],
        ),
        entry(
            "pseudo_node_scaled_switch",
            ("x", "-1"),
            ("x", "1"),
            "5*y",
            vec![
                ball(0.0, 0.0, 1.0, Some(-1)),
                ball(0.0, 0.0, 0.5, Some(-1)),
                ball(0.0, 0.0, 0.2, Some(-1)),
            ],
        ),
        // Curved switching set: the corner points of a boundary circle sit
        // at general positions, not on a horizontal axis.
        entry(
            "curved_sigma_pseudo_node",
            ("x", "-1"),
            ("x", "1"),
            "y - 0.2*x^2",
            vec![
                ball(0.0, 0.0, 0.8, Some(-1)),
                ball(0.0, 0.0, 0.4, Some(-1)),
                ball(0.0, 0.0, 0.15, Some(-1)),
            ],
        ),
        entry(
            "curved_sigma_crossing",
            ("1", "1"),
            ("1", "2"),
            "y - 0.3*x^2 - 0.1*x",
            vec![
                ball(0.0, 0.0, 1.0, Some(0)),
                ball(0.5, 0.1, 0.6, Some(0)),
                ball(-0.4, 0.0, 0.5, Some(0)),
            ],
        ),
    ];

    // The canonical pseudo-node pushed through a rotation by 0.3 radians:
    // a composed (non-expression) field in the corpus proper.
    let base = PlanarFilippovField::parse(("x", "-1"), ("x", "1"), "y", domain())
        .expect("corpus expressions are static");
    let rotated = pushforward(
        &base,
        crate::field::PlanarMap::parse("cos(0.3)*x - sin(0.3)*y", "sin(0.3)*x + cos(0.3)*y")
            .expect("static"),
        crate::field::PlanarMap::parse("cos(0.3)*x + sin(0.3)*y", "cos(0.3)*y - sin(0.3)*x")
            .expect("static"),
    )
    .expect("rotation is a global diffeomorphism");
    entries.push(CorpusEntry {
        name: "pseudo_node_rotated",
        field: rotated,
        balls: vec![
            ball(0.0, 0.0, 1.0, Some(-1)),
            ball(0.0, 0.0, 0.5, Some(-1)),
            ball(0.0, 0.0, 0.2, Some(-1)),
        ],
    });

    entries
}

/// Entries whose singularity structure inside the first listed ball is a
/// single isolated singularity at a known location, for per-singularity
/// checks.
pub fn isolated_singularity_entries() -> Vec<(CorpusEntry, Vec2, i64)> {
    standard_corpus()
        .into_iter()
        .filter_map(|e| {
            let known = match e.name {
                "smooth_source" | "smooth_sink" | "smooth_center" | "smooth_shear_center"
                | "smooth_stiff_source" => Some((vec2(0.0, 0.0), 1)),
                "smooth_saddle" => Some((vec2(0.0, 0.0), -1)),
                "z_squared" => Some((vec2(0.0, 0.0), 2)),
                "z_cubed" => Some((vec2(0.0, 0.0), 3)),
                "conjugate_z_squared" => Some((vec2(0.0, 0.0), -2)),
                "pseudo_node_unstable" | "pseudo_node_rotated" | "pseudo_node_scaled_switch" => {
                    Some((vec2(0.0, 0.0), -1))
                }
                "pseudo_node_stable" | "escaping_pseudo_node" | "fused_focus" => {
                    Some((vec2(0.0, 0.0), 1))
                }
                "curved_sigma_pseudo_node" => Some((vec2(0.0, 0.0), -1)),
                "pseudo_node_offcenter" => Some((vec2(0.3, 0.2), -1)),
                "saddle_above_sigma" => Some((vec2(0.0, 0.5), -1)),
                "tangential_fold" | "boundary_equilibrium_zero_index" => {
                    Some((vec2(0.0, 0.0), 0))
                }
                _ => None,
            };
            known.map(|(loc, idx)| (e, loc, idx))
        })
        .collect()
}
