//! Acceptance suite. Each test exercises one criterion end to end at its
//! stated tolerance and prints one `ACCEPTANCE <n> (<name>): PASS|FAIL`
//! line. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines as they complete.

mod common;

use std::time::Instant;

use filippov::corpus::{isolated_singularity_entries, standard_corpus};
use filippov::defaults;
use filippov::expr::ScalarExpr;
use filippov::field::{
    find_singularities, PlanarFilippovField, PlanarMap, ScalarField, SearchParams,
};
use filippov::geom::vec2;
use filippov::manifold::builtin::{sphere, sphere_default, torus_constant, torus_mixed};
use filippov::manifold::pushforward;
use filippov::regularization::check_invariance;
use filippov::winding::{
    corner_sweep, filippov_index_on_ball, index_at_point, index_at_singularity,
    min_segment_norm, verify_perturbation_bounds,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn criterion(number: u32, name: &str, body: impl FnOnce() + std::panic::UnwindSafe) {
    let outcome = std::panic::catch_unwind(body);
    match &outcome {
        Ok(()) => println!("ACCEPTANCE {number} ({name}): PASS"),
        Err(_) => println!("ACCEPTANCE {number} ({name}): FAIL"),
    }
    if let Err(payload) = outcome {
        std::panic::resume_unwind(payload);
    }
}

/// Criterion 1: every ball index over the corpus lands within 1e-6 of an
/// integer, across >= 25 fields with >= 3 balls each, in under 30 s.
#[test]
fn acceptance_1_integrality() {
    criterion(1, "integrality over the corpus", || {
        let started = Instant::now();
        let corpus = standard_corpus();
        assert!(corpus.len() >= 25, "corpus too small: {}", corpus.len());
        let mut checked = 0usize;
        for entry in &corpus {
            assert!(entry.balls.len() >= 3, "{} has too few balls", entry.name);
            for ball in &entry.balls {
                let result = filippov_index_on_ball(&entry.field, ball.center, ball.radius)
                    .unwrap_or_else(|e| panic!("{}: ball {} r={}: {e}", entry.name, ball.center, ball.radius));
                assert!(
                    result.residual <= 1e-6,
                    "{}: residual {:e}",
                    entry.name,
                    result.residual
                );
                checked += 1;
            }
        }
        assert!(checked >= 75, "only {checked} balls checked");
        let elapsed = started.elapsed();
        assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    });
}

/// Criterion 2: singularity-free balls return exactly 0.
#[test]
fn acceptance_2_vanishing() {
    criterion(2, "vanishing on singularity-free balls", || {
        let corpus = standard_corpus();
        let mut zero_balls = 0usize;
        for entry in &corpus {
            for ball in &entry.balls {
                if ball.known_index == Some(0) {
                    let result =
                        filippov_index_on_ball(&entry.field, ball.center, ball.radius).unwrap();
                    assert_eq!(result.index, 0, "{}: ball {}", entry.name, ball.center);
                    zero_balls += 1;
                }
            }
        }
        assert!(zero_balls >= 10, "only {zero_balls} singularity-free balls");
    });
}

fn switch_variants(field: &PlanarFilippovField) -> Vec<PlanarFilippovField> {
    let ScalarField::Expr(f) = &field.switch else {
        return Vec::new();
    };
    let doubled = ScalarExpr::num(2.0) * f.clone();
    let cubed_plus = f.clone().pow_int(3) + f.clone();
    [doubled, cubed_plus]
        .into_iter()
        .map(|g| PlanarFilippovField {
            switch: ScalarField::Expr(g),
            ..field.clone()
        })
        .collect()
}

/// Criterion 3: corner-based index equals the regularized index for every
/// epsilon in {1e-1, 1e-2, 1e-3} and both built-in transition functions,
/// on every corpus field, exactly; also invariant under replacing the
/// switching function by 2f and f^3 + f. Under 2 minutes.
#[test]
fn acceptance_3_regularization_invariance() {
    criterion(3, "regularization invariance", || {
        let started = Instant::now();
        for entry in &standard_corpus() {
            let ball = &entry.balls[0];
            let report =
                check_invariance(&entry.field, ball.center, ball.radius, &defaults::EPS_LIST)
                    .unwrap_or_else(|e| panic!("{}: {e}", entry.name));
            assert!(report.invariant, "{}: {report:?}", entry.name);
            if let Some(expected) = ball.known_index {
                assert_eq!(report.filippov_index, expected, "{}", entry.name);
            }
            for variant in switch_variants(&entry.field) {
                let vreport =
                    check_invariance(&variant, ball.center, ball.radius, &defaults::EPS_LIST)
                        .unwrap_or_else(|e| panic!("{} (switch variant): {e}", entry.name));
                assert!(vreport.invariant, "{} variant: {vreport:?}", entry.name);
                assert_eq!(
                    vreport.filippov_index, report.filippov_index,
                    "{}: switch variant changed the index",
                    entry.name
                );
            }
        }
        let elapsed = started.elapsed();
        assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    });
}

/// Criterion 4: corner_sweep equals atan2(det(A|B), <A,B>) within 1e-9 on
/// 10^4 random pairs, including near-parallel pairs down to angle 1e-4.
#[test]
fn acceptance_4_corner_oracle() {
    criterion(4, "corner closed-form oracle", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1f2e3d4c);
        let mut tested = 0usize;
        while tested < 10_000 {
            let theta_a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let len_a = 10f64.powf(rng.gen_range(-1.0..1.0));
            let len_b = 10f64.powf(rng.gen_range(-1.0..1.0));
            // Half the pairs are nearly parallel or nearly anti-parallel
            // (but separated from pi by at least 1e-4).
            let delta: f64 = if tested % 2 == 0 {
                let tiny = 10f64.powf(rng.gen_range(-4.0..-1.0));
                if rng.gen_bool(0.5) {
                    tiny
                } else {
                    std::f64::consts::PI - tiny.max(1e-4)
                }
            } else {
                rng.gen_range(-3.0..3.0)
            };
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let theta_b = theta_a + sign * delta;
            let a = vec2(theta_a.cos(), theta_a.sin()) * len_a;
            let b = vec2(theta_b.cos(), theta_b.sin()) * len_b;
            if min_segment_norm(a, b) <= 1e-9 * len_a.max(len_b) {
                continue;
            }
            let got = corner_sweep(a, b).unwrap();
            let oracle = a.cross(b).atan2(a.dot(b));
            assert!(
                (got - oracle).abs() <= 1e-9,
                "a={a} b={b}: {got} vs {oracle}"
            );
            tested += 1;
        }
    });
}

/// Criterion 5: indices are identical over three radii per singularity and
/// preserved exactly by pushforward through a rotation, an anisotropic
/// linear map, and the near-identity map (x + 0.1 y^2, y).
#[test]
fn acceptance_5_radius_and_chart_invariance() {
    criterion(5, "radius and chart invariance", || {
        let entries = isolated_singularity_entries();
        assert!(entries.len() >= 12, "only {} isolated entries", entries.len());

        for (entry, loc, expected) in &entries {
            // Three radii from the entry's balls centered at the
            // singularity.
            let radii: Vec<f64> = entry
                .balls
                .iter()
                .filter(|b| b.center.dist(*loc) < 1e-12)
                .map(|b| b.radius)
                .collect();
            assert!(radii.len() >= 3, "{}: need 3 concentric balls", entry.name);
            for r in &radii {
                let got = filippov_index_on_ball(&entry.field, *loc, *r)
                    .unwrap_or_else(|e| panic!("{} r={r}: {e}", entry.name))
                    .index;
                assert_eq!(got, *expected, "{} at radius {r}", entry.name);
            }
        }

        let maps: Vec<(&str, PlanarMap, PlanarMap)> = vec![
            (
                "rotation",
                PlanarMap::parse("cos(0.7)*x - sin(0.7)*y", "sin(0.7)*x + cos(0.7)*y").unwrap(),
                PlanarMap::parse("cos(0.7)*x + sin(0.7)*y", "cos(0.7)*y - sin(0.7)*x").unwrap(),
            ),
            (
                "anisotropic",
                PlanarMap::parse("2*x", "y/2").unwrap(),
                PlanarMap::parse("x/2", "2*y").unwrap(),
            ),
            (
                "near-identity",
                PlanarMap::parse("x + 0.1*y^2", "y").unwrap(),
                PlanarMap::parse("x - 0.1*y^2", "y").unwrap(),
            ),
        ];
        for (entry, loc, expected) in &entries {
            let r_min = entry
                .balls
                .iter()
                .filter(|b| b.center.dist(*loc) < 1e-12)
                .map(|b| b.radius)
                .fold(f64::INFINITY, f64::min);
            for (map_name, forward, inverse) in &maps {
                let pushed = pushforward(&entry.field, forward.clone(), inverse.clone())
                    .unwrap_or_else(|e| panic!("{} {map_name}: {e}", entry.name));
                let mapped = forward.eval(*loc).unwrap();
                let got = index_at_point(&pushed, mapped, 0.4 * r_min)
                    .unwrap_or_else(|e| panic!("{} {map_name}: {e}", entry.name));
                assert_eq!(got, *expected, "{} under {map_name}", entry.name);
            }
        }
    });
}

/// Criterion 6: the big-ball index equals the sum of per-singularity
/// indices, and the index is constant along 11-step admissible linear
/// homotopies.
#[test]
fn acceptance_6_additivity_and_homotopy() {
    criterion(6, "additivity and homotopy constancy", || {
        // Additivity over multi-singularity fields.
        for (name, big_center, big_radius, expected_count) in [
            ("multi_two_plus_two", vec2(0.0, 0.25), 2.2, 4usize),
            ("smooth_dipole", vec2(0.0, 0.0), 1.5, 2usize),
        ] {
            let entry = standard_corpus()
                .into_iter()
                .find(|e| e.name == name)
                .expect("corpus entry");
            let big = filippov_index_on_ball(&entry.field, big_center, big_radius)
                .unwrap()
                .index;
            let box_r = big_radius * 0.98;
            let bounds = filippov::geom::Rect::new(
                big_center.x - box_r,
                big_center.y - box_r,
                big_center.x + box_r,
                big_center.y + box_r,
            );
            let singularities =
                find_singularities(&entry.field, bounds, &SearchParams::default()).unwrap();
            assert_eq!(
                singularities.len(),
                expected_count,
                "{name}: {singularities:?}"
            );
            let mut sum = 0i64;
            for s in &singularities {
                sum += index_at_singularity(&entry.field, s, &singularities).unwrap();
            }
            assert_eq!(big, sum, "{name}: big-ball {big} vs sum {sum}");
        }

        // Homotopy constancy along lambda in {0, 0.1, ..., 1}.
        for step in 0..=10 {
            let lambda = step as f64 / 10.0;
            // Pseudo-node translated and reshaped, staying admissible.
            let shift = 0.2 * lambda;
            let scale = 1.0 + 0.5 * lambda;
            let z = PlanarFilippovField::parse(
                (&format!("x + {shift}"), &format!("-{scale}")),
                (&format!("x + {shift}"), &format!("{scale}")),
                "y",
                filippov::geom::Rect::new(-4.0, -4.0, 4.0, 4.0),
            )
            .unwrap();
            let idx = filippov_index_on_ball(&z, vec2(0.0, 0.0), 1.0).unwrap().index;
            assert_eq!(idx, -1, "pseudo-node homotopy broke at lambda={lambda}");

            // Smooth source stretching into a stiff source.
            let sx = 1.0 + 2.0 * lambda;
            let sy = 1.0 - 0.5 * lambda;
            let z = PlanarFilippovField::parse(
                (&format!("{sx}*x"), &format!("{sy}*y")),
                (&format!("{sx}*x"), &format!("{sy}*y")),
                "y",
                filippov::geom::Rect::new(-4.0, -4.0, 4.0, 4.0),
            )
            .unwrap();
            let idx = filippov_index_on_ball(&z, vec2(0.0, 0.0), 1.0).unwrap().index;
            assert_eq!(idx, 1, "source homotopy broke at lambda={lambda}");
        }
    });
}

/// Criterion 7: the classical values against independent oracles — smooth
/// saddle -1, source +1, z^2 field +2 (dense angle accumulation at 10^4
/// samples) and the pseudo-node -1 (regularization Jacobian-sign oracle).
#[test]
fn acceptance_7_known_values() {
    criterion(7, "known index values vs oracles", || {
        let cases: [(&str, (&str, &str), i64); 3] = [
            ("saddle", ("x", "-y"), -1),
            ("source", ("x", "y"), 1),
            ("z_squared", ("x^2 - y^2", "2*x*y"), 2),
        ];
        for (name, (fx, fy), expected) in cases {
            let z = PlanarFilippovField::parse(
                (fx, fy),
                (fx, fy),
                "y",
                filippov::geom::Rect::new(-2.0, -2.0, 2.0, 2.0),
            )
            .unwrap();
            let oracle = common::dense_angle_turns(
                |p| z.f_plus.eval(p).unwrap(),
                vec2(0.0, 0.0),
                1.0,
                10_000,
            );
            assert!(
                (oracle - expected as f64).abs() < 1e-6,
                "{name}: oracle {oracle}"
            );
            let got = filippov_index_on_ball(&z, vec2(0.0, 0.0), 1.0).unwrap().index;
            assert_eq!(got, expected, "{name}");
        }

        let pseudo = PlanarFilippovField::parse(
            ("x", "-1"),
            ("x", "1"),
            "y",
            filippov::geom::Rect::new(-2.0, -2.0, 2.0, 2.0),
        )
        .unwrap();
        let oracle = common::regularization_jacobian_sign(&pseudo, 0.01, vec2(0.05, 0.002));
        assert_eq!(oracle, -1, "jacobian-sign oracle");
        let got = filippov_index_on_ball(&pseudo, vec2(0.0, 0.0), 1.0).unwrap().index;
        assert_eq!(got, oracle, "pseudo-node vs oracle");
    });
}

/// Criterion 8: index sums equal the Euler characteristic on the built-in
/// surfaces at grid 64, and sphere scenarios always produce at least one
/// singularity. Under 2 minutes.
#[test]
fn acceptance_8_poincare_hopf() {
    criterion(8, "index sum vs Euler characteristic", || {
        let started = Instant::now();
        let spheres = [
            ("sphere_default", sphere_default()),
            ("sphere_profiled", sphere(0.9, 0.25, -0.3)),
            ("sphere_fast", sphere(1.2, 0.1, 0.35)),
        ];
        for (name, mf) in &spheres {
            let report = mf.poincare_hopf_check(64).unwrap();
            assert!(
                !report.singularities.is_empty(),
                "{name}: sphere field with no singularities contradicts the sum rule"
            );
            assert_eq!(report.sum, 2, "{name}: {report:?}");
            assert!(report.pass, "{name}: {}", report.summary_line());
        }
        for (name, mf) in [("torus_constant", torus_constant()), ("torus_mixed", torus_mixed())] {
            let report = mf.poincare_hopf_check(64).unwrap();
            assert_eq!(report.sum, 0, "{name}: {report:?}");
            assert!(report.pass, "{name}: {}", report.summary_line());
        }
        let elapsed = started.elapsed();
        assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    });
}

/// Criterion 9: 20 random perturbations that pass the hypothesis checker
/// leave the ball index unchanged; 5 constructed violations flag the
/// intended hypothesis.
#[test]
fn acceptance_9_perturbation_stability() {
    criterion(9, "perturbation stability", || {
        let base = PlanarFilippovField::parse(
            ("x", "-1"),
            ("x", "1"),
            "y",
            filippov::geom::Rect::new(-4.0, -4.0, 4.0, 4.0),
        )
        .unwrap();
        let center = vec2(0.0, 0.0);
        let radius = 1.0;
        let base_index = filippov_index_on_ball(&base, center, radius).unwrap().index;
        assert_eq!(base_index, -1);

        let mut rng = ChaCha8Rng::seed_from_u64(0xabcdef01);
        let mut passing = 0usize;
        let mut draws = 0usize;
        while passing < 20 {
            draws += 1;
            assert!(draws < 200, "could not draw 20 passing perturbations");
            let mut coeff = || -> f64 { rng.gen_range(-0.1..0.1) };
            let lin = |a: f64, b: f64, c: f64| format!("({a}) + ({b})*x + ({c})*y");
            let perturbed = PlanarFilippovField::parse(
                (
                    &format!("x + {}", lin(coeff(), coeff(), coeff())),
                    &format!("-1 + {}", lin(coeff(), coeff(), coeff())),
                ),
                (
                    &format!("x + {}", lin(coeff(), coeff(), coeff())),
                    &format!("1 + {}", lin(coeff(), coeff(), coeff())),
                ),
                "y",
                filippov::geom::Rect::new(-4.0, -4.0, 4.0, 4.0),
            )
            .unwrap();
            let report = verify_perturbation_bounds(&base, &perturbed, center, radius).unwrap();
            if !report.all_pass {
                continue;
            }
            passing += 1;
            let idx = filippov_index_on_ball(&perturbed, center, radius).unwrap().index;
            assert_eq!(idx, base_index, "index moved under a passing perturbation");
        }

        // Constructed violations: (field, bullet expected to flag).
        let violations: [((&str, &str), (&str, &str), usize); 5] = [
            (("-x", "1"), ("-x", "-1"), 0),       // Z -> -Z
            (("3*x", "-3"), ("3*x", "3"), 0),     // Z -> 3 Z
            (("x", "1"), ("x", "1"), 1),          // Lie derivative of F+ flipped
            (("x + 5", "-1"), ("x + 5", "1"), 3), // huge tangential shift
            (("x + 4", "-1"), ("x", "1"), 2),     // asymmetric shift moves the sliding field
        ];
        for ((fpx, fpy), (fmx, fmy), bullet) in violations {
            let bad = PlanarFilippovField::parse(
                (fpx, fpy),
                (fmx, fmy),
                "y",
                filippov::geom::Rect::new(-4.0, -4.0, 4.0, 4.0),
            )
            .unwrap();
            let report = verify_perturbation_bounds(&base, &bad, center, radius).unwrap();
            assert!(
                !report.bullets[bullet].pass,
                "expected bullet {bullet} to flag for ({fpx},{fpy})/({fmx},{fmy}): {report:?}"
            );
            assert!(!report.all_pass);
        }
    });
}
