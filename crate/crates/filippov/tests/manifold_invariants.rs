//! Atlas-level invariants: chart independence of indices, the index-sum
//! rule under randomized coherent perturbations of the sphere field, and
//! the non-emptiness of sphere singularity sets.

mod common;

use filippov::geom::vec2;
use filippov::manifold::builtin::{sphere, sphere_default, torus_mixed};
use filippov::winding::verify_perturbation_bounds;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Randomized coherent perturbations of the sphere scenario: whenever the
/// perturbed atlas passes the hypothesis checker on a ball around each
/// pole, the index sum stays 2.
#[test]
fn sphere_sum_stable_under_passing_perturbations() {
    let base = sphere_default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut accepted = 0usize;
    let mut draws = 0usize;
    while accepted < 20 {
        draws += 1;
        assert!(draws < 100, "could not draw 20 passing perturbations");
        let rotation = 1.0 + rng.gen_range(-0.1..0.1);
        let profile = rng.gen_range(0.0..0.1);
        let drift = 0.3 + rng.gen_range(-0.05..0.05);
        let perturbed = sphere(rotation, profile, drift);

        // The hypothesis check runs in each pole chart on a ball around
        // the pole (the ball stays inside one hemisphere, so the
        // switching-set hypotheses are vacuous there and the off-set bound
        // is the binding one).
        let mut all_pass = true;
        for chart in 0..2 {
            let report = verify_perturbation_bounds(
                &base.fields[chart],
                &perturbed.fields[chart],
                vec2(0.0, 0.0),
                0.5,
            )
            .unwrap();
            all_pass &= report.all_pass;
        }
        if !all_pass {
            continue;
        }
        accepted += 1;
        let report = perturbed.poincare_hopf_check(32).unwrap();
        assert_eq!(report.sum, 2, "draw {draws}: {report:?}");
        assert!(report.pass);
    }
}

/// Hairy-ball non-emptiness: every sphere scenario yields singularities,
/// checked before summation.
#[test]
fn sphere_scenarios_never_empty() {
    for mf in [
        sphere_default(),
        sphere(1.0, 0.2, 0.3),
        sphere(0.8, 0.0, -0.25),
        sphere(1.3, 0.1, 0.4),
    ] {
        let report = mf.poincare_hopf_check(32).unwrap();
        assert!(!report.singularities.is_empty());
        assert_eq!(report.sum, 2);
    }
}

/// Chart independence: every torus singularity visible in two charts gets
/// the same index from both (the check runs inside poincare_hopf_check and
/// would fail it on disagreement); here the visibility itself is asserted.
#[test]
fn torus_singularities_visible_in_two_charts() {
    let report = torus_mixed().poincare_hopf_check(32).unwrap();
    assert_eq!(report.singularities.len(), 4);
    for s in &report.singularities {
        assert!(
            s.charts_seen.len() >= 2,
            "singularity at {} seen only in {:?}",
            s.location,
            s.charts_seen
        );
    }
    assert_eq!(report.sum, 0);
}

/// The index computed in a chart agrees with the smooth dense-sampling
/// oracle for the pole equilibria of the sphere.
#[test]
fn pole_indices_match_dense_oracle() {
    let mf = sphere_default();
    for chart in 0..2 {
        let field = &mf.fields[chart];
        let turns = common::dense_angle_turns(
            |p| field.eval_piece(p).unwrap(),
            vec2(0.0, 0.0),
            0.5,
            10_000,
        );
        assert!((turns - 1.0).abs() < 1e-6, "chart {chart}: {turns}");
    }
}
