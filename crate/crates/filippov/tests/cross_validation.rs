//! Randomized cross-validation: on arbitrary generated piecewise fields
//! and arbitrary admissible balls, the corner-based index and the
//! regularized rotation number must produce the same integer. Boundary
//! configurations rejected by the corner route (singularities on the
//! circle, non-transversal crossings) are skipped; everything accepted
//! must agree.

use filippov::field::PlanarFilippovField;
use filippov::geom::{vec2, Rect};
use filippov::regularization::{regularized_index_with_retry, TransitionFunction};
use filippov::winding::filippov_index_on_ball;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_quadratic(rng: &mut ChaCha8Rng) -> String {
    let mut coeff = || -> f64 { (rng.gen_range(-20i32..=20) as f64) / 10.0 };
    format!(
        "({}) + ({})*x + ({})*y + ({})*x*y + ({})*x^2 + ({})*y^2",
        coeff(),
        coeff(),
        coeff(),
        coeff(),
        coeff(),
        coeff()
    )
}

#[test]
fn random_fields_agree_with_regularization() {
    let switches = ["y", "y - 0.4*x", "y - 0.25*x^2", "x + 0.5*y - 0.1"];
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee);
    let mut checked = 0usize;
    let mut attempts = 0usize;
    let mut histogram: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();

    while checked < 60 && attempts < 1500 {
        attempts += 1;
        let switch = switches[rng.gen_range(0..switches.len())];
        let z = PlanarFilippovField::parse(
            (&random_quadratic(&mut rng), &random_quadratic(&mut rng)),
            (&random_quadratic(&mut rng), &random_quadratic(&mut rng)),
            switch,
            Rect::new(-6.0, -6.0, 6.0, 6.0),
        )
        .unwrap();
        let center = vec2(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8));
        let radius = rng.gen_range(0.3..1.2);

        // Only configurations the corner route accepts participate.
        let Ok(result) = filippov_index_on_ball(&z, center, radius) else {
            continue;
        };
        for phi in TransitionFunction::builtins() {
            for eps in [1e-1, 1e-2, 1e-3] {
                let (reg, _eps_used) =
                    regularized_index_with_retry(&z, &phi, eps, center, radius)
                        .unwrap_or_else(|e| {
                            panic!(
                                "field {z:?} ball {center} r={radius}: corner route gave {} \
                                 but regularization failed: {e}",
                                result.index
                            )
                        });
                assert_eq!(
                    reg, result.index,
                    "field {z:?} ball {center} r={radius} phi={phi} eps={eps}"
                );
            }
        }
        *histogram.entry(result.index).or_default() += 1;
        checked += 1;
    }
    assert!(
        checked >= 60,
        "only {checked} admissible configurations in {attempts} attempts"
    );
    // The sample should not be degenerate: several distinct index values
    // must appear, including nonzero ones.
    assert!(histogram.len() >= 2, "index histogram {histogram:?}");
    assert!(
        histogram.keys().any(|k| *k != 0),
        "index histogram {histogram:?}"
    );
}
