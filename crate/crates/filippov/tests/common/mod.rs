//! Shared oracles for the integration suites. These stay independent of
//! the adaptive sweep implementation: fixed dense sampling for angle
//! accumulation, and finite-difference Newton on the blended field for the
//! Jacobian-sign route.
//!
//! Each test binary uses its own subset.
#![allow(dead_code)]

use filippov::field::PlanarFilippovField;
use filippov::geom::{vec2, Vec2};
use filippov::regularization::{RegularizedField, TransitionFunction};

/// Winding of the field image around a full circle by plain angle
/// accumulation over `samples` uniform points (no adaptivity).
pub fn dense_angle_turns<F>(eval: F, center: Vec2, radius: f64, samples: usize) -> f64
where
    F: Fn(Vec2) -> Vec2,
{
    let mut total = 0.0;
    let at = |k: usize| {
        let t = std::f64::consts::TAU * (k as f64 / samples as f64);
        eval(center + vec2(t.cos(), t.sin()) * radius)
    };
    let mut prev = at(0);
    for k in 1..=samples {
        let v = at(k % samples);
        total += prev.cross(v).atan2(prev.dot(v));
        prev = v;
    }
    total / std::f64::consts::TAU
}

fn fd_jacobian(reg: &RegularizedField<'_>, p: Vec2, h: f64) -> [[f64; 2]; 2] {
    let f = |q: Vec2| reg.eval(q).expect("oracle evaluation");
    let fxp = f(vec2(p.x + h, p.y));
    let fxm = f(vec2(p.x - h, p.y));
    let fyp = f(vec2(p.x, p.y + h));
    let fym = f(vec2(p.x, p.y - h));
    let inv = 0.5 / h;
    [
        [(fxp.x - fxm.x) * inv, (fyp.x - fym.x) * inv],
        [(fxp.y - fxm.y) * inv, (fyp.y - fym.y) * inv],
    ]
}

/// Index of the blended field's unique zero near `seed`: locate the zero by
/// finite-difference Newton, then return the sign of the Jacobian
/// determinant there.
pub fn regularization_jacobian_sign(
    z: &PlanarFilippovField,
    epsilon: f64,
    seed: Vec2,
) -> i64 {
    let reg = RegularizedField::new(z, epsilon, TransitionFunction::polynomial());
    let h = 1e-4 * epsilon;
    let mut p = seed;
    for _ in 0..500 {
        let v = reg.eval(p).expect("oracle evaluation");
        if v.norm() <= 1e-12 {
            break;
        }
        let j = fd_jacobian(&reg, p, h);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        assert!(det.abs() > 1e-300, "singular jacobian in oracle at {p}");
        let step = vec2(
            (v.x * j[1][1] - v.y * j[0][1]) / det,
            (v.y * j[0][0] - v.x * j[1][0]) / det,
        );
        p = p - step;
        if step.norm() <= 1e-14 {
            break;
        }
    }
    let residual = reg.eval(p).expect("oracle evaluation").norm();
    assert!(
        residual <= 1e-9,
        "oracle newton did not converge: residual {residual:e} at {p}"
    );
    let j = fd_jacobian(&reg, p, h);
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if det > 0.0 {
        1
    } else {
        -1
    }
}
