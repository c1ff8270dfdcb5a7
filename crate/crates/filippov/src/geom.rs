//! Minimal plane geometry helpers shared across the crate.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub const fn vec2(x: f64, y: f64) -> Vec2 {
    Vec2 { x, y }
}

impl Vec2 {
    pub fn dot(self, rhs: Vec2) -> f64 {
        self.x * rhs.x + self.y * rhs.y
    }

    /// Cross product z-component, i.e. the determinant of the matrix with
    /// columns `self`, `rhs`.
    pub fn cross(self, rhs: Vec2) -> f64 {
        self.x * rhs.y - self.y * rhs.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(self, rhs: Vec2) -> f64 {
        (self - rhs).norm()
    }

    /// Rotation by +90 degrees.
    pub fn perp(self) -> Vec2 {
        vec2(-self.y, self.x)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        vec2(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        vec2(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        vec2(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        vec2(-self.x, -self.y)
    }
}

impl From<(f64, f64)> for Vec2 {
    fn from((x, y): (f64, f64)) -> Vec2 {
        vec2(x, y)
    }
}

impl From<Vec2> for (f64, f64) {
    fn from(v: Vec2) -> (f64, f64) {
        (v.x, v.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Axis-aligned rectangle, the planar domain of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Rect {
        assert!(x0 < x1 && y0 < y1, "degenerate rectangle");
        Rect { x0, y0, x1, y1 }
    }

    pub fn centered(cx: f64, cy: f64, half_width: f64, half_height: f64) -> Rect {
        Rect::new(cx - half_width, cy - half_height, cx + half_width, cy + half_height)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn contains_ball(&self, center: Vec2, radius: f64) -> bool {
        center.x - radius >= self.x0
            && center.x + radius <= self.x1
            && center.y - radius >= self.y0
            && center.y + radius <= self.y1
    }

    /// Distance from an interior point to the rectangle boundary.
    pub fn boundary_distance(&self, p: Vec2) -> f64 {
        let dx = (p.x - self.x0).min(self.x1 - p.x);
        let dy = (p.y - self.y0).min(self.y1 - p.y);
        dx.min(dy)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn diagonal(&self) -> f64 {
        (self.width().hypot(self.height())).abs()
    }

    pub fn is_inside(&self, other: &Rect) -> bool {
        self.x0 >= other.x0 && self.y0 >= other.y0 && self.x1 <= other.x1 && self.y1 <= other.y1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_ball_containment() {
        let r = Rect::new(-1.0, -1.0, 1.0, 1.0);
        assert!(r.contains_ball(vec2(0.0, 0.0), 1.0));
        assert!(!r.contains_ball(vec2(0.5, 0.0), 0.6));
        assert_eq!(r.boundary_distance(vec2(0.25, 0.0)), 0.75);
    }

    #[test]
    fn cross_is_column_determinant() {
        assert_eq!(vec2(1.0, 0.0).cross(vec2(0.0, 1.0)), 1.0);
        assert_eq!(vec2(0.0, 1.0).cross(vec2(1.0, 0.0)), -1.0);
    }
}
