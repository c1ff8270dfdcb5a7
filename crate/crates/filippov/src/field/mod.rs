//! The planar Filippov field model: switching-set region classification,
//! Lie derivatives, the sliding vector field, and singularity search.

mod map;
mod search;

use std::fmt;

pub use map::{Diffeo, PlanarMap, ScalarField, VectorField};
pub use search::{find_singularities, SearchParams};

/// Trace the level curve `switch = level` inside `bounds` as polylines,
/// for curve export (level 0 is the switching set itself, other levels the
/// regularization band edges).
pub fn trace_level_curve(
    z: &PlanarFilippovField,
    level: f64,
    bounds: Rect,
    grid_n: usize,
) -> Result<Vec<Vec<Vec2>>> {
    if level == 0.0 {
        return search::trace_sigma(z, bounds, grid_n);
    }
    let shifted = PlanarFilippovField {
        switch: z.switch.clone().offset_by(level),
        ..z.clone()
    };
    search::trace_sigma(&shifted, bounds, grid_n)
}

use crate::defaults;
use crate::error::{Error, Result};
use crate::expr::{ScalarExpr, VectorFieldExpr};
use crate::geom::{Rect, Vec2};

/// The Filippov field `Z = (F+, F-)_f` on an axis-aligned rectangle.
///
/// `f_plus` governs `{f >= 0}`, `f_minus` governs `{f <= 0}`, and the
/// switching set is the zero level of `switch`, on which 0 must be a
/// regular value (checked wherever the set is queried).
#[derive(Debug, Clone)]
pub struct PlanarFilippovField {
    pub f_plus: VectorField,
    pub f_minus: VectorField,
    pub switch: ScalarField,
    pub domain: Rect,
}

/// Region tag for a point of the switching set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SigmaTag {
    Crossing,
    Sliding,
    Escaping,
    TangentialPlus,
    TangentialMinus,
    TangentialBoth,
    BoundaryEqPlus,
    BoundaryEqMinus,
}

impl fmt::Display for SigmaTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SigmaTag::Crossing => "Crossing",
            SigmaTag::Sliding => "Sliding",
            SigmaTag::Escaping => "Escaping",
            SigmaTag::TangentialPlus => "TangentialPlus",
            SigmaTag::TangentialMinus => "TangentialMinus",
            SigmaTag::TangentialBoth => "TangentialBoth",
            SigmaTag::BoundaryEqPlus => "BoundaryEqPlus",
            SigmaTag::BoundaryEqMinus => "BoundaryEqMinus",
        };
        write!(f, "{s}")
    }
}

/// Classification of a switching-set point together with the Lie
/// derivatives that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SigmaClassification {
    pub tag: SigmaTag,
    /// `F+ f` at the point.
    pub lie_plus: f64,
    /// `F- f` at the point.
    pub lie_minus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SingularityKind {
    /// Zero of `F+` with `f > 0`.
    EquilibriumPlus,
    /// Zero of `F-` with `f < 0`.
    EquilibriumMinus,
    /// Zero of `F+` or `F-` lying on the switching set.
    BoundaryEquilibrium,
    /// Zero of the sliding vector field inside the sliding/escaping region.
    PseudoEquilibrium,
    /// Point of the switching set where `F+ f` or `F- f` vanishes.
    Tangential,
}

impl fmt::Display for SingularityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SingularityKind::EquilibriumPlus => "EquilibriumPlus",
            SingularityKind::EquilibriumMinus => "EquilibriumMinus",
            SingularityKind::BoundaryEquilibrium => "BoundaryEquilibrium",
            SingularityKind::PseudoEquilibrium => "PseudoEquilibrium",
            SingularityKind::Tangential => "Tangential",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Singularity {
    pub location: Vec2,
    pub kind: SingularityKind,
    /// Filled in by the index layer; `None` straight out of the search.
    pub index: Option<i64>,
}

impl PlanarFilippovField {
    pub fn new(
        f_plus: VectorField,
        f_minus: VectorField,
        switch: ScalarField,
        domain: Rect,
    ) -> Self {
        PlanarFilippovField {
            f_plus,
            f_minus,
            switch,
            domain,
        }
    }

    /// Build a field from expression text.
    pub fn parse(
        f_plus: (&str, &str),
        f_minus: (&str, &str),
        switch: &str,
        domain: Rect,
    ) -> Result<Self> {
        Ok(PlanarFilippovField {
            f_plus: VectorField::parse(f_plus.0, f_plus.1)?,
            f_minus: VectorField::parse(f_minus.0, f_minus.1)?,
            switch: ScalarField::parse(switch)?,
            domain,
        })
    }

    pub fn from_exprs(
        f_plus: VectorFieldExpr,
        f_minus: VectorFieldExpr,
        switch: ScalarExpr,
        domain: Rect,
    ) -> Self {
        PlanarFilippovField {
            f_plus: VectorField::Exprs(f_plus),
            f_minus: VectorField::Exprs(f_minus),
            switch: ScalarField::Expr(switch),
            domain,
        }
    }

    /// The piece governing `p` by the sign of the switching function.
    /// On the switching set itself this returns the `F+` value.
    pub fn eval_piece(&self, p: Vec2) -> Result<Vec2> {
        if self.switch.eval(p)? >= 0.0 {
            self.f_plus.eval(p)
        } else {
            self.f_minus.eval(p)
        }
    }

    /// Gradient of the switching function, rejecting degenerate points.
    pub fn switch_gradient(&self, p: Vec2) -> Result<Vec2> {
        let jet = self.switch.jet(p)?;
        let grad = Vec2 { x: jet.dx, y: jet.dy };
        if grad.norm() <= defaults::GRAD_MIN {
            return Err(Error::DegenerateSwitch(p.x, p.y, grad.norm()));
        }
        Ok(grad)
    }

    pub fn lie_plus(&self, p: Vec2) -> Result<f64> {
        lie_derivative_of(&self.f_plus, &self.switch, p)
    }

    pub fn lie_minus(&self, p: Vec2) -> Result<f64> {
        lie_derivative_of(&self.f_minus, &self.switch, p)
    }

    /// Classify a switching-set point. `tol` bounds both the allowed
    /// distance from the set (`|f|`) and the dead zone for Lie-derivative
    /// signs; points with `|F(+-) f| <= tol` are tangential, never silently
    /// assigned a sign.
    pub fn classify_sigma_point(&self, p: Vec2, tol: f64) -> Result<SigmaClassification> {
        let f_val = self.switch.eval(p)?;
        if f_val.abs() > tol {
            return Err(Error::NotOnSigma(p.x, p.y, f_val.abs(), tol));
        }
        self.switch_gradient(p)?;

        let lie_plus = self.lie_plus(p)?;
        let lie_minus = self.lie_minus(p)?;

        // Boundary equilibria take precedence over the Lie-derivative table.
        if self.f_plus.eval(p)?.norm() <= tol {
            return Ok(SigmaClassification {
                tag: SigmaTag::BoundaryEqPlus,
                lie_plus,
                lie_minus,
            });
        }
        if self.f_minus.eval(p)?.norm() <= tol {
            return Ok(SigmaClassification {
                tag: SigmaTag::BoundaryEqMinus,
                lie_plus,
                lie_minus,
            });
        }

        let plus_tangent = lie_plus.abs() <= tol;
        let minus_tangent = lie_minus.abs() <= tol;
        let tag = match (plus_tangent, minus_tangent) {
            (true, true) => SigmaTag::TangentialBoth,
            (true, false) => SigmaTag::TangentialPlus,
            (false, true) => SigmaTag::TangentialMinus,
            (false, false) => {
                if lie_plus * lie_minus > 0.0 {
                    SigmaTag::Crossing
                } else if lie_plus < 0.0 {
                    SigmaTag::Sliding
                } else {
                    SigmaTag::Escaping
                }
            }
        };
        Ok(SigmaClassification {
            tag,
            lie_plus,
            lie_minus,
        })
    }

    /// The sliding vector field
    /// `(F-f . F+ - F+f . F-) / (F-f - F+f)` at a sliding or escaping
    /// point. The result is tangent to the switching set; this is verified
    /// before returning.
    pub fn sliding_field(&self, p: Vec2) -> Result<Vec2> {
        let lie_plus = self.lie_plus(p)?;
        let lie_minus = self.lie_minus(p)?;
        if !(lie_plus * lie_minus < 0.0) {
            return Err(Error::NotSlidingRegion(p.x, p.y, lie_plus, lie_minus));
        }
        let slid = self.sliding_field_unchecked(p, lie_plus, lie_minus)?;

        let grad = self.switch_gradient(p)?;
        let normal_component = slid.dot(grad).abs();
        let scale = slid.norm() * grad.norm();
        if normal_component > defaults::RESIDUAL_TOL * scale {
            return Err(Error::SlidingNotTangent(p.x, p.y, normal_component / scale));
        }
        Ok(slid)
    }

    /// The sliding formula without the strict region check; used along
    /// traced switching curves where the caller already holds the Lie
    /// derivatives.
    pub(crate) fn sliding_field_unchecked(
        &self,
        p: Vec2,
        lie_plus: f64,
        lie_minus: f64,
    ) -> Result<Vec2> {
        let fp = self.f_plus.eval(p)?;
        let fm = self.f_minus.eval(p)?;
        let denom = lie_minus - lie_plus;
        Ok((fp * lie_minus - fm * lie_plus) * (1.0 / denom))
    }
}

/// First Lie derivative `F f(p) = <grad f(p), F(p)>`.
pub fn lie_derivative(field: &VectorFieldExpr, f: &ScalarExpr, p: Vec2) -> Result<f64> {
    let jet = f.eval_jet(p.x, p.y)?;
    let (vx, vy) = field.eval(p.x, p.y)?;
    Ok(jet.dx * vx + jet.dy * vy)
}

pub(crate) fn lie_derivative_of(field: &VectorField, f: &ScalarField, p: Vec2) -> Result<f64> {
    let jet = f.jet(p)?;
    let v = field.eval(p)?;
    Ok(jet.dx * v.x + jet.dy * v.y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_scalar;
    use crate::geom::vec2;

    fn field(
        fp: (&str, &str),
        fm: (&str, &str),
        switch: &str,
    ) -> PlanarFilippovField {
        PlanarFilippovField::parse(fp, fm, switch, Rect::new(-2.0, -2.0, 2.0, 2.0)).unwrap()
    }

    #[test]
    fn lie_derivative_examples() {
        let f = parse_scalar("y").unwrap();
        let v = VectorFieldExpr::parse("0", "1").unwrap();
        assert_eq!(lie_derivative(&v, &f, vec2(0.0, 0.0)).unwrap(), 1.0);

        let v = VectorFieldExpr::parse("1", "x").unwrap();
        for c in [-1.5, 0.0, 0.7] {
            assert_eq!(lie_derivative(&v, &f, vec2(c, 0.0)).unwrap(), c);
        }

        // <grad(y - x^2), (x, sin x)> at (1, 1) = -2*1*1 + sin 1
        let f = parse_scalar("y - x^2").unwrap();
        let v = VectorFieldExpr::parse("x", "sin(x)").unwrap();
        let got = lie_derivative(&v, &f, vec2(1.0, 1.0)).unwrap();
        assert!((got - ((1.0f64).sin() - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn classify_crossing_sliding_tangential() {
        let z = field(("1", "1"), ("1", "1"), "y");
        let c = z.classify_sigma_point(vec2(0.0, 0.0), 1e-7).unwrap();
        assert_eq!(c.tag, SigmaTag::Crossing);
        assert_eq!((c.lie_plus, c.lie_minus), (1.0, 1.0));

        let z = field(("x", "-1"), ("x", "1"), "y");
        let c = z.classify_sigma_point(vec2(0.5, 0.0), 1e-7).unwrap();
        assert_eq!(c.tag, SigmaTag::Sliding);
        assert_eq!((c.lie_plus, c.lie_minus), (-1.0, 1.0));

        let z = field(("x", "1"), ("x", "-1"), "y");
        let c = z.classify_sigma_point(vec2(0.5, 0.0), 1e-7).unwrap();
        assert_eq!(c.tag, SigmaTag::Escaping);

        let z = field(("1", "x"), ("1", "1"), "y");
        let c = z.classify_sigma_point(vec2(0.0, 0.0), 1e-7).unwrap();
        assert_eq!(c.tag, SigmaTag::TangentialPlus);
    }

    #[test]
    fn classify_boundary_equilibrium_precedence() {
        // F+ vanishes at the origin, which lies on the switching set.
        let z = field(("x", "y + x^2"), ("0", "1"), "y");
        let c = z.classify_sigma_point(vec2(0.0, 0.0), 1e-9).unwrap();
        assert_eq!(c.tag, SigmaTag::BoundaryEqPlus);
    }

    #[test]
    fn classify_rejects_off_sigma_and_degenerate() {
        let z = field(("1", "1"), ("1", "1"), "y");
        assert!(matches!(
            z.classify_sigma_point(vec2(0.0, 0.5), 1e-7),
            Err(Error::NotOnSigma(..))
        ));
        // 0 is not a regular value of f = y^2 on its zero set.
        let z = field(("1", "1"), ("1", "1"), "y^2");
        assert!(matches!(
            z.classify_sigma_point(vec2(0.0, 0.0), 1e-7),
            Err(Error::DegenerateSwitch(..))
        ));
    }

    #[test]
    fn sliding_field_examples() {
        // ((x,-1) + (x,1))/2 = (x, 0) on the sliding segment
        let z = field(("x", "-1"), ("x", "1"), "y");
        for c in [-0.8, 0.0, 0.6] {
            let v = z.sliding_field(vec2(c, 0.0)).unwrap();
            assert!((v.x - c).abs() < 1e-15);
            assert_eq!(v.y, 0.0);
        }

        let z = field(("0", "-1"), ("0", "1"), "y");
        assert_eq!(z.sliding_field(vec2(0.0, 0.0)).unwrap(), vec2(0.0, 0.0));

        // (1*(1,-1) - (-1)*(3,1)) / (1 - (-1)) = (4, 0)/2 = (2, 0)
        let z = field(("1", "-1"), ("3", "1"), "y");
        assert_eq!(z.sliding_field(vec2(0.0, 0.0)).unwrap(), vec2(2.0, 0.0));
    }

    #[test]
    fn sliding_field_rejects_crossing_points() {
        let z = field(("1", "1"), ("1", "1"), "y");
        assert!(matches!(
            z.sliding_field(vec2(0.0, 0.0)),
            Err(Error::NotSlidingRegion(..))
        ));
    }

    #[test]
    fn sliding_field_scale_equivariance() {
        // Replacing f by c*f (c > 0) leaves the sliding field unchanged.
        let z = field(("x", "-1"), ("x", "1"), "y");
        let z_scaled = field(("x", "-1"), ("x", "1"), "37.5 * y");
        for c in [-0.9, 0.1, 0.5] {
            let a = z.sliding_field(vec2(c, 0.0)).unwrap();
            let b = z_scaled.sliding_field(vec2(c, 0.0)).unwrap();
            assert!((a - b).norm() <= 1e-9);
        }
    }
}
