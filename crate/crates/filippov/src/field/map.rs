//! Evaluable plane maps and fields closed under coordinate changes.
//!
//! A field read from a scenario file is expression-backed and carries exact
//! jets. Pushing a field forward through a diffeomorphism keeps it
//! evaluable by composition: values stay exact (the chain rule only needs
//! first derivatives of the map), while Jacobians of pushed vector fields
//! fall back to central differences because they would need second
//! derivatives of the map.

use crate::error::{Error, Result};
use crate::expr::{Jet1, ScalarExpr, VectorFieldExpr};
use crate::geom::Vec2;

/// A map of the plane given by coordinate expressions, possibly chained,
/// with an optional periodic wrap step (used by torus atlases).
#[derive(Debug, Clone, PartialEq)]
pub enum PlanarMap {
    Exprs { x: ScalarExpr, y: ScalarExpr },
    /// Composition, applied left to right.
    Chain(Vec<PlanarMap>),
    /// Wrap each coordinate into `[-period/2, period/2)`.
    Wrap { period_x: f64, period_y: f64 },
}

impl PlanarMap {
    pub fn identity() -> PlanarMap {
        PlanarMap::Exprs {
            x: ScalarExpr::var_x(),
            y: ScalarExpr::var_y(),
        }
    }

    pub fn from_exprs(x: ScalarExpr, y: ScalarExpr) -> PlanarMap {
        PlanarMap::Exprs { x, y }
    }

    pub fn parse(x: &str, y: &str) -> Result<PlanarMap> {
        Ok(PlanarMap::Exprs {
            x: crate::expr::parse_scalar(x)?,
            y: crate::expr::parse_scalar(y)?,
        })
    }

    pub fn then(self, next: PlanarMap) -> PlanarMap {
        match self {
            PlanarMap::Chain(mut maps) => {
                maps.push(next);
                PlanarMap::Chain(maps)
            }
            first => PlanarMap::Chain(vec![first, next]),
        }
    }

    pub fn eval(&self, p: Vec2) -> Result<Vec2> {
        Ok(self.eval_with_jacobian(p)?.0)
    }

    /// Value and Jacobian, chained exactly through compositions.
    pub fn eval_with_jacobian(&self, p: Vec2) -> Result<(Vec2, [[f64; 2]; 2])> {
        match self {
            PlanarMap::Exprs { x, y } => {
                let jx = x.eval_jet(p.x, p.y)?;
                let jy = y.eval_jet(p.x, p.y)?;
                Ok((
                    Vec2 { x: jx.value, y: jy.value },
                    [[jx.dx, jx.dy], [jy.dx, jy.dy]],
                ))
            }
            PlanarMap::Chain(maps) => {
                let mut point = p;
                let mut jac = [[1.0, 0.0], [0.0, 1.0]];
                for map in maps {
                    let (next, j) = map.eval_with_jacobian(point)?;
                    jac = mat_mul(j, jac);
                    point = next;
                }
                Ok((point, jac))
            }
            PlanarMap::Wrap { period_x, period_y } => Ok((
                Vec2 {
                    x: wrap_coord(p.x, *period_x),
                    y: wrap_coord(p.y, *period_y),
                },
                [[1.0, 0.0], [0.0, 1.0]],
            )),
        }
    }
}

fn wrap_coord(v: f64, period: f64) -> f64 {
    if period <= 0.0 {
        return v;
    }
    let mut w = (v + period / 2.0).rem_euclid(period) - period / 2.0;
    if w >= period / 2.0 {
        w -= period;
    }
    w
}

fn mat_mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// A diffeomorphism given by explicit forward and inverse maps.
#[derive(Debug, Clone, PartialEq)]
pub struct Diffeo {
    pub forward: PlanarMap,
    pub inverse: PlanarMap,
}

impl Diffeo {
    pub fn new(forward: PlanarMap, inverse: PlanarMap) -> Diffeo {
        Diffeo { forward, inverse }
    }

    pub fn inverted(&self) -> Diffeo {
        Diffeo {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// Check forward/inverse consistency and Jacobian regularity at a probe
    /// point.
    pub fn probe(&self, p: Vec2, tol: f64) -> Result<()> {
        let (q, jac) = self.forward.eval_with_jacobian(p)?;
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() <= 1e-9 {
            return Err(Error::DegenerateJacobian(p.x, p.y, det.abs()));
        }
        let back = self.inverse.eval(q)?;
        let err = back.dist(p);
        let scale = 1.0 + p.norm();
        if err > tol * scale {
            return Err(Error::MapsNotInverse(p.x, p.y, err));
        }
        Ok(())
    }
}

/// A 2-vector field closed under pushforward by diffeomorphisms.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorField {
    Exprs(VectorFieldExpr),
    Pushforward {
        base: Box<VectorField>,
        map: Box<Diffeo>,
    },
}

impl VectorField {
    pub fn parse(fx: &str, fy: &str) -> Result<VectorField> {
        Ok(VectorField::Exprs(VectorFieldExpr::parse(fx, fy)?))
    }

    pub fn eval(&self, p: Vec2) -> Result<Vec2> {
        match self {
            VectorField::Exprs(expr) => {
                let (vx, vy) = expr.eval(p.x, p.y)?;
                Ok(Vec2 { x: vx, y: vy })
            }
            VectorField::Pushforward { base, map } => {
                let source = map.inverse.eval(p)?;
                let (_, jac) = map.forward.eval_with_jacobian(source)?;
                let v = base.eval(source)?;
                Ok(Vec2 {
                    x: jac[0][0] * v.x + jac[0][1] * v.y,
                    y: jac[1][0] * v.x + jac[1][1] * v.y,
                })
            }
        }
    }

    /// Jacobian of the field. Exact (via jets) for expression-backed fields;
    /// central differences for pushforwards, which is only ever consumed by
    /// Newton iterations whose residuals are checked on exact values.
    pub fn jacobian(&self, p: Vec2) -> Result<[[f64; 2]; 2]> {
        match self {
            VectorField::Exprs(expr) => {
                let (jx, jy) = expr.eval_jet(p.x, p.y)?;
                Ok([[jx.dx, jx.dy], [jy.dx, jy.dy]])
            }
            VectorField::Pushforward { .. } => {
                let h = 1e-6 * (1.0 + p.norm());
                let fxp = self.eval(Vec2 { x: p.x + h, y: p.y })?;
                let fxm = self.eval(Vec2 { x: p.x - h, y: p.y })?;
                let fyp = self.eval(Vec2 { x: p.x, y: p.y + h })?;
                let fym = self.eval(Vec2 { x: p.x, y: p.y - h })?;
                let inv = 0.5 / h;
                Ok([
                    [(fxp.x - fxm.x) * inv, (fyp.x - fym.x) * inv],
                    [(fxp.y - fxm.y) * inv, (fyp.y - fym.y) * inv],
                ])
            }
        }
    }

    pub fn pushforward(self, map: Diffeo) -> VectorField {
        VectorField::Pushforward {
            base: Box::new(self),
            map: Box::new(map),
        }
    }
}

/// A scalar field closed under composition with plane maps.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarField {
    Expr(ScalarExpr),
    /// `base(inner(p))`; used for switching functions of pushed fields,
    /// with `inner` the inverse of the coordinate change.
    Composed {
        base: Box<ScalarField>,
        inner: Box<PlanarMap>,
    },
    /// `base(p) - offset`; used to trace level curves other than zero.
    Offset { base: Box<ScalarField>, offset: f64 },
}

impl ScalarField {
    pub fn parse(src: &str) -> Result<ScalarField> {
        Ok(ScalarField::Expr(crate::expr::parse_scalar(src)?))
    }

    pub fn eval(&self, p: Vec2) -> Result<f64> {
        Ok(self.jet(p)?.value)
    }

    /// Value and exact gradient, chained through compositions.
    pub fn jet(&self, p: Vec2) -> Result<Jet1> {
        match self {
            ScalarField::Expr(expr) => expr.eval_jet(p.x, p.y),
            ScalarField::Composed { base, inner } => {
                let (q, jac) = inner.eval_with_jacobian(p)?;
                let j = base.jet(q)?;
                Ok(Jet1 {
                    value: j.value,
                    dx: j.dx * jac[0][0] + j.dy * jac[1][0],
                    dy: j.dx * jac[0][1] + j.dy * jac[1][1],
                })
            }
            ScalarField::Offset { base, offset } => {
                let j = base.jet(p)?;
                Ok(Jet1 {
                    value: j.value - offset,
                    ..j
                })
            }
        }
    }

    pub fn compose_with(self, inner: PlanarMap) -> ScalarField {
        ScalarField::Composed {
            base: Box::new(self),
            inner: Box::new(inner),
        }
    }

    pub fn offset_by(self, offset: f64) -> ScalarField {
        ScalarField::Offset {
            base: Box::new(self),
            offset,
        }
    }
}
