//! Expression language for scalar and 2-vector fields on the plane.
//!
//! Expressions are parsed from text (see [`parse_scalar`]), are immutable
//! afterwards, and evaluate either to plain values or to first-order jets
//! ([`Jet1`]) carrying exact partial derivatives. The variable set is fixed
//! to `{x, y}`.
//!
//! Deliberately absent from the grammar: `abs`, `sign`, `min`, `max`. The
//! smooth pieces of a Filippov field must be smooth; non-smoothness enters
//! only through the switching function mechanism.

mod jet;
mod parser;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

pub use jet::Jet1;
pub use parser::parse_scalar;

use crate::error::{DomainErrorKind, EvalError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Atan,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Atan => "atan",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "atan" => Func::Atan,
            _ => return None,
        })
    }
}

/// Immutable expression tree over `{x, y}`. Evaluation is deterministic:
/// identical tree and identical inputs give bit-identical outputs.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarExpr {
    Num(f64),
    Var(Var),
    Neg(Arc<ScalarExpr>),
    Bin(BinOp, Arc<ScalarExpr>, Arc<ScalarExpr>),
    Call(Func, Arc<ScalarExpr>),
}

impl ScalarExpr {
    pub fn num(v: f64) -> Self {
        ScalarExpr::Num(v)
    }

    pub fn var_x() -> Self {
        ScalarExpr::Var(Var::X)
    }

    pub fn var_y() -> Self {
        ScalarExpr::Var(Var::Y)
    }

    pub fn pow_int(self, n: i32) -> Self {
        ScalarExpr::Bin(BinOp::Pow, Arc::new(self), Arc::new(ScalarExpr::num(n as f64)))
    }

    pub fn call(func: Func, arg: ScalarExpr) -> Self {
        ScalarExpr::Call(func, Arc::new(arg))
    }

    /// Evaluate the value only.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.eval_jet(x, y)?.value)
    }

    /// Evaluate the value together with its exact partial derivatives.
    pub fn eval_jet(&self, x: f64, y: f64) -> Result<Jet1> {
        let jet = self.jet_inner(x, y)?;
        if !jet.value.is_finite() || !jet.dx.is_finite() || !jet.dy.is_finite() {
            return Err(self.domain_error(DomainErrorKind::NonFinite).into());
        }
        Ok(jet)
    }

    fn jet_inner(&self, x: f64, y: f64) -> Result<Jet1> {
        match self {
            ScalarExpr::Num(v) => Ok(Jet1::constant(*v)),
            ScalarExpr::Var(Var::X) => Ok(Jet1::var_x(x)),
            ScalarExpr::Var(Var::Y) => Ok(Jet1::var_y(y)),
            ScalarExpr::Neg(inner) => Ok(-inner.jet_inner(x, y)?),
            ScalarExpr::Bin(op, lhs, rhs) => {
                let a = lhs.jet_inner(x, y)?;
                match op {
                    BinOp::Add => Ok(a + rhs.jet_inner(x, y)?),
                    BinOp::Sub => Ok(a - rhs.jet_inner(x, y)?),
                    BinOp::Mul => Ok(a * rhs.jet_inner(x, y)?),
                    BinOp::Div => {
                        let b = rhs.jet_inner(x, y)?;
                        a.checked_div(b).map_err(|k| self.domain_error(k).into())
                    }
                    BinOp::Pow => {
                        let b = rhs.jet_inner(x, y)?;
                        // Constant integer exponents use repeated multiplication;
                        // anything else goes through exp(v ln u).
                        let is_const_int = b.dx == 0.0
                            && b.dy == 0.0
                            && b.value.fract() == 0.0
                            && b.value.abs() <= i32::MAX as f64;
                        if is_const_int {
                            a.powi(b.value as i32).map_err(|k| self.domain_error(k).into())
                        } else {
                            a.powf(b).map_err(|k| self.domain_error(k).into())
                        }
                    }
                }
            }
            ScalarExpr::Call(func, arg) => {
                let a = arg.jet_inner(x, y)?;
                match func {
                    Func::Sin => Ok(a.sin()),
                    Func::Cos => Ok(a.cos()),
                    Func::Tan => Ok(a.tan()),
                    Func::Exp => Ok(a.exp()),
                    Func::Atan => Ok(a.atan()),
                    Func::Log => a.ln().map_err(|k| self.domain_error(k).into()),
                    Func::Sqrt => a.sqrt().map_err(|k| self.domain_error(k).into()),
                }
            }
        }
    }

    fn domain_error(&self, reason: DomainErrorKind) -> EvalError {
        EvalError {
            subexpr: self.to_string(),
            reason,
        }
    }
}

/// Fully parenthesized printing. `parse_scalar(expr.to_string())` yields a
/// structurally identical tree for any tree whose numeric literals are
/// non-negative (the parser itself never produces negative literals; a
/// leading minus parses as negation).
impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarExpr::Num(v) => write!(f, "{v}"),
            ScalarExpr::Var(Var::X) => write!(f, "x"),
            ScalarExpr::Var(Var::Y) => write!(f, "y"),
            ScalarExpr::Neg(inner) => write!(f, "(-{inner})"),
            ScalarExpr::Bin(op, lhs, rhs) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({lhs} {sym} {rhs})")
            }
            ScalarExpr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

impl Add for ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::Bin(BinOp::Add, Arc::new(self), Arc::new(rhs))
    }
}

impl Sub for ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::Bin(BinOp::Sub, Arc::new(self), Arc::new(rhs))
    }
}

impl Mul for ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::Bin(BinOp::Mul, Arc::new(self), Arc::new(rhs))
    }
}

impl Div for ScalarExpr {
    type Output = ScalarExpr;
    fn div(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::Bin(BinOp::Div, Arc::new(self), Arc::new(rhs))
    }
}

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::Neg(Arc::new(self))
    }
}

/// A 2-component vector field given by one expression per component.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldExpr {
    pub fx: ScalarExpr,
    pub fy: ScalarExpr,
}

impl VectorFieldExpr {
    pub fn new(fx: ScalarExpr, fy: ScalarExpr) -> Self {
        VectorFieldExpr { fx, fy }
    }

    pub fn parse(fx: &str, fy: &str) -> Result<Self> {
        Ok(VectorFieldExpr {
            fx: parse_scalar(fx)?,
            fy: parse_scalar(fy)?,
        })
    }

    /// Componentwise evaluation.
    pub fn eval(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        Ok((self.fx.eval(x, y)?, self.fy.eval(x, y)?))
    }

    /// Componentwise jets; rows of the Jacobian are the gradients.
    pub fn eval_jet(&self, x: f64, y: f64) -> Result<(Jet1, Jet1)> {
        Ok((self.fx.eval_jet(x, y)?, self.fy.eval_jet(x, y)?))
    }
}

impl fmt::Display for VectorFieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.fx, self.fy)
    }
}
