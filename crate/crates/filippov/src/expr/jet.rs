use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::DomainErrorKind;

/// First-order jet: a value together with its exact partial derivatives
/// with respect to the two plane coordinates.
///
/// Arithmetic follows the product/chain rules exactly, so there is no
/// finite-difference truncation anywhere downstream (tangency detection
/// compares Lie derivatives against zero and cannot tolerate it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub dx: f64,
    pub dy: f64,
}

impl Jet1 {
    pub const fn constant(value: f64) -> Self {
        Jet1 { value, dx: 0.0, dy: 0.0 }
    }

    /// Jet of the coordinate function x at (x, y).
    pub const fn var_x(value: f64) -> Self {
        Jet1 { value, dx: 1.0, dy: 0.0 }
    }

    /// Jet of the coordinate function y at (x, y).
    pub const fn var_y(value: f64) -> Self {
        Jet1 { value, dx: 0.0, dy: 1.0 }
    }

    pub fn gradient(&self) -> (f64, f64) {
        (self.dx, self.dy)
    }

    fn chain(self, value: f64, outer_deriv: f64) -> Self {
        Jet1 {
            value,
            dx: outer_deriv * self.dx,
            dy: outer_deriv * self.dy,
        }
    }

    pub fn sin(self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }

    pub fn cos(self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }

    pub fn tan(self) -> Self {
        let t = self.value.tan();
        self.chain(t, 1.0 + t * t)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }

    pub fn atan(self) -> Self {
        self.chain(self.value.atan(), 1.0 / (1.0 + self.value * self.value))
    }

    pub fn ln(self) -> Result<Self, DomainErrorKind> {
        if self.value <= 0.0 {
            return Err(DomainErrorKind::LogNonPositive);
        }
        Ok(self.chain(self.value.ln(), 1.0 / self.value))
    }

    pub fn sqrt(self) -> Result<Self, DomainErrorKind> {
        if self.value < 0.0 {
            return Err(DomainErrorKind::SqrtNegative);
        }
        if self.value == 0.0 {
            // sqrt of an exact constant zero is fine; a varying argument has
            // an unbounded derivative there.
            if self.dx == 0.0 && self.dy == 0.0 {
                return Ok(Jet1::constant(0.0));
            }
            return Err(DomainErrorKind::SqrtZeroDerivative);
        }
        let s = self.value.sqrt();
        Ok(self.chain(s, 0.5 / s))
    }

    pub fn checked_div(self, rhs: Jet1) -> Result<Self, DomainErrorKind> {
        if rhs.value == 0.0 {
            return Err(DomainErrorKind::DivisionByZero);
        }
        Ok(self / rhs)
    }

    /// Integer power by repeated multiplication (exact product rule).
    pub fn powi(self, n: i32) -> Result<Self, DomainErrorKind> {
        if n == 0 {
            return Ok(Jet1::constant(1.0));
        }
        let mut result = Jet1::constant(1.0);
        for _ in 0..n.unsigned_abs() {
            result = result * self;
        }
        if n < 0 {
            Jet1::constant(1.0).checked_div(result)
        } else {
            Ok(result)
        }
    }

    /// General power u^v via exp(v ln u); requires a positive base.
    pub fn powf(self, exponent: Jet1) -> Result<Self, DomainErrorKind> {
        if self.value <= 0.0 {
            return Err(DomainErrorKind::PowNonPositiveBase);
        }
        let ln_base = self.ln()?;
        Ok((exponent * ln_base).exp())
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, rhs: Jet1) -> Jet1 {
        Jet1 {
            value: self.value + rhs.value,
            dx: self.dx + rhs.dx,
            dy: self.dy + rhs.dy,
        }
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, rhs: Jet1) -> Jet1 {
        Jet1 {
            value: self.value - rhs.value,
            dx: self.dx - rhs.dx,
            dy: self.dy - rhs.dy,
        }
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, rhs: Jet1) -> Jet1 {
        Jet1 {
            value: self.value * rhs.value,
            dx: self.dx * rhs.value + self.value * rhs.dx,
            dy: self.dy * rhs.value + self.value * rhs.dy,
        }
    }
}

impl Div for Jet1 {
    type Output = Jet1;
    /// Quotient rule; the caller is responsible for a nonzero denominator
    /// (see [`Jet1::checked_div`]).
    fn div(self, rhs: Jet1) -> Jet1 {
        let inv = 1.0 / rhs.value;
        let value = self.value * inv;
        Jet1 {
            value,
            dx: (self.dx - value * rhs.dx) * inv,
            dy: (self.dy - value * rhs.dy) * inv,
        }
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        Jet1 {
            value: -self.value,
            dx: -self.dx,
            dy: -self.dy,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_have_zero_partials() {
        let c = Jet1::constant(7.0);
        assert_eq!(c.dx, 0.0);
        assert_eq!(c.dy, 0.0);
    }

    #[test]
    fn coordinate_jets() {
        let x = Jet1::var_x(2.0);
        assert_eq!((x.dx, x.dy), (1.0, 0.0));
        let y = Jet1::var_y(3.0);
        assert_eq!((y.dx, y.dy), (0.0, 1.0));
    }

    #[test]
    fn product_rule_is_exact() {
        // d/dx (x*y) = y, d/dy (x*y) = x at (2, 5)
        let p = Jet1::var_x(2.0) * Jet1::var_y(5.0);
        assert_eq!(p.value, 10.0);
        assert_eq!(p.dx, 5.0);
        assert_eq!(p.dy, 2.0);
    }

    #[test]
    fn integer_power_uses_repeated_multiplication() {
        let x = Jet1::var_x(3.0);
        let p = x.powi(4).unwrap();
        assert_eq!(p.value, 81.0);
        assert_eq!(p.dx, 4.0 * 27.0);
        let inv = x.powi(-2).unwrap();
        assert!((inv.value - 1.0 / 9.0).abs() < 1e-15);
        assert!((inv.dx + 2.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn sqrt_domain() {
        assert!(Jet1::var_x(-1.0).sqrt().is_err());
        assert!(Jet1::var_x(0.0).sqrt().is_err());
        assert_eq!(Jet1::constant(0.0).sqrt().unwrap(), Jet1::constant(0.0));
        let s = Jet1::var_x(4.0).sqrt().unwrap();
        assert_eq!(s.value, 2.0);
        assert_eq!(s.dx, 0.25);
    }

    #[test]
    fn powf_requires_positive_base() {
        let x = Jet1::var_x(-2.0);
        assert_eq!(
            x.powf(Jet1::constant(0.5)).unwrap_err(),
            DomainErrorKind::PowNonPositiveBase
        );
        // x^1.5 at x = 4: value 8, derivative 1.5 * 4^0.5 = 3
        let p = Jet1::var_x(4.0).powf(Jet1::constant(1.5)).unwrap();
        assert!((p.value - 8.0).abs() < 1e-12);
        assert!((p.dx - 3.0).abs() < 1e-12);
    }
}
