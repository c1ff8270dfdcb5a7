//! Transition-function regularization of a Filippov field and the smooth
//! index it induces, used throughout the suites as the independent oracle
//! for the corner-based index.
//!
//! The blended field is
//! `Z_eps = (1 + phi(f/eps))/2 * F+  +  (1 - phi(f/eps))/2 * F-`,
//! which coincides with `F+` where `f >= eps` and with `F-` where
//! `f <= -eps`.

use std::fmt;
use std::sync::Arc;

use crate::defaults;
use crate::error::{Error, Result};
use crate::field::PlanarFilippovField;
use crate::geom::Vec2;
use crate::winding::{sweep_values_along_arc, ArcSpec, SweepResult};

/// Monotonic transition profile: `phi(s) = sign(s)` for `|s| >= 1`,
/// `phi' > 0` on `(-1, 1)`, continuously differentiable.
#[derive(Clone)]
pub struct TransitionFunction {
    kind: TransitionKind,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    deriv: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TransitionKind {
    Polynomial,
    Trigonometric,
    Custom(String),
}

impl fmt::Debug for TransitionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransitionFunction")
            .field("kind", &self.kind)
            .finish()
    }
}

impl fmt::Display for TransitionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TransitionKind::Polynomial => write!(f, "polynomial"),
            TransitionKind::Trigonometric => write!(f, "trigonometric"),
            TransitionKind::Custom(name) => write!(f, "custom:{name}"),
        }
    }
}

impl TransitionFunction {
    /// `phi(s) = s (3 - s^2) / 2` on `[-1, 1]`; `phi'(+-1) = 0`.
    pub fn polynomial() -> TransitionFunction {
        TransitionFunction {
            kind: TransitionKind::Polynomial,
            eval: Arc::new(|s: f64| {
                if s >= 1.0 {
                    1.0
                } else if s <= -1.0 {
                    -1.0
                } else {
                    s * (3.0 - s * s) / 2.0
                }
            }),
            deriv: Arc::new(|s: f64| {
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    1.5 * (1.0 - s * s)
                }
            }),
        }
    }

    /// `phi(s) = sin(pi s / 2)` on `[-1, 1]`; `phi'(+-1) = 0`.
    pub fn trigonometric() -> TransitionFunction {
        TransitionFunction {
            kind: TransitionKind::Trigonometric,
            eval: Arc::new(|s: f64| {
                if s >= 1.0 {
                    1.0
                } else if s <= -1.0 {
                    -1.0
                } else {
                    (std::f64::consts::FRAC_PI_2 * s).sin()
                }
            }),
            deriv: Arc::new(|s: f64| {
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    std::f64::consts::FRAC_PI_2 * (std::f64::consts::FRAC_PI_2 * s).cos()
                }
            }),
        }
    }

    /// Both built-in profiles, in a fixed order.
    pub fn builtins() -> [TransitionFunction; 2] {
        [
            TransitionFunction::polynomial(),
            TransitionFunction::trigonometric(),
        ]
    }

    /// A user-supplied profile, accepted after a numeric probe: strictly
    /// increasing across 1001 points of `(-1, 1)` and saturating at the
    /// endpoints.
    pub fn custom(
        name: &str,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        deriv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<TransitionFunction> {
        const PROBE: usize = 1001;
        let mut prev = f64::NEG_INFINITY;
        for k in 0..PROBE {
            let s = -1.0 + 2.0 * (k as f64 + 0.5) / PROBE as f64;
            let v = eval(s);
            if v <= prev {
                return Err(Error::NonMonotonicTransition(s));
            }
            if deriv(s) <= 0.0 {
                return Err(Error::NonMonotonicTransition(s));
            }
            prev = v;
        }
        if (eval(1.0) - 1.0).abs() > 1e-12 || (eval(-1.0) + 1.0).abs() > 1e-12 {
            return Err(Error::NonMonotonicTransition(1.0));
        }
        Ok(TransitionFunction {
            kind: TransitionKind::Custom(name.to_string()),
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
        })
    }

    pub fn kind(&self) -> &TransitionKind {
        &self.kind
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.eval)(s)
    }

    pub fn deriv(&self, s: f64) -> f64 {
        (self.deriv)(s)
    }
}

/// A Filippov field blended across the band `|f| < eps`.
#[derive(Debug, Clone)]
pub struct RegularizedField<'a> {
    pub base: &'a PlanarFilippovField,
    pub epsilon: f64,
    pub phi: TransitionFunction,
}

impl<'a> RegularizedField<'a> {
    pub fn new(base: &'a PlanarFilippovField, epsilon: f64, phi: TransitionFunction) -> Self {
        assert!(epsilon > 0.0, "epsilon must be positive");
        RegularizedField { base, epsilon, phi }
    }

    /// `((1 + phi(f/eps))/2) F+ + ((1 - phi(f/eps))/2) F-`.
    pub fn eval(&self, p: Vec2) -> Result<Vec2> {
        let f_val = self.base.switch.eval(p)?;
        let s = self.phi.eval(f_val / self.epsilon);
        // Exact band agreement: skip the unused piece outside the band.
        if s == 1.0 {
            return self.base.f_plus.eval(p);
        }
        if s == -1.0 {
            return self.base.f_minus.eval(p);
        }
        let fp = self.base.f_plus.eval(p)?;
        let fm = self.base.f_minus.eval(p)?;
        Ok(fp * (0.5 * (1.0 + s)) + fm * (0.5 * (1.0 - s)))
    }
}

/// Smooth rotation number of the regularized field around the circle.
/// Fails with [`Error::FieldVanishesOnArc`] when `eps` is not yet small
/// enough for the boundary to be free of zeros.
pub fn regularized_index(reg: &RegularizedField<'_>, center: Vec2, radius: f64) -> Result<i64> {
    let arc = ArcSpec::full_circle(center, radius);
    let sweep: SweepResult =
        sweep_values_along_arc(|p| reg.eval(p), &arc, defaults::RESIDUAL_TOL)?;
    let raw = sweep.total_angle / std::f64::consts::TAU;
    let nearest = raw.round();
    let residual = (raw - nearest).abs();
    if residual > defaults::INTEGER_RESIDUAL_TOL {
        return Err(Error::IntegerResidualTooLarge(
            raw,
            residual,
            defaults::INTEGER_RESIDUAL_TOL,
        ));
    }
    Ok(nearest as i64)
}

/// Like [`regularized_index`], halving `eps` (at most
/// [`defaults::EPS_RETRY_MAX`] times) whenever the regularized field still
/// vanishes on the boundary; returns the index with the epsilon that
/// succeeded.
pub fn regularized_index_with_retry(
    base: &PlanarFilippovField,
    phi: &TransitionFunction,
    epsilon: f64,
    center: Vec2,
    radius: f64,
) -> Result<(i64, f64)> {
    let mut eps = epsilon;
    for _ in 0..=defaults::EPS_RETRY_MAX {
        let reg = RegularizedField::new(base, eps, phi.clone());
        match regularized_index(&reg, center, radius) {
            Ok(index) => return Ok((index, eps)),
            Err(Error::FieldVanishesOnArc(..)) => eps *= 0.5,
            Err(other) => return Err(other),
        }
    }
    Err(Error::EpsilonExhausted(eps))
}

/// One regularized-index evaluation inside an invariance report.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InvarianceEntry {
    pub phi: String,
    /// Epsilon requested by the caller.
    pub epsilon: f64,
    /// Epsilon actually used after the halving retries.
    pub epsilon_used: f64,
    pub index: Option<i64>,
    pub error: Option<String>,
}

/// Comparison of the corner-based index with the regularized index over an
/// epsilon ladder and every built-in transition function.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InvarianceReport {
    pub filippov_index: i64,
    pub entries: Vec<InvarianceEntry>,
    /// True when every entry produced the same integer as the corner-based
    /// index.
    pub invariant: bool,
}

/// Compute the corner-based ball index and the regularized index for each
/// epsilon and each built-in transition function; per-epsilon failures are
/// recorded, not raised.
pub fn check_invariance(
    z: &PlanarFilippovField,
    center: Vec2,
    radius: f64,
    eps_list: &[f64],
) -> Result<InvarianceReport> {
    let filippov_index = crate::winding::filippov_index_on_ball(z, center, radius)?.index;
    let mut entries = Vec::new();
    let mut invariant = true;
    for phi in TransitionFunction::builtins() {
        for &eps in eps_list {
            match regularized_index_with_retry(z, &phi, eps, center, radius) {
                Ok((index, eps_used)) => {
                    if index != filippov_index {
                        invariant = false;
                    }
                    entries.push(InvarianceEntry {
                        phi: phi.to_string(),
                        epsilon: eps,
                        epsilon_used: eps_used,
                        index: Some(index),
                        error: None,
                    });
                }
                Err(err) => {
                    invariant = false;
                    entries.push(InvarianceEntry {
                        phi: phi.to_string(),
                        epsilon: eps,
                        epsilon_used: eps,
                        index: None,
                        error: Some(err.to_string()),
                    });
                }
            }
        }
    }
    Ok(InvarianceReport {
        filippov_index,
        entries,
        invariant,
    })
}
