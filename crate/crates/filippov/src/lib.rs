//! Index theory for planar Filippov vector fields and for Filippov fields
//! on 2-dimensional compact surfaces.
//!
//! The crate models a piecewise-smooth field `Z = (F+, F-)_f` whose pieces
//! switch across the zero set of a scalar function `f`, classifies the
//! switching set into crossing/sliding/escaping regions, locates all
//! singularities (equilibria of the pieces, boundary equilibria,
//! pseudo-equilibria, tangential points), and computes an integer index for
//! each by accumulating the rotation of the field along circle arcs plus
//! closed-form corner corrections where the circle crosses the switching
//! set. A transition-function regularization provides an independent route
//! to the same integer, used throughout the test suites as an oracle.
//! On atlases of charts the per-singularity indices sum to the declared
//! Euler characteristic.
//!
//! Modules:
//! - [`expr`]: expression parsing and forward-mode jets.
//! - [`field`]: the planar field model, region classification, sliding
//!   dynamics, and singularity search.
//! - [`winding`]: arc sweeps, corner corrections, and ball/singularity
//!   indices, plus perturbation-hypothesis checking.
//! - [`regularization`]: transition functions, the blended field, and the
//!   regularized index.
//! - [`manifold`]: chart atlases, pushforwards, built-in sphere and torus,
//!   and the index-sum check.
//! - [`corpus`]: a catalog of ready-made fields used by the regression
//!   suites and handy as usage examples.

pub mod corpus;
pub mod expr;
pub mod field;
pub mod geom;
pub mod manifold;
pub mod regularization;
pub mod winding;

mod error;

pub use error::{DomainErrorKind, Error, EvalError, ParseError, Result};

/// Centralized numeric defaults. Every tolerance used by the crate is
/// defined here; scenario files may override the configurable ones.
pub mod defaults {
    /// Residual tolerance for reported roots and tangency checks.
    pub const RESIDUAL_TOL: f64 = 1e-9;
    /// Tolerance for Lie-derivative sign classification; anything closer
    /// to zero is tangential, never silently assigned a sign.
    pub const CLASS_TOL: f64 = 1e-7;
    /// Default cells per axis for grid searches.
    pub const GRID_N: usize = 64;
    /// Minimum switching-gradient norm; below this, 0 is not treated as a
    /// regular value and the computation is refused.
    pub const GRAD_MIN: f64 = 1e-9;
    /// A raw winding divided by 2 pi must be within this of an integer.
    pub const INTEGER_RESIDUAL_TOL: f64 = 1e-6;
    /// Relative determinant threshold for corner degeneracy.
    pub const DET_REL_TOL: f64 = 1e-12;
    /// Arc sweep: every interval is refined to at most this fraction of the
    /// parameter range.
    pub const SWEEP_MAX_STEP_FRACTION: f64 = 1e-3;
    /// Arc sweep: every interval is refined until the angle increment is at
    /// most pi/4.
    pub const SWEEP_MAX_ANGLE: f64 = std::f64::consts::FRAC_PI_4;
    /// Newton iteration cap for 2-D root polishing.
    pub const NEWTON_MAX_ITER: usize = 50;
    /// Bisection iteration cap.
    pub const BISECT_MAX_ITER: usize = 80;
    /// Default epsilon ladder for regularization checks.
    pub const EPS_LIST: [f64; 3] = [1e-1, 1e-2, 1e-3];
    /// Epsilon is halved at most this many times when the regularized field
    /// vanishes on the boundary circle.
    pub const EPS_RETRY_MAX: usize = 20;
    /// Roots closer than this multiple of the residual tolerance merge.
    pub const MERGE_FACTOR: f64 = 10.0;
    /// Manifold atlases identify points across charts within this distance.
    pub const CHART_DEDUP_TOL: f64 = 1e-6;
    /// Chart overlap consistency probes allow this much field mismatch.
    pub const OVERLAP_TOL: f64 = 1e-6;
    /// Chart maps must round-trip to identity within this at probe points.
    pub const CHART_ROUNDTRIP_TOL: f64 = 1e-9;
}
