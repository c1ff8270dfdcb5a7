use thiserror::Error;

/// Errors raised while parsing expression text.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { offset: usize, name: String },
    #[error("unknown variable `{name}` at offset {offset}")]
    UnknownVariable { offset: usize, name: String },
}

/// Errors raised while evaluating an expression (value or jet).
#[derive(Debug, Clone, PartialEq, Error)]
#[error("domain error in `{subexpr}`: {reason}")]
pub struct EvalError {
    /// Printed form of the sub-expression that failed.
    pub subexpr: String,
    pub reason: DomainErrorKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DomainErrorKind {
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of a non-positive value")]
    LogNonPositive,
    #[error("square root of a negative value")]
    SqrtNegative,
    #[error("square root derivative undefined at zero")]
    SqrtZeroDerivative,
    #[error("non-integer exponent requires a positive base")]
    PowNonPositiveBase,
    #[error("non-finite result")]
    NonFinite,
}

/// Crate-wide error type covering geometry, search, and index computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),

    // -- switching-surface and classification errors --
    #[error("point ({0}, {1}) is not on the switching set: |f| = {2:e} exceeds tolerance {3:e}")]
    NotOnSigma(f64, f64, f64, f64),
    #[error("degenerate switching function at ({0}, {1}): |grad f| = {2:e} <= 1e-9 (0 must be a regular value)")]
    DegenerateSwitch(f64, f64, f64),
    #[error("point ({0}, {1}) is not in the sliding or escaping region (lie+ = {2:e}, lie- = {3:e})")]
    NotSlidingRegion(f64, f64, f64, f64),
    #[error("sliding vector at ({0}, {1}) is not tangent to the switching set (relative normal component {2:e})")]
    SlidingNotTangent(f64, f64, f64),

    // -- winding / index errors --
    #[error("field vanishes on the arc: minimum norm {0:e} <= tolerance {1:e}")]
    FieldVanishesOnArc(f64, f64),
    #[error("degenerate determinant in corner function: |det| = {0:e}")]
    DegenerateDeterminant(f64),
    #[error("segment between the two corner vectors passes through the origin (anti-parallel pair)")]
    SegmentThroughOrigin,
    #[error("singularity on the ball boundary at ({0}, {1}): {2}")]
    SingularityOnBoundary(f64, f64, String),
    #[error("boundary circle does not intersect the switching set transversally ({0})")]
    NonTransversalIntersection(String),
    #[error("winding total {0} is not within {2:e} of an integer (residual {1:e})")]
    IntegerResidualTooLarge(f64, f64, f64),
    #[error("no admissible isolation radius for singularity at ({0}, {1})")]
    NotIsolated(f64, f64),
    #[error("index changed from {0} to {1} when halving the radius (radius invariance violated)")]
    RadiusDisagreement(i64, i64),
    #[error("ball of radius {2} at ({0}, {1}) is not contained in the field domain")]
    BallOutsideDomain(f64, f64, f64),

    // -- regularization errors --
    #[error("transition function failed the monotonicity probe at s = {0}")]
    NonMonotonicTransition(f64),
    #[error("regularized field vanishes on the boundary for every epsilon tried (last epsilon {0:e})")]
    EpsilonExhausted(f64),

    // -- manifold errors --
    #[error("degenerate jacobian of the chart map at probe point ({0}, {1}): |det| = {2:e}")]
    DegenerateJacobian(f64, f64, f64),
    #[error("map pair is not inverse at probe point ({0}, {1}): round-trip error {2:e}")]
    MapsNotInverse(f64, f64, f64),
    #[error("singularity at ({0}, {1}) in chart `{2}` is too close to the chart boundary")]
    SingularityTooCloseToChartBoundary(f64, f64, String),
    #[error("singularities at ({0}, {1}) and ({2}, {3}) are too close to be isolated")]
    NonIsolatedSingularity(f64, f64, f64, f64),
    #[error("chart `{0}` not found in the atlas")]
    UnknownChart(String),
    #[error("chart fields disagree on overlap of `{0}` and `{1}` at sample ({2}, {3}): difference {4:e}")]
    OverlapMismatch(String, String, f64, f64, f64),
    #[error("indices computed in charts `{0}` and `{1}` disagree: {2} vs {3}")]
    ChartDisagreement(String, String, i64, i64),
}

pub type Result<T> = std::result::Result<T, Error>;
