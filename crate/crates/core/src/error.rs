use thiserror::Error;

/// Errors raised by the analytic modules (exterior calculus, Lichnerowicz
/// operators and the Moser engine).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("degree {degree} exceeds manifold dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("operation needs a form of positive degree")]
    DegreeZero,
    #[error("form is degenerate: nondegeneracy margin {margin:e} below threshold {threshold:e}")]
    DegenerateForm { margin: f64, threshold: f64 },
    #[error("form is not locally conformally symplectic: residual {residual:e} exceeds {tolerance:e}")]
    NotLcs { residual: f64, tolerance: f64 },
    #[error("1-form is not closed: |d theta| = {residual:e} exceeds {tolerance:e}")]
    NotClosed { residual: f64, tolerance: f64 },
    #[error("conformal factor must be positive (min value {min:e})")]
    NonPositiveFunction { min: f64 },
    #[error("Lee form has a non-constant potential (|g| = {potential_norm:e}); gauge-normalize first")]
    NonConstantLee { potential_norm: f64 },
    #[error("Lee class drifts along the family: |delta theta_h| = {drift:e} at t = {t}")]
    LeeClassDrift { t: f64, drift: f64 },
    #[error("derivative of the normalized family is not exact at t = {t} (obstruction {obstruction:e}); not certified in canonical gauge")]
    NotExact { t: f64, obstruction: f64 },
    #[error("family is not d_theta-exact with the supplied primitives at t = {t} (residual {residual:e})")]
    NotExactFamily { t: f64, residual: f64 },
    #[error("Lee form derivative is not d h_t at t = {t} (residual {residual:e})")]
    InconsistentLeeDerivative { t: f64, residual: f64 },
    #[error("step count too small: max|X| dt = {displacement:e} exceeds {limit:e}")]
    StepCountTooSmall { displacement: f64, limit: f64 },
    #[error("isotopy diverged at t = {t}: {reason}")]
    IsotopyDiverged { t: f64, reason: String },
    #[error("no component above the ratio threshold at node {node}")]
    NoValidComponents { node: usize },
    #[error("invalid form literal: {0}")]
    Literal(String),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
