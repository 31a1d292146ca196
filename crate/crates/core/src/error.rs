use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("invalid spherical quadrature: {0}")]
    InvalidQuadrature(&'static str),

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("grid or quadrature mismatch between operands")]
    GridMismatch,

    #[error("grid too coarse: {count} points, stencil needs {needed}")]
    GridTooCoarse { count: usize, needed: usize },

    #[error("radial-only quadrature cannot carry non-radial data")]
    NonRadialData,

    #[error("shift {shift} exceeds the grid span {span}")]
    ShiftTooLarge { shift: f64, span: f64 },

    #[error("time {0} outside the supported range")]
    TimeOutOfRange(f64),

    #[error("pad width {pad} below the required {required}")]
    PaddingTooSmall { pad: f64, required: f64 },

    #[error("boundary leakage {leakage:e} exceeds tolerance {tolerance:e}")]
    Leakage { leakage: f64, tolerance: f64 },

    #[error("exponent {0} outside the admissible range")]
    InvalidExponent(f64),

    #[error("supremum over the time grid attained at endpoint t = {t}; widen the grid")]
    BesovEndpoint { t: f64 },

    #[error("trial function vanishes identically")]
    NullFunction,

    #[error("unknown inequality id `{0}`")]
    UnknownInequality(String),

    #[error("parameter {name} = {value} outside domain: {reason}")]
    ParameterDomain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("support violation: |value| = {magnitude:e} at s = {s} outside [-{limit}, {limit}]")]
    SupportViolation { magnitude: f64, s: f64, limit: f64 },

    #[error("{0} has an explicit constant; nothing to estimate")]
    ExplicitConstant(String),

    #[error("no trial families supplied")]
    EmptyFamilies,

    #[error("search budget {budget} below the minimum {minimum}")]
    BudgetTooSmall { budget: usize, minimum: usize },

    #[error("every evaluation failed; last error: {0}")]
    AllEvaluationsFailed(String),

    #[error("counterexample for {id}: ratio {ratio} with margin {margin:e}")]
    Counterexample {
        id: String,
        params: alloc::vec::Vec<f64>,
        ratio: f64,
        margin: f64,
    },
}

pub type Result<T> = core::result::Result<T, Error>;
