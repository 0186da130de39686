use thiserror::Error;

/// Errors raised by the library. Negative mathematical outcomes (an
/// infeasible constraint count, a failed certificate) are reported through
/// result structs, not through this type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("the zero polynomial has no roots or inverses")]
    ZeroPolynomial,
    #[error("scaling argument must be nonzero")]
    ZeroScale,
    #[error("q must lie in (0,1), got {0}")]
    InvalidQ(f64),
    #[error("q = {0} is too close to 1 for the truncated triple product; use q < 0.9")]
    QTooLarge(f64),
    #[error("P has a root {root} of modulus {modulus}, which lies on |z| = q^(+-1)")]
    RootOnCriticalCircle { root: String, modulus: f64 },
    #[error("P is not invariant under z -> conj(P)(1/z) (defect {0:e}); the conjugation is undefined")]
    NotSelfConjugate(f64),
    #[error("root at the origin is not allowed here")]
    RootAtOrigin,
    #[error("argument 0 is not allowed")]
    ZeroArgument,
    #[error("evaluation point {point} lies within {distance:e} of the pole orbit of {pole}")]
    EvaluationSingularity {
        point: String,
        pole: String,
        distance: f64,
    },
    #[error("a pole orbit passes within {distance:e} of the circle |z| = {radius}")]
    PoleNearCircle { radius: f64, distance: f64 },
    #[error("window [-{have}, {have}] too small, need at least {need}")]
    WindowTooSmall { have: i64, need: i64 },
    #[error("sample count {0} must be a power of two and at least 8 times the window")]
    BadSampleCount(usize),
    #[error("pole product modulus {found} differs from q^-M = {expected}")]
    GaugeModulus { found: f64, expected: f64 },
    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
