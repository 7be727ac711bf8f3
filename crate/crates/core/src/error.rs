use thiserror::Error;

/// Errors raised by the numeric kernel, the concrete models and the harness.
///
/// An undefined orthogonal sum is not an error; see [`crate::effect::OrthSum`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("eigenvalue {value:.3e} lies below the clamp slack")]
    NegativeEigenvalue { value: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("vector is not a unit vector (norm {norm})")]
    NotUnitVector { norm: f64 },
    #[error("model mismatch: {left} vs {right}")]
    ModelMismatch { left: String, right: String },
    #[error("scalar {0} is outside [0, 1]")]
    ScalarOutOfRange(f64),
    #[error("payload is not an effect: {0}")]
    NotAnEffect(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("coefficient {0} is outside [0, 1]")]
    CoefficientOutOfRange(f64),
    #[error("effect is not a one-dimensional sharp element")]
    NotOneDimensionalSharp,
    #[error("polynomial evaluation leaves the effect interval: {0}")]
    ResultNotEffect(String),
    #[error("coefficients {0} and {1} collide at the cluster tolerance")]
    DuplicateCoefficients(usize, usize),
    #[error("effect does not match the stated decomposition (residual {0:.3e})")]
    InconsistentDecomposition(f64),
    #[error("conditioning on an effect of probability {0:.3e}")]
    ConditioningOnNull(f64),
    #[error("measurement element {0} is not sharp")]
    MeasurementNotSharp(usize),
    #[error("every measurement element has null probability")]
    AllWeightsNull,
    #[error("contexts share an atom")]
    ContextsNotDisjoint,
    #[error("witness context lies within {0:.3e} of an input context")]
    WitnessNotDistinct(f64),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("not a measurement: {0}")]
    InvalidMeasurement(String),
    #[error("not a context: {0}")]
    InvalidContext(String),
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("unknown suite `{0}`")]
    InvalidSuiteName(String),
    #[error("unknown axiom `{0}`")]
    UnknownAxiom(String),
    #[error("instance is missing `{0}`")]
    MissingField(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
