use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("operator is not hermitian (max |O - O^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not a projector (max |P^2 - P| = {deviation:e})")]
    NotProjector { deviation: f64 },

    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("invalid projection-valued measure: {0}")]
    InvalidPvm(String),

    #[error("unknown outcome `{0}`")]
    UnknownOutcome(String),

    #[error("outcome `{outcome}` is impossible in this state (probability {probability:e})")]
    ImpossibleOutcome { outcome: String, probability: f64 },

    #[error("projectors do not commute (max |[A, B]| = {norm:e})")]
    NonCommuting { norm: f64 },

    #[error("witness subspace {which} is empty")]
    EmptySubspace { which: &'static str },

    #[error("observable has eigenvalue {eigenvalue} outside {{-1, +1}}")]
    BadSpectrum { eigenvalue: f64 },

    #[error("no exact distribution for setting pair ({i}, {j})")]
    MissingDistribution { i: usize, j: usize },

    #[error("CHSH evaluation needs exactly 2 settings per side, got {a} x {b}")]
    SettingCount { a: usize, b: usize },

    #[error("setting index ({i}, {j}) out of range")]
    SettingOutOfRange { i: usize, j: usize },

    #[error("unknown test `{0}`")]
    UnknownTest(String),

    #[error("unknown entity state `{0}`")]
    UnknownState(String),

    #[error("invalid entity: {0}")]
    InvalidEntity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("product test disagreed with certification: {positive}/{trials} positive for an actual meet property")]
    ProductTestMismatch { positive: usize, trials: usize },
}
