use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid algebra configuration: {0}")]
    InvalidConfig(String),

    #[error("monomial of total degree {degree} exceeds the degree cap {cap}")]
    DegreeExceedsCap { degree: u32, cap: u32 },

    #[error("operands use different algebra configurations")]
    ConfigMismatch,

    #[error("dilation radius {0} outside (0, 1]")]
    RadiusOutOfRange(f64),

    #[error("point outside the closed unit polydisc: {0}")]
    PointOutsidePolydisc(String),

    #[error("not invertible: {0}")]
    NotInvertible(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("determinant by cofactor expansion limited to n <= 8, got n = {0}")]
    DimensionTooLarge(usize),

    #[error("matrix is not near the identity: |F - I| = {0} >= 1")]
    NotNearIdentity(f64),

    #[error("index ({i}, {j}) invalid for an elementary factor of size {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("merged unipotent run left the strict triangle")]
    MergeOverflow,

    #[error("near-identity elimination diverged at stage {stage}: |pivot - 1| = {deviation}")]
    NearIdentityDiverged { stage: usize, deviation: f64 },

    #[error("polynomial division by zero")]
    DivisionByZero,

    #[error("matrix is not unimodular: max |det - 1| coefficient = {0}")]
    NotUnimodular(f64),

    #[error("Euclidean elimination broke down: column {0} is numerically zero")]
    PivotBreakdown(usize),

    #[error("diagonal entry {0} could not be certified as a unit on the closed disc")]
    NotInvertibleDiagonal(usize),

    #[error("requested dilation gap {eta} unreachable (tail floor {floor})")]
    Unreachable { eta: f64, floor: f64 },

    #[error("no certified inverse available: {0}")]
    InverseUnavailable(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
