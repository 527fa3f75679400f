use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RsqError {
    #[error("algebra dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("algebra dimension {0} outside supported range 1..=6")]
    UnsupportedDimension(usize),
    #[error("expected a grade-1 element")]
    NotGradeOne,
    #[error("factor {0} of a Pin element is not a unit vector")]
    NotUnit(usize),
    #[error("element is not invertible")]
    NotInvertible,
    #[error("variable block layouts differ")]
    BlockMismatch,
    #[error("unknown variable block `{0}`")]
    UnknownBlock(String),
    #[error("point has {got} coordinates, block `{block}` has arity {arity}")]
    PointArity { block: String, arity: usize, got: usize },
    #[error("polynomial is not homogeneous in block `{0}`")]
    NotHomogeneous(String),
    #[error("polynomial is not harmonic in block `{block}` (laplacian residual norm {residual})")]
    NotHarmonic { block: String, residual: f64 },
    #[error("input lies outside the operator domain: {0}")]
    OutsideDomain(String),
    #[error("ambient dimension n = {0} not supported (need n >= 3)")]
    AmbientDimension(usize),
    #[error("operator index k = {0} not supported here")]
    OperatorIndex(usize),
    #[error("singular point: {0}")]
    Singular(String),
    #[error("linear system is singular")]
    SingularSystem,
    #[error("invalid Vahlen map: {0}")]
    InvalidVahlen(String),
    #[error("point at infinity")]
    PointAtInfinity,
    #[error("point is off the unit sphere (|x| - 1 = {0:e})")]
    OffSphere(f64),
    #[error("non-finite integrand at {0} node(s)")]
    NonFinite(usize),
    #[error("invalid quadrature rule: {0}")]
    Quadrature(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, RsqError>;

impl From<std::io::Error> for RsqError {
    fn from(e: std::io::Error) -> Self {
        RsqError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for RsqError {
    fn from(e: serde_json::Error) -> Self {
        RsqError::Parse(e.to_string())
    }
}
