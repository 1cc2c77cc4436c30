use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unregistered symbol `{0}`")]
    UnregisteredSymbol(String),

    #[error("symbol `{name}` already registered with role {existing}, cannot re-register as {requested}")]
    RoleConflict {
        name: String,
        existing: String,
        requested: String,
    },

    #[error("missing assignment for symbols: {}", .0.join(", "))]
    MissingAssignment(Vec<String>),

    #[error("pivot degenerate: {0}")]
    PivotDegenerate(String),

    #[error("expression is not affine in the unknowns: {0}")]
    NotAffine(String),

    #[error("negative exponent on non-constant symbol `{0}`")]
    NegativeExponent(String),

    #[error("chart mismatch: {0}")]
    ChartMismatch(String),

    #[error("chart lacks momenta")]
    MissingMomenta,

    #[error("chart lacks velocities")]
    MissingVelocities,

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("Reeb undefined; use unified formalism")]
    ReebUndefined,

    #[error("result is not polynomial: {0}")]
    NonPolynomial(String),

    #[error("constraint algorithm did not stabilize within {0} iterations")]
    NonStabilization(usize),

    #[error("no dynamics: {constraints} independent constraints on a {dimension}-dimensional chart")]
    NoDynamics { constraints: usize, dimension: usize },

    #[error("CFL condition violated ({0}); suggested dt = {1:e}")]
    Cfl(String, f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient snapshots: {0}")]
    InsufficientSnapshots(String),

    #[error("boundary flux does not vanish for {0} boundaries; action audit refused")]
    BoundaryFlux(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
