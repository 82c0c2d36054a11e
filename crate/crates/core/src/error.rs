use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    Lattice(String),

    #[error("parameter shape mismatch: expected {expected} {what}, got {got}")]
    Shape {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("site label {label} outside lattice (labels {min}..={max})")]
    SiteOutOfRange { label: i64, min: i64, max: i64 },

    #[error("invalid state: {0}")]
    State(String),

    #[error("state not normalized: norm^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("step size {dt} exceeds stability bound {bound}")]
    StepSize { dt: f64, bound: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("symmetry precondition failed: {0}")]
    Symmetry(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("numerical invariant violated: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 for configuration/input problems, 2 for
    /// numerical-invariant failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) | Error::Eigen(_) => 2,
            _ => 1,
        }
    }
}
