use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:e} below tolerance")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not Hermitian: deviation {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("vector is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("not a density operator: trace {trace}")]
    NotDensity { trace: f64 },

    #[error("family is not a resolution of the identity: residual {residual:e}")]
    IncompleteBasis { residual: f64 },

    #[error("matrix is not unitary: residual {residual:e}")]
    NotUnitary { residual: f64 },

    #[error("state is not maximally entangled (class {class})")]
    NotMaximallyEntangled { class: String },

    #[error("decomposition does not sum to the density operator: residual {residual:e}")]
    DecompositionMismatch { residual: f64 },

    #[error("expected a {expected}-partite state, found {found} factors")]
    WrongArity { expected: usize, found: usize },

    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite entry produced by {0}")]
    NonFinite(&'static str),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported schema version {found:?}, expected {expected:?}")]
    SchemaVersion { found: String, expected: &'static str },

    #[error("invariant `{name}` violated: {detail}")]
    Invariant { name: &'static str, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Name of the object invariant this error reports, if it reports one.
    pub fn invariant_name(&self) -> Option<&'static str> {
        Some(match self {
            Error::NotPsd { .. } => "positive_semidefinite",
            Error::NotHermitian { .. } => "hermitian",
            Error::NotNormalized { .. } => "unit_norm",
            Error::NotDensity { .. } => "unit_trace",
            Error::IncompleteBasis { .. } => "complete_basis",
            Error::NotUnitary { .. } => "unitary",
            Error::NonFinite(_) => "finite",
            Error::Invariant { name, .. } => name,
            _ => return None,
        })
    }

    pub fn dims(context: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
