use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: non-positive weight {weight}")]
    NonPositiveWeight { line: usize, weight: f64 },

    #[error("line {line}: self-loop on vertex `{label}`")]
    SelfLoop { line: usize, label: String },

    #[error("unknown vertex label `{0}`")]
    UnknownLabel(String),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("no contract records")]
    EmptyRecords,

    #[error("contract `{contract}`: {message}")]
    InvalidRecord { contract: String, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not symmetric at ({row}, {col}): |a_ij - a_ji| = {diff:e}")]
    Asymmetric { row: usize, col: usize, diff: f64 },

    #[error("eigensolver did not converge within {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("eigendecomposition residual {residual:e} exceeds tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("graph is disconnected (smallest positive eigenvalue {lambda1:e})")]
    Disconnected { lambda1: f64 },

    #[error("squared kernel distance {0:e} is negative beyond roundoff; kernel is not PSD")]
    NegativeDistance(f64),

    #[error("vertex set is not a perfect community: residual {residual:e} exceeds {tolerance:e}")]
    NotPerfect { residual: f64, tolerance: f64 },

    #[error("degenerate kernel: leading principal variance {0:e}")]
    DegenerateKernel(f64),

    #[error("training exceeded the iteration guard ({0} iterations)")]
    IterationGuard(usize),

    #[error("q-modularity undefined: 1 - sum(a_j^2) = {0:e}")]
    UndefinedModularity(f64),

    #[error("unit {unit} holds {size} vertices; at least {required} required")]
    ClusterTooSmall { unit: usize, size: usize, required: usize },

    #[error("unit {0} is empty")]
    EmptyUnit(usize),

    #[error("artifacts were built from different vertex sets ({0} vs {1})")]
    VertexSetMismatch(String, String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn file(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::File { path: path.as_ref().display().to_string(), source }
    }

    /// Process exit code: 2 for I/O and parse failures, 1 for analysis-level errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::NonPositiveWeight { .. }
            | Error::SelfLoop { .. }
            | Error::InvalidRecord { .. }
            | Error::Format(_)
            | Error::File { .. }
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => 2,
            _ => 1,
        }
    }
}
