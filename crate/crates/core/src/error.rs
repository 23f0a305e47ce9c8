use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has zero dimension")]
    EmptyMatrix,

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("wire {wire} does not exist (register has {wires} wires)")]
    WireIndex { wire: usize, wires: usize },

    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("state is not normalized (trace {trace})")]
    NotNormalized { trace: f64 },

    #[error("trace {trace} outside [0, 1]")]
    TraceOutOfRange { trace: f64 },

    #[error("{name} = {value} is out of range {range}")]
    Range {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("branch has vanishing trace {trace:e}; cannot normalize")]
    ZeroTrace { trace: f64 },

    #[error("strength {alpha} is degenerate for the duality construction (needs 0 < alpha < 1)")]
    DegenerateStrength { alpha: f64 },

    #[error("operator is not a contraction (largest singular value {norm})")]
    NotContraction { norm: f64 },

    #[error("operator is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("target fidelity {target} unreachable at theta = {theta} (best {best})")]
    Unreachable { theta: f64, target: f64, best: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn range(name: &'static str, value: f64, range: &'static str) -> Self {
        Error::Range { name, value, range }
    }
}
