use thiserror::Error;

/// Everything that can go wrong inside the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("factor index {index} out of range for {len} tensor factors")]
    FactorOutOfRange { index: usize, len: usize },

    #[error("Hilbert-space dimension {dim} exceeds the cap {cap} (set GAPPED_ENT_MAX_DIM to raise it)")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid pure state: {0}")]
    InvalidState(String),

    #[error("bipartition has an empty side")]
    EmptyBipartition,

    #[error("eigen/singular value solver failed to converge")]
    SolverFailure,

    #[error("isometry condition V V^dag = 1 violated (deviation {deviation:.3e})")]
    IsometryViolation { deviation: f64 },

    #[error("transfer operator has non-trivial peripheral spectrum ({count} eigenvalues of modulus ~1)")]
    PeripheralSpectrum { count: usize },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("wrong shape: {0}")]
    WrongShape(String),

    #[error("trace distance {distance:.4} exceeds 1/e; Fannes bound not in its monotone regime")]
    OutOfRegime { distance: f64 },

    #[error("basis is not orthonormal (deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("ground state is degenerate (gap {gap:.3e})")]
    DegenerateGroundState { gap: f64 },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("spectral projector {0} is empty; cutoff too small")]
    EmptyProjector(&'static str),

    #[error("Gauss-Hermite quadrature unconverged (node doubling changed result by {change:.3e})")]
    QuadratureUnconverged { change: f64 },

    #[error("constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
