use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sector of dimension zero: {0}")]
    EmptySector(String),

    #[error("{n_modes} modes exceeds the matrix realization cap of {cap}")]
    TooManyModes { n_modes: usize, cap: usize },

    #[error("mode {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("unknown group `{0}`")]
    UnknownGroup(String),

    #[error("unknown irrep `{label}` in group {group}")]
    UnknownIrrep { group: String, label: String },

    #[error("invalid group {group}: {reason}")]
    InvalidGroup { group: String, reason: String },

    #[error("irrep restriction failed: {0}")]
    Restriction(String),

    #[error("spin-orbital {0} has no orbital label")]
    UnlabeledMode(usize),

    #[error("ambiguous degeneracy: {0}")]
    AmbiguousDegeneracy(String),

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("invalid orbital labels: {0}")]
    Labels(String),

    #[error("FCIDUMP parse error at line {line}: {reason}")]
    Fcidump { line: usize, reason: String },

    #[error("invalid integrals: {0}")]
    Integrals(String),

    #[error("invalid model parameters: {0}")]
    ModelParameters(String),

    #[error("matrix is not orthogonal (deviation {0:.3e})")]
    NotOrthogonal(f64),

    #[error("Taylor series for the exponential did not converge within {0} terms")]
    SeriesDivergence(usize),

    #[error("imaginary energy residue {0:.3e} exceeds tolerance")]
    ImaginaryEnergy(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("sector of dimension {dim} is too large for both eigensolver paths")]
    SectorTooLarge { dim: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("line search failed after {iterations} iterations at energy {energy:.10}")]
    LineSearch { iterations: usize, energy: f64, theta: Vec<f64> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
