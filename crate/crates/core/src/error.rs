use thiserror::Error;

/// Errors produced by parsing, validation, and solver routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed entry: {msg}")]
    Malformed { line: usize, msg: String },

    #[error("line {line}: orbital index {index} out of range (NORB={norb})")]
    IndexOutOfRange {
        line: usize,
        index: usize,
        norb: usize,
    },

    #[error("line {line}: duplicate entry with conflicting value ({a} vs {b})")]
    ConflictingDuplicate { line: usize, a: f64, b: f64 },

    #[error("missing header field: {0}")]
    MissingHeader(String),

    #[error("orbital {orb}: dangling or non-mutual E partner declaration")]
    DanglingPartner { orb: usize },

    #[error("electron count {n_elec} exceeds capacity of {n_orb} orbitals")]
    TooManyElectrons { n_elec: usize, n_orb: usize },

    #[error("line {line}: unknown axis label '{axis}'")]
    UnknownAxis { line: usize, axis: String },

    #[error("line {line}: symmetry-violating entry: {msg}")]
    SymmetryViolation { line: usize, msg: String },

    #[error("SSC tensor block ({p},{q},{r},{s}) has trace {trace:e}, expected traceless")]
    TraceViolation {
        p: usize,
        q: usize,
        r: usize,
        s: usize,
        trace: f64,
    },

    #[error("particle counts exceed orbital count: n_orb={n_orb}, n_up={n_up}, n_down={n_down}")]
    BadCounts {
        n_orb: usize,
        n_up: usize,
        n_down: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(
        "eigensolver did not converge after {iterations} iterations (worst residual {residual:e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("spin-contaminated vector: <S^2> = {s_squared}, nearest s(s+1) = {nearest}")]
    SpinContamination { s_squared: f64, nearest: f64 },

    #[error("no character-table match for characters ({chi_e}, {chi_c3:.6}, {chi_sv:.6})")]
    NoIrrepMatch {
        chi_e: f64,
        chi_c3: f64,
        chi_sv: f64,
    },

    #[error("degenerate cluster of dimension {0} exceeds the largest C3v irrep")]
    ClusterTooLarge(usize),

    #[error("non-orthogonal representation matrix (norm drift {0:e})")]
    NonOrthogonal(f64),

    #[error("symmetry relation violated in model parameters: {0}")]
    ModelParams(String),

    #[error("unknown state selector '{0}'")]
    UnknownState(String),

    #[error("zero-field fit residual {0:e} above tolerance (manifold contaminated)")]
    ZfsResidual(f64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
