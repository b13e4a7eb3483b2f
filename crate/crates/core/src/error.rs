use thiserror::Error;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("block index {q} outside admissible window [{lo}, {hi}]")]
    BlockOutOfRange { q: i32, lo: i32, hi: i32 },

    #[error("invalid partition parameters: {0}")]
    InvalidPartition(String),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error(
        "homogeneous decomposition is only defined modulo polynomials, which on the torus \
         means modulo constants; input has mean {mean:e}"
    )]
    NonzeroMean { mean: f64 },

    #[error("dyadic block {q} vanishes, ratio undefined")]
    ZeroBlock { q: i32 },

    #[error("field is not divergence free (relative divergence {violation:e})")]
    NotDivergenceFree { violation: f64 },

    #[error("field lacks the axisymmetric structure required here: {0}")]
    NotAxisymmetric(String),

    #[error("profile support does not fit the central half-box: {0}")]
    SupportViolation(String),

    #[error("observed CFL {cfl:.4} exceeds {max} at step {step} (t = {t:.6})")]
    CflViolation { step: usize, t: f64, cfl: f64, max: f64 },

    #[error("dilation factor {lambda} outside (0, 1] or below resolvable limit {min}")]
    InvalidDilation { lambda: f64, min: f64 },

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("invalid snapshot: {0}")]
    Snapshot(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
