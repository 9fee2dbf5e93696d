use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("free root out of range: k = {k} is not positive")]
    OutOfRange { k: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations: last iterate ({k1}, {k2}), residual {residual:e}")]
    NoConvergence {
        k1: f64,
        k2: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("singular Jacobian at ({k1}, {k2}); perturb the seed")]
    SingularStep { k1: f64, k2: f64 },

    #[error("lost state ({i},{j}) during continuation in c at c = {c}: {reason}")]
    Enumeration {
        i: usize,
        j: usize,
        c: f64,
        reason: String,
    },

    #[error("root path failed at alpha = {alpha}: {reason}")]
    Path { alpha: f64, reason: String },

    #[error("degenerate momenta q1 = {q1}, q2 = {q2} with c > 0")]
    DegenerateMomenta { q1: f64, q2: f64 },

    #[error("({k1}, {k2}) is not a spectral root: boundary system sigma_min/sigma_max = {ratio:e}")]
    NotASpectralRoot { k1: f64, k2: f64, ratio: f64 },

    #[error("coordinate ({x1}, {x2}) outside [0, {l})")]
    Domain { x1: f64, x2: f64, l: f64 },

    #[error("configuration mismatch: {0}")]
    Configuration(String),

    #[error("quadrature oracle unreliable: relative change {rel_change:e} on order doubling")]
    OracleUnreliable { rel_change: f64 },

    #[error("path too coarse: overlap magnitude {magnitude:e} between samples {index} and {}", index + 1)]
    PathTooCoarse { index: usize, magnitude: f64 },

    #[error("global phase ill-defined: endpoint overlap magnitude {magnitude:e}")]
    IllDefinedGlobalPhase { magnitude: f64 },
}
