use thiserror::Error;

/// Errors raised by the state algebra, phase-space evaluation and the oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate state: squared norm {norm_sqr:e} is too small to normalize")]
    DegenerateState { norm_sqr: f64 },

    #[error(
        "Fock cutoff {cutoff} too small: retained norm fraction {retained:.3e} (lost {lost:.3e})"
    )]
    CutoffTooSmall {
        cutoff: usize,
        retained: f64,
        lost: f64,
    },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("imaginary residue {residue:e} in a Wigner sum exceeds tolerance")]
    ImaginaryResidue { residue: f64 },

    #[error("grid bounds inverted or empty: [{min}, {max}]")]
    InvertedBounds { min: f64, max: f64 },

    #[error("grid too coarse: spacing {spacing} would alias fringes of period {fringe}")]
    GridTooCoarse { spacing: f64, fringe: f64 },

    #[error("grid does not cover the central window |x|,|p| <= {needed}")]
    GridTooSmall { needed: f64 },

    #[error("dispersive phase undefined for zero detuning")]
    ZeroDetuning,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("compass phase condition violated: {0}")]
    PhaseConditionViolated(String),

    #[error("lifetime undefined for zero field amplitude")]
    ZeroAmplitude,

    #[error("integration step too large: {0}")]
    StepTooLarge(String),

    #[error("no revival found in trace")]
    NoRevivalFound,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
