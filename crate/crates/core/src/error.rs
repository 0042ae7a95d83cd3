use thiserror::Error;

pub type Result<T> = std::result::Result<T, QspError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QspError {
    #[error("input shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("grid of size {grid} cannot resolve degree {degree} without aliasing (need at least {needed})")]
    Aliasing {
        grid: usize,
        degree: usize,
        needed: usize,
    },

    #[error("invalid grid size {0}: must be even and positive")]
    InvalidGrid(usize),

    #[error("coefficient pattern does not match declared parity at frequency {0}")]
    ParityMismatch(isize),

    #[error("target is not a real function of cos t: relative imaginary residue {0:.3e}")]
    NonRealTarget(f64),

    #[error("target vanishes identically on the requested parity")]
    ZeroTarget,

    #[error("no degree below the grid Nyquist frequency meets the threshold (grid cap {cap}); raise the grid cap")]
    DegreeOverflow { cap: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("1 - a^2 - b^2 drops to {min:.3e} on the grid (need >= 0.5); reduce the sup norms of a and b")]
    Scaling { min: f64 },

    #[error("conjugate gradient stalled at relative residual {residual:.3e} after {iterations} iterations")]
    Conditioning { residual: f64, iterations: usize },

    #[error("leading coefficient of the null vector is {ratio:.3e} of its norm; choose b with a dominant leading term")]
    Normalization { ratio: f64 },

    #[error("completion is inconsistent: {0}")]
    CompletionConsistency(String),

    #[error("degenerate leading coefficients at degree {degree}: |p_n| = {p_abs:.3e}, |r_n| = {r_abs:.3e}")]
    DegenerateLeading {
        degree: usize,
        p_abs: f64,
        r_abs: f64,
    },

    #[error("peel step at degree {degree} left residual {residual:.3e} above the reduced degree")]
    Instability { degree: usize, residual: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}
