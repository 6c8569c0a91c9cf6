//! Error types shared across the crate.

use thiserror::Error;

/// Everything that can go wrong in the physics kernels or the CLI layer.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("non-positive decay rate: {name} = {value}")]
    NonPositiveRate { name: &'static str, value: f64 },

    #[error("qubit inversion out of range: sigma_z = {0} (must lie in [-1, 1])")]
    SigmaZOutOfRange(f64),

    #[error("negative coupling or drive: {name} = {value}")]
    NegativeCoupling { name: &'static str, value: f64 },

    #[error("effective-detuning fixed point did not converge")]
    NoConvergence,

    #[error("degenerate leading coefficient: cubic term vanishes")]
    DegenerateLeadingCoefficient,

    #[error("series too short: need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("poles are numerically degenerate (min separation {min_sep:e} < {threshold:e})")]
    DegeneratePoles { min_sep: f64, threshold: f64 },

    #[error("response denominator vanishes at abscissa {0}")]
    PoleHit(f64),

    #[error("imaginary transparency-window prediction: g_em^2 - 2 g^2 sigma_z = {0} < 0")]
    ImaginaryPrediction(f64),

    #[error("branch is not bistable: no turning-point pair")]
    NotBistable,

    #[error("photon-number root fails steady-state closure: |a_s|^2 = {got}, expected {expected}")]
    InconsistentRoot { got: f64, expected: f64 },

    #[error("spectrum value has a non-vanishing imaginary part: relative residue {0:e}")]
    NonRealResult(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
