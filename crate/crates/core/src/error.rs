use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("sample length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value encountered in {context}")]
    NonFiniteValue { context: String },

    #[error("polynomial has degree zero")]
    DegreeZero,

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("least-squares matrix is rank deficient: |R[{index},{index}]| = {value:e} below {threshold:e}")]
    RankDeficient { index: usize, value: f64, threshold: f64 },

    #[error("least-squares system has {rows} rows and {cols} columns; need rows >= cols >= 1")]
    Underdetermined { rows: usize, cols: usize },

    #[error("sampled potential has a non-real value at line {line}")]
    NonRealPotential { line: usize },

    #[error("sampled potential covers [{lo}, {hi}] but the grid needs [{need_lo}, {need_hi}]")]
    DomainTooSmall { lo: f64, hi: f64, need_lo: f64, need_hi: f64 },

    #[error("Jost basis normalization point is degenerate: |{which}(i/2, 0)| = {value:e}")]
    BasisDegenerate { which: &'static str, value: f64 },

    #[error("z = -1 corresponds to rho = infinity")]
    PoleAtMinusOne,

    #[error("unstable spectrum: {failed} of {total} in-disk roots moved when the truncation was reduced")]
    UnstableSpectrum { failed: usize, total: usize },

    #[error("norming constant at rho = {rho} has both quotient denominators below {threshold:e}")]
    DegenerateNormalization { rho: String, threshold: f64 },

    #[error("|a(rho)| = {value:e} is too small to divide by")]
    DivisionNearZero { value: f64 },

    #[error("{eigenvalues} eigenvalues given but only {constants} norming constants")]
    MissingSpectrumData { eigenvalues: usize, constants: usize },

    #[error("recovery denominator |{value:e}| too small at x = {x}")]
    DenominatorNearZero { x: f64, value: f64 },

    #[error("rank deficient least-squares system at x = {x}: {source}")]
    SolveFailedAt {
        x: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("failed to read or write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable identifier used on the CLI's diagnostic stream.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::DegreeZero => "DegreeZero",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::Underdetermined { .. } => "Underdetermined",
            Error::NonRealPotential { .. } => "NonRealPotential",
            Error::DomainTooSmall { .. } => "DomainTooSmall",
            Error::BasisDegenerate { .. } => "BasisDegenerate",
            Error::PoleAtMinusOne => "PoleAtMinusOne",
            Error::UnstableSpectrum { .. } => "UnstableSpectrum",
            Error::DegenerateNormalization { .. } => "DegenerateNormalization",
            Error::DivisionNearZero { .. } => "DivisionNearZero",
            Error::MissingSpectrumData { .. } => "MissingSpectrumData",
            Error::DenominatorNearZero { .. } => "DenominatorNearZero",
            Error::SolveFailedAt { source, .. } => source.name(),
            Error::InvalidInput(_) => "InvalidInput",
            Error::Io { .. } => "Io",
            Error::Csv(_) => "Csv",
            Error::Json(_) => "Json",
        }
    }

    pub(crate) fn non_finite(context: impl Into<String>) -> Self {
        Error::NonFiniteValue { context: context.into() }
    }
}
