use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Single-particle levels at the Fermi energy are (near-)degenerate.
    #[error("gapless point: single-particle gap {gap:e} at the Fermi level")]
    Gapless { gap: f64 },

    #[error("correlation eigenvalue {value} lies outside [0, 1]")]
    SpectrumOutOfRange { value: f64 },

    #[error("free-fermion engine requires U = 0, got U = {u}")]
    EngineMismatch { u: f64 },

    #[error("sector has {states} states, above the cap of {cap}")]
    SectorTooLarge { states: u128, cap: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("operator failed the symmetry probe (|<u,Av> - <Au,v>| = {deviation:e})")]
    NonSymmetricOperator { deviation: f64 },

    #[error("ground state is degenerate within {gap:e}")]
    DegenerateGroundState { gap: f64 },

    #[error("reduced density matrix eigenvalue {value:e} is negative")]
    NegativeEigenvalue { value: f64 },

    #[error("empty spectrum")]
    EmptySpectrum,

    #[error(
        "sector ({n_up}, {n_down}) has energy {energy} below the half-filled ground energy {reference}"
    )]
    GroundStateSector {
        n_up: usize,
        n_down: usize,
        energy: f64,
        reference: f64,
    },

    #[error("engine audit failed: spectra differ by {deviation:e}")]
    AuditMismatch { deviation: f64 },
}

impl Error {
    /// Short machine-readable name, used in tabular outputs.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "InvalidParams",
            Error::Gapless { .. } => "GaplessError",
            Error::SpectrumOutOfRange { .. } => "SpectrumOutOfRange",
            Error::EngineMismatch { .. } => "EngineMismatch",
            Error::SectorTooLarge { .. } => "SectorTooLarge",
            Error::NotConverged { .. } => "NotConverged",
            Error::NonSymmetricOperator { .. } => "NonSymmetricOperator",
            Error::DegenerateGroundState { .. } => "DegenerateGroundState",
            Error::NegativeEigenvalue { .. } => "NegativeEigenvalue",
            Error::EmptySpectrum => "EmptySpectrum",
            Error::GroundStateSector { .. } => "GroundStateSector",
            Error::AuditMismatch { .. } => "AuditMismatch",
        }
    }
}
