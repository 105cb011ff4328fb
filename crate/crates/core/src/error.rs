use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("expected a square matrix, got {0} entries")]
    NotSquare(usize),

    #[error("empty matrix or vector")]
    Empty,

    #[error("non-finite entry at flat index {0}")]
    NonFinite(usize),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("Jacobi eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("dimension {0} is not a power of two")]
    NotQubitDimension(usize),

    #[error("particle {0} is measured twice")]
    OverlappingParticles(usize),

    #[error("particle {index} out of range for a {nparticles}-particle state")]
    ParticleOutOfRange { index: usize, nparticles: usize },

    #[error("cut {cut} is not an interior cut of a {nparticles}-particle state")]
    InvalidCut { cut: usize, nparticles: usize },

    #[error("observable `{0}` has a degenerate spectrum")]
    LocallyDegenerate(String),

    #[error("all operator coefficients are zero")]
    ZeroCoefficients,

    #[error("invalid superposition weights: |a1|^2 + |a2|^2 = {0}")]
    InvalidWeights(f64),

    #[error("degeneracy group has fewer than two product eigenvectors")]
    NotDegenerate,

    #[error("observable `{0}` is not a tensor product; joint eigenvalues are undefined for it")]
    NoJointEigenvalues(String),

    #[error("invalid basis label {0:?}")]
    InvalidLabel(String),

    #[error("state is not a disentangled branch state (deviation {0:e})")]
    NotProtocolForm(f64),

    #[error("ensemble weights sum to {0}, expected 1")]
    EnsembleWeights(f64),
}
