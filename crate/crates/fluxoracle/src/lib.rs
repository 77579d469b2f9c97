//! Dense reference model: qudit state vectors, exact gate matrices and
//! extraction of logical states from an anyon simulation.

mod dense;
mod extract;

pub use dense::{eigenstates, fidelity, phase_estimation, DenseState, DensityMatrix, Gate, MAX_QUDITS};
pub use extract::{extract_density, extract_logical_state, PairCode};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("qudit index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("at most {0} qudits are supported")]
    TooManyQudits(usize),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("configuration {0:?} lies outside the computational subspace")]
    OutOfSubspace(Vec<u16>),
    #[error("logical state is mixed (purity {0:.12})")]
    Mixed(f64),
    #[error(transparent)]
    Sim(#[from] fluxsim::SimError),
}
