//! Non-abelian flux anyons on a line.
//!
//! An [`AnyonSystem`] holds an ensemble of pure branches; each branch is a
//! sparse map from flux configurations to amplitudes. Exchanges conjugate
//! fluxes, fusions are projective vacuum-overlap measurements and electric
//! charge probes measure the total flux inside a loop through a group
//! representation.

mod braidfile;
mod distill;
mod probe;
mod system;

pub use braidfile::{parse_braid_program, run_braid_program, run_braid_program_with, BraidOp};
pub use distill::{distill_flux_bins, BinLabel, DistillBudget, DistillReport, FluxBin};
pub use probe::{ProbeId, Representation};
pub use system::{
    trial_rng, AnyonId, AnyonSystem, Branch, Charge, Direction, FusionOutcome, PairId, SectorModel,
};

pub use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("no anyon with id {0}")]
    NoSuchAnyon(u32),
    #[error("no probe with id {0}")]
    NoSuchProbe(u32),
    #[error("exchange position {0} out of range")]
    PositionOutOfRange(usize),
    #[error("cannot fuse an anyon with itself")]
    SameAnyon,
    #[error("pair ({0}, {1}) has non-trivial net flux in some configuration")]
    NonTrivialNetFlux(u32, u32),
    #[error("actor and target pairs overlap")]
    OverlappingPairs,
    #[error("invalid sector weights: {0}")]
    BadSectorWeights(String),
    #[error("representation is not a homomorphism (deviation {0:.3e})")]
    NotHomomorphism(f64),
    #[error("representation matrices have inconsistent dimensions")]
    DimensionMismatch,
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("element is not in the group")]
    NotInGroup,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {source}")]
    AtLine { line: usize, source: Box<SimError> },
}
