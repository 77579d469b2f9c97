//! Logical qudits stored in flux pairs.
//!
//! A [`QuditRegister`] owns an anyon system and realizes the Toffoli,
//! controlled-sum, `X` and `Z` gates by conjugating pairs with
//! product-form functions, plus the ancilla protocols that make the gate
//! set universal: `x~0` preparation, root-of-unity bootstrap, `Z`/`X`
//! measurement and phase estimation of `X^a Z^b`.

mod circuit;
mod context;
mod protocols;
mod register;

pub use circuit::{parse_circuit, run_circuit, CircuitOp};
pub use context::LogicalContext;
pub use register::{
    ConjugationMode, LogicalOutcome, QuditId, QuditRegister, RegisterOptions, Tally, XZeroFilter,
};

use fluxsim::SimError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GateError {
    #[error("digit {0} out of range for d = {1}")]
    DigitOutOfRange(u32, u32),
    #[error("no qudit {0}")]
    NoSuchQudit(usize),
    #[error("gate needs distinct qudits")]
    SameQudit,
    #[error("qudit parameters are invalid for this group")]
    BadParams,
    #[error("element is not in the quotient")]
    NotInQuotient,
    #[error("no x~1 reference; run the bootstrap first")]
    BootstrapRequired,
    #[error("protocol stalled after {attempts} attempts")]
    ProtocolStalled { attempts: usize },
    #[error("no conclusive fusion; tallies {0:?}")]
    Inconclusive(Vec<Tally>),
    #[error("ancilla budget exhausted")]
    PoolExhausted,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Word(#[from] fluxword::WordError),
}
