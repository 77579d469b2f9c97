//! Product-form words over finite groups.
//!
//! A [`Program`] is a DAG whose flattening is a word in inputs, input
//! inverses and constants. Synthesis builds such programs for arbitrary
//! function tables over simple non-abelian groups.

mod program;
mod synth;

pub use program::{
    evaluate_word, simplify_word, word_from_text, word_to_text, Atom, Evaluator, Node, NodeId,
    Program, ProgramBuilder,
};
pub use synth::{
    conjugate_product_expression, controlled_sum_extension, multi_point_delta, point_delta,
    point_delta_on, synthesize, synthesize_on, toffoli_constants, toffoli_program,
    toffoli_program_with, Synthesizer, ToffoliConstants,
};

use fluxgroup::ElemId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("expected {expected} inputs, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("degree mismatch between program and inputs")]
    DegreeMismatch,
    #[error("flattened word has {len} atoms, limit {max}")]
    TooLong { len: u64, max: u64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("constant {0} is not in the group")]
    ConstantOutsideGroup(String),
    #[error("synthesis unsupported: {0}")]
    SynthesisUnsupported(String),
    #[error("table has no entry for input {0:?}")]
    MissingEntry(Vec<ElemId>),
    #[error("delta point lies outside its slot domain")]
    PointOutsideDomain,
}
