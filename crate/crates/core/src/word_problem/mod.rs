//! Exact word-problem engines and the relator-derivation proof layer.
//!
//! The normal-form engines cover the Klein bottle group and torus-bundle
//! groups. Proofs (`TrivialityProof`) work for any presentation and are what
//! certificates ultimately rest on; the engines corroborate them.

mod klein;
mod proof;
mod torus;
mod trace;

use thiserror::Error;

pub use klein::{klein_alphabet, klein_eval, KleinElement};
pub use proof::{check_proof, parse_step, DerivationStep, ProofError, Sign, TrivialityProof};
pub use torus::{tb_eval, torus_alphabet, Mat2, TbElement, TorusEngine};
pub use trace::{compile_rewrite_trace, reverse_trace, Direction, Rewrite, TraceBuilder, TraceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("word is not over the alphabet {expected}")]
    WrongAlphabet { expected: &'static str },
    #[error("monodromy determinant is {0}, expected 1 or -1")]
    NotUnimodular(String),
    #[error("t-exponent {0} is too large")]
    ExponentTooLarge(String),
}
