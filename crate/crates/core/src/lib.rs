//! Generalized torsion certificates for finitely presented groups.
//!
//! A generalized torsion element is a nontrivial `g` such that some nonempty
//! product of conjugates of `g` is the identity. This crate builds such
//! certificates for several group families, checks them with exact
//! arithmetic, and decides bi-orderability for torus and circle bundles.

pub mod abelian;
pub mod certificates;
pub mod classify;
pub mod cli;
pub mod coset;
pub mod presentation;
pub mod word_problem;
pub mod words;

pub use presentation::{Family, Monodromy, Presentation};
pub use words::{Alphabet, Generator, Letter, Word};
