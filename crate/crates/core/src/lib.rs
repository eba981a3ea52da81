//! Exact-arithmetic analysis of synchronizing deterministic automata.
//!
//! The crate is organised bottom-up:
//!
//! * [`automaton`]: complete DFAs, words, state sets, the built-in example
//!   automata and the plain-text table format.
//! * [`word_matrix`]: the row-functional 0/1 matrix `M_w` of a word.
//! * [`linspace`]: exact rational spans, dimensions and decompositions of
//!   flattened word matrices.
//! * [`series`]: the integer series `(S,w) = C(M_w - E)P^t` and suffix profiles.
//! * [`sync`]: reset-word search, q-equivalence, irreducibility.
//! * [`enumeration`]: exhaustive scans over small automata and the
//!   property verification suite.
//! * [`cli`]: the `syncword` command-line front end.

pub mod automaton;
pub mod cli;
pub mod enumeration;
pub mod error;
pub mod linspace;
pub mod series;
pub mod sync;
pub mod word_matrix;

pub use automaton::{Dfa, Letter, StateSet, Word};
pub use error::{Error, Result};
pub use word_matrix::WordMatrix;
