//! Symbolic execution as a library.
//!
//! - [`values`]: hash-consed terms built through simplifying constructors.
//! - [`solver`]: the incremental satisfiability layer and its SMT-LIB2 backend.
//! - [`symex`]: the depth-first branching execution monad.
//! - [`data`]: symbolic maps and ranges.
//! - [`simplang`]: a small expression language with symbolic and concrete
//!   interpreters and executable soundness checks.
//! - [`diagnostics`]: levelled, sectioned logs and statistics.

pub mod data;
pub mod diagnostics;
pub mod mutants;
pub mod simplang;
pub mod solver;
pub mod symex;
#[cfg(feature = "testkit")]
#[doc(hidden)]
pub mod testkit;
pub mod values;

mod sexp;
