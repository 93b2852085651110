//! Locally unextendible non-maximally entangled bases in C^d (x) C^d.
//!
//! Modules, bottom up:
//!
//! - [`linalg`]: dense complex matrices, Jacobi SVD, polar factor, Haar
//!   sampling and subspace projection.
//! - [`weyl`]: the Weyl-Heisenberg operator basis and expansions in it.
//! - [`bipartite`]: Schmidt-form states, one-sided local unitaries and
//!   local-unitary connectors.
//! - [`lunmeb`]: candidate bases, verification and the extension search.
//! - [`repro`]: the d = 4 five-state counterexample and the d = 2 analysis.
//! - [`io`] and [`cli`]: the JSON basis format and the command-line surface.

pub mod bipartite;
pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lunmeb;
pub mod repro;
pub mod weyl;

pub use error::{Error, Result};
pub use linalg::{ComplexScalar, Matrix, Tolerance};
