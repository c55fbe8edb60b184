//! Pairwise completely positive (PCP) matrix pairs and the separability of
//! conjugate local diagonal unitary invariant (CLDUI) bipartite states.
//!
//! A pair `(X, Y)` is PCP when vector families `{v_k}`, `{w_k}` exist with
//! `X = Σ (v_k⊙w_k)(v_k⊙w_k)*` and `Y = Σ (v_k⊙v̄_k)(w_k⊙w̄_k)*`. The CLDUI
//! state built from `(X, Y)` is separable exactly when the pair is PCP, so
//! every decomposition produced here doubles as a separability certificate.
//!
//! - [`linalg`]: dense complex matrices, Hermitian spectra, trace and entrywise norms.
//! - [`pairs`]: the pair/decomposition model and the necessary conditions.
//! - [`construct`]: sufficient-condition constructors that produce verified decompositions.
//! - [`cldui`]: state realization, partial transpose, realignment and the separability verdict.
//! - [`abssep`]: eigenvalue orderings, absolutely-PPT tests and special-unitary certificates.
//! - [`document`]: the JSON file formats shared with the command-line tool.

pub mod abssep;
pub mod cldui;
pub mod construct;
pub mod document;
pub mod error;
pub mod linalg;
pub mod pairs;

pub use error::{Error, Result};
pub use linalg::{Complex64, ComplexMatrix, ComplexVector};
pub use pairs::{check_necessary, Condition, NecessaryReport, PairXY, PcpDecomposition};
