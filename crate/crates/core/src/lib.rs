//! Finite-dimensional convex sequential effect algebras.
//!
//! Two concrete models are provided: the classical algebra of fuzzy events on
//! `n` outcomes with the pointwise product, and the Hilbert-space algebra of
//! operators `0 ≤ A ≤ I` on `C^d` with the Lüders product. On top of them sit
//! contexts and their representation maps, conditioning, and a seeded harness
//! that checks the algebraic laws on random instances.

pub mod classical;
pub mod cli;
pub mod context;
pub mod effect;
pub mod error;
pub mod harness;
pub mod hilbert;
pub mod linalg;
pub mod sequential;

pub use context::Context;
pub use effect::{Effect, Model, OrthSum, State};
pub use error::{Error, Result};
pub use harness::{run_suite, Suite, VerificationReport};
pub use sequential::{seq_product, Measurement, Polynomial};
