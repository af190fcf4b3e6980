//! Pragmatic speaker simulation over finite world spaces.
//!
//! Speaker families (uniform, factorized, static and dynamic RSA, Gricean,
//! nonredundant) produce exact text marginals, which feed the distributional
//! entailment tests, the corpus estimators and the concentration bounds.

pub mod enttest;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod logspace;
pub mod marginal;
pub mod semantics;
pub mod speakers;

pub use error::{Error, Result};
