//! Finite-dimensional decoherent-histories quantum mechanics.
//!
//! A closed system is given by its dynamics and an initial state. Sets of
//! alternative histories are built from projector families at a sequence of
//! times; the engine evaluates branch vectors, the decoherence functional
//! and, for decoherent sets, history probabilities. On top of that sit
//! conditional prediction and retrodiction, effective density matrices, a
//! small zoo of measurement models and a scanner that ranks coarse-grainings.

pub mod error;
pub mod history;
pub mod inference;
pub mod linalg;
pub mod models;
pub mod realm;
pub mod tol;

pub use error::{Error, Result};
