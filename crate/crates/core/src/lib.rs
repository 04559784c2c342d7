//! Multipartite geometric quantum discord of N-qubit states.
//!
//! Two routes compute the same quantity: [`closedform::discord_closed`]
//! picks measurement directions greedily from the top eigenvectors of
//! conditional 3×3 matrices, while [`numeric::discord_numeric`] minimizes
//! the Hilbert–Schmidt distance over measurement trees directly.

pub mod bloch;
pub mod cli;
pub mod closedform;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod measurement;
pub mod numeric;
pub mod states;

pub use error::{Error, Result, StateViolation};
