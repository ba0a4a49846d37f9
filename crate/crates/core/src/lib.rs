//! Variational ground states of n-level atoms in multimode cavities with
//! dipole-dipole interactions.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod phase;
pub mod two_level;
pub mod variational;

pub use error::{Error, Result};
