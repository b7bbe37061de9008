//! Exact state-vector simulation of quantum teleportation and two remote
//! state preparation schemes over the resource `cos θ|00⟩ + sin θ|11⟩`,
//! together with CHSH-type and I3322-type correlators for each protocol and
//! a derivative-free optimizer that maximizes them over measurement settings.

pub mod cli;
pub mod correlators;
pub mod error;
pub mod optimizer;
pub mod protocols;
pub mod qcore;
mod sum;

pub use error::{Error, Result};
