//! Simulator for a random-access photonic memory built from several atoms in one optical cavity.

pub mod chain;
pub mod config;
pub mod error;
pub mod fit;
pub mod harness;
pub mod node;
pub mod physics;
pub mod protocol;
pub mod qubit;
pub mod rng;
pub mod tomography;

pub use error::{Error, Result};
