//! Simulation of deterministic photon exchange between two flux-tunable
//! transmon modules joined by a multimode coaxial cable.
//!
//! Frequencies are linear (Hz) and times are seconds throughout the library.
//! Hamiltonians are assembled in angular units by multiplying by `2 pi`.

pub mod cli;
pub mod config;
pub mod error;
pub mod fit;
pub mod protocols;
pub mod lindblad;
pub mod network;
pub mod optim;
pub mod optimizer;
pub mod quantum;
pub mod special;
pub mod tomography;

pub use error::{Error, Result};
