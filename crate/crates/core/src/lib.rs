//! Quantum Rabi model in a truncated qubit ⊗ Fock space, with and without the
//! diamagnetic A² term: Hamiltonians, spectra, entanglement and Wigner functions.

pub mod entanglement;
pub mod error;
pub mod fockspace;
pub mod model;
pub mod phasespace;
pub mod spectra;

pub use error::{Error, Result};
