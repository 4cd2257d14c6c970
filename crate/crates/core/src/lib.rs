//! Simulation of a two-photon, four-qubit linear cluster state encoded in the
//! polarization and path of a photon pair.
//!
//! * [`qcore`]: dense 16-dimensional states, density matrices and Pauli strings.
//! * [`states`]: hyperentangled source, half-wave-plate gate, cluster state and
//!   the calibrated noise model.
//! * [`apparatus`]: wave plates, glass phases and beam splitter; observable to
//!   setting mapping; delay scans.
//! * [`verify`]: entanglement witness, fidelity bound, stabilizer checks and
//!   the all-versus-nothing functional.
//! * [`tomo`]: coincidence-count simulation and maximum-likelihood
//!   tomography of the path-conditioned polarization states.
//! * [`cli`]: the `cluster4` command-line driver.

pub mod apparatus;
pub mod cli;
pub mod error;
pub mod qcore;
pub mod states;
pub mod tomo;
pub mod verify;

pub use error::{Error, Result};
pub use qcore::{expectation, fidelity, partial_trace, tensor4, DensityMatrix, Pauli, PauliString, StateVector};
