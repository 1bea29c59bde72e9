//! Equilibrium two-time correlation functions of quantum impurity models.
//!
//! The crate assembles impurity + discretized-environment Hamiltonians
//! (thermofield chain mapping), evolves them with either an exact
//! free-fermion backend or a truncated-Fock exact-diagonalization backend,
//! extracts the reduced dynamical map and its time-local generator, and uses
//! the converged generator to (a) construct the fastest-thermalizing initial
//! state and (b) extrapolate correlation functions beyond the environment
//! memory time. Spectral functions are obtained from a piecewise Fourier
//! transform whose tail is evaluated in closed form from the generator
//! eigendecomposition.

pub mod backends;
pub mod correlators;
pub mod dynamical_map;
pub mod environment;
pub mod error;
pub mod models;
pub mod numerics;

pub use error::CoreError;
pub use numerics::{CMat, CVec, C64};
