//! Exact verification of the spin-matrix factorizations behind the
//! one-photon form of Maxwell's equations, plus a spectral propagator for
//! the Riemann-Silberstein field `psi = E - iB` on a periodic grid.

pub mod cli;
pub mod config;
pub mod error;
pub mod exact;
pub mod fdtd;
pub mod field;
pub mod grid;
pub mod helicity;
pub mod identities;
pub mod poly;
pub mod propagator;
pub mod selftest;
pub mod sim;
pub mod snapshot;
pub mod spectral;
pub mod spin;

pub use error::{Error, Result};
