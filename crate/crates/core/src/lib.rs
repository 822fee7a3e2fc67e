//! Simulation of the q-deformed Dirac oscillator in 2+1 dimensions.
//!
//! The left-handed chiral mode of the oscillator is a single q-deformed boson
//! obeying `a a† - q a† a = 1`. Coupled to the spin it is exactly an
//! anti-Jaynes-Cummings model, so the Hamiltonian splits into independent
//! two-dimensional subspaces `{|n>|up>, |n-1>|down>}`. The crate builds all
//! operators on a truncated Fock space, evaluates the closed-form spectra and
//! Zitterbewegung observables, and cross-checks every closed form against
//! dense brute-force linear algebra.
//!
//! Units: `m c^2 = 1`, `hbar = 1`; energies are in units of `m c^2` and times
//! are the dimensionless `tau = m c^2 t / hbar`.

pub mod dynamics;
pub mod error;
pub mod gridrep;
pub mod linalg;
pub mod nonrel;
pub mod oscillator;
pub mod qalgebra;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
