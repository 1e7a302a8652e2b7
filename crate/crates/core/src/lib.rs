//! Exact Pauli-Fierz many-body dynamics on a periodic lattice with a truncated
//! photon Fock space, the effective Maxwell-Schroedinger dynamics on the same
//! lattice, and the counting functionals that measure how close the two are.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`] and [`field_modes`]: the periodic grid, its momentum modes below
//!   the UV cutoff, polarization bases and transverse projectors.
//! * [`fock`]: the occupation-truncated photon Fock space, ladder and field
//!   operators, Weyl operators and coherent states.
//! * [`manybody`]: symmetric N-boson states tensored with the photon sector,
//!   the Pauli-Fierz Hamiltonian and its Krylov time propagation.
//! * [`meanfield`]: the Maxwell-Schroedinger solver.
//! * [`functionals`]: beta^a, beta^b, beta^c, trace-norm distances and the
//!   inequalities relating them.
//! * [`harness`]: configuration, comparison runs, N sweeps and self checks.
//!
//! Units: hbar = c = e = 1 and twice the particle mass equals one, so the
//! free one-body Hamiltonian is `-Laplacian`.

pub mod error;
pub mod field_modes;
pub mod fock;
pub mod functionals;
pub mod harness;
pub mod krylov;
pub mod lattice;
pub mod linalg;
pub mod manybody;
pub mod potential;
pub mod meanfield;
pub mod sparse;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub type C64 = Complex64;
