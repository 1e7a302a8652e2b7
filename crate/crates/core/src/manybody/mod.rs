//! Exact dynamics of the Pauli-Fierz Hamiltonian on
//! `(symmetric N-boson lattice states) (x) (truncated photon Fock space)`.
//!
//! Particles live in the plane-wave orbitals of the lattice, so the kinetic
//! term is diagonal and the field couplings shift momenta by the photon
//! momenta. The Hamiltonian is never assembled as one matrix on large spaces;
//! it is kept as a short list of Kronecker products and applied row-wise.

mod basis;
mod hamiltonian;
mod reduced;
mod state;

pub use basis::{CompositeSpace, ParticleBasis, DEFAULT_MAX_DIMENSION};
pub use hamiltonian::{assemble_pauli_fierz, CouplingForm, HamiltonianSpec, KroneckerTerm, PauliFierzOperator};
pub use reduced::{
    first_quantized, photon_correlations, reduced_density_particle, reduced_density_particle_direct,
    reduced_energy_matrix_photon,
};
pub use state::{
    lattice_norm, lattice_wavefunction, orbital_coefficients, product_initial_state, propagate,
    symmetric_power, CompositeState,
};
