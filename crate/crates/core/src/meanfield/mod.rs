//! Maxwell-Schroedinger dynamics with cutoff fields in Coulomb gauge.
//!
//! The fields are kept as Fourier amplitudes on the photon-mode momenta, where
//! the cutoff convolution and the transverse projection are multiplications.
//! The mean-field potential `v * |phi|^2` uses the same tabulated pair
//! potential as the many-body Hamiltonian.

mod fields;
mod solver;

pub use fields::{
    alpha_from_fields, field_energy, initial_fields_from_alpha, longitudinal_residual, transverse_part,
    FieldComponents,
};
pub use solver::{EffectiveState, MaxwellSchrodinger, MsEnergy, MsParams};
