//! Occupation-truncated photon Fock space.
//!
//! Continuum-to-lattice dictionary: `a(k, lambda) <-> a_m / sqrt(w)` with
//! `w = dk^d`, so `int d^dk` becomes `sum_m w` and the continuum commutator
//! `delta(k - k')` becomes `delta_mm' / w`. A continuum amplitude `f(k, lambda)`
//! therefore displaces mode `m` by `z_m = sqrt(w) f_m`.
//!
//! The space keeps every occupation vector with total photon number at most
//! `n_tot`. Operators are the Galerkin restrictions of their untruncated
//! counterparts: products are normal ordered before restriction, so the
//! canonical commutation relations hold exactly below the top sector.

mod basis;
mod fields;
mod identities;
mod moments;
mod weyl;

pub use basis::{field_energy_operator, ladder_operators, FockBasis, OperatorKind, PhotonOperator};
pub use fields::{
    classical_electric_positive, classical_vector_potential, field_operators, gamma_perp,
    FieldOperators, LadderField,
};
pub use identities::{
    ccr_defect, field_identity_defect, recommended_truncation, weyl_identity_defects, WeylIdentityDefects,
};
pub use moments::{weyl_state_moments, WeylMoments};
pub use weyl::{
    coherent_state, poisson_tail, suggested_truncation, weyl_operator, CoherentAmplitude,
    DEFAULT_TRUNCATION_TOLERANCE,
};
