//! One-particle reduced density matrix, photon correlations and the
//! trace-norm distances to the product-state projectors.
//!
//! ```bash
//! cargo run --example reduced_density
//! ```

use std::f64::consts::PI;
use std::sync::Arc;

use pauli_fierz::field_modes::build_mode_set;
use pauli_fierz::fock::FockBasis;
use pauli_fierz::harness::random_composite_state;
use pauli_fierz::lattice::LatticeSpec;
use pauli_fierz::linalg::hermitian_eigen;
use pauli_fierz::manybody::{
    photon_correlations, reduced_density_particle, reduced_density_particle_direct, CompositeSpace,
    DEFAULT_MAX_DIMENSION,
};
use pauli_fierz::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let lat = LatticeSpec::new(1, 4, 2.0 * PI)?;
    let modes = Arc::new(build_mode_set(lat, 1.2)?);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=3 {
        let space = CompositeSpace::new(lat, n, FockBasis::new(modes.clone(), 3)?, DEFAULT_MAX_DIMENSION)?;
        let (state, _, _) = random_composite_state(&space, &mut rng)?;
        let gamma = reduced_density_particle(&state);
        let direct = reduced_density_particle_direct(&state);
        let (occupations, _) = hermitian_eigen(&gamma);
        let photons = photon_correlations(&state);
        println!(
            "N = {n}: dim {}, tr gamma = {:.12}, second-quantized vs first-quantized {:.1e}, largest occupation {:.4}, tr photon correlations {:.4}",
            space.dim(),
            gamma.trace().re,
            (&gamma - &direct).camax(),
            occupations.iter().cloned().fold(f64::MIN, f64::max),
            photons.trace().re
        );
    }
    Ok(())
}
