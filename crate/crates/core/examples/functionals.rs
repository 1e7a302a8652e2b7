//! beta^a, beta^b, beta^c for a product state and the condensation
//! inequalities on random composite states.
//!
//! ```bash
//! cargo run --example functionals
//! ```

use std::f64::consts::PI;
use std::sync::Arc;

use pauli_fierz::field_modes::build_mode_set;
use pauli_fierz::fock::FockBasis;
use pauli_fierz::functionals::lemma_bounds_check;
use pauli_fierz::harness::{initial_data_scan, random_composite_state, ExperimentConfig, Scenario};
use pauli_fierz::lattice::LatticeSpec;
use pauli_fierz::manybody::{CompositeSpace, DEFAULT_MAX_DIMENSION};
use pauli_fierz::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let scn = Scenario::new(ExperimentConfig::default())?;
    for p in initial_data_scan(&scn)? {
        println!("N = {}: a_N = {:.2e} b_N = {:.2e} beta^c(0) = {:.5}", p.n, p.a_n, p.b_n, p.beta_c0);
    }

    let lat = LatticeSpec::new(1, 4, 2.0 * PI)?;
    let modes = Arc::new(build_mode_set(lat, 1.2)?);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=3 {
        let space = CompositeSpace::new(lat, n, FockBasis::new(modes.clone(), 3)?, DEFAULT_MAX_DIMENSION)?;
        let (state, phi, alpha) = random_composite_state(&space, &mut rng)?;
        let b = lemma_bounds_check(&state, &phi, &alpha)?;
        println!(
            "N = {n}: particle {:.4} <= {:.4}, photon {:.4} <= {:.4}, holds {}",
            b.tr_dist_particle,
            b.particle_upper,
            b.tr_dist_photon,
            b.photon_upper,
            b.holds()
        );
    }
    Ok(())
}
