//! Pauli-Fierz Hamiltonian on the symmetric N-boson space tensored with the
//! truncated photon space, propagated by Lanczos from a product state.
//!
//! ```bash
//! cargo run --example manybody_propagation
//! ```

use std::f64::consts::PI;
use std::sync::Arc;

use pauli_fierz::field_modes::build_mode_set;
use pauli_fierz::fock::{CoherentAmplitude, FockBasis, DEFAULT_TRUNCATION_TOLERANCE};
use pauli_fierz::harness::{initial_wavefunction, PhiConfig};
use pauli_fierz::krylov::KrylovPropagator;
use pauli_fierz::lattice::LatticeSpec;
use pauli_fierz::manybody::{
    assemble_pauli_fierz, product_initial_state, propagate, CompositeSpace, HamiltonianSpec, DEFAULT_MAX_DIMENSION,
};
use pauli_fierz::potential::PairPotential;
use pauli_fierz::{Result, C64};

fn main() -> Result<()> {
    let lat = LatticeSpec::new(1, 8, 2.0 * PI)?;
    let modes = Arc::new(build_mode_set(lat, 2.0)?);
    let phi = initial_wavefunction(&lat, &PhiConfig::default())?;
    let alpha = CoherentAmplitude::from_entries(&modes, &[(lat.index_of_frequencies([1, 0, 0]), 0, C64::new(0.1, 0.0))])?;
    let spec = HamiltonianSpec::new(PairPotential::gaussian(lat, 1.0, 0.5)?);
    let krylov = KrylovPropagator::new(30, 1e-10);

    for n in [2, 3] {
        let space = Arc::new(CompositeSpace::new(lat, n, FockBasis::new(modes.clone(), 5)?, DEFAULT_MAX_DIMENSION)?);
        let h = assemble_pauli_fierz(&space, &spec)?;
        let mut psi = product_initial_state(&space, &phi, &alpha, DEFAULT_TRUNCATION_TOLERANCE)?;
        let e0 = h.expectation(&psi.amplitudes).re;
        println!("N = {n}: dim {}, hermiticity defect {:.1e}, <H>/N = {:.8}", space.dim(), h.hermiticity_defect(), e0 / n as f64);
        let mut matvecs = 0;
        for _ in 0..10 {
            let (next, stats) = propagate(&psi, &h, 0.1, &krylov)?;
            matvecs += stats.matvecs;
            psi = next;
        }
        let e1 = h.expectation(&psi.amplitudes).re;
        println!(
            "  t = {:.1}: norm - 1 = {:.1e}, energy drift {:.1e}, top sector {:.1e}, {matvecs} matvecs",
            psi.time,
            psi.norm() - 1.0,
            (e1 - e0).abs(),
            psi.top_sector_weight()
        );
    }
    Ok(())
}
