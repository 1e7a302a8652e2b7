//! Momentum modes below the UV cutoff and their polarization vectors.
//!
//! ```bash
//! cargo run --example lattice_modes
//! ```

use std::f64::consts::PI;

use pauli_fierz::field_modes::build_mode_set;
use pauli_fierz::lattice::LatticeSpec;
use pauli_fierz::Result;

fn main() -> Result<()> {
    for (d, m, cutoff) in [(1, 8, 2.0), (2, 6, 1.5), (3, 4, 1.5)] {
        let lat = LatticeSpec::new(d, m, 2.0 * PI)?;
        let modes = build_mode_set(lat, cutoff)?;
        let (n2, n_inv) = modes.discrete_cutoff_norms();
        println!(
            "d = {d}, M = {m}, Lambda = {cutoff}: {} momenta, {} modes, w = {:.4}, c_Lambda = {:.5}, norms {n2:.4} {n_inv:.4}",
            modes.momenta().len(),
            modes.len(),
            lat.mode_weight(),
            modes.commutator_constant(),
        );
        for mode in modes.modes().iter().take(4) {
            println!(
                "  k = {:?} |k| = {:.3} lambda = {} eps = {:?} kappa = {:.4}",
                mode.k,
                mode.k_norm(),
                mode.polarization,
                mode.epsilon,
                modes.kappa(mode)
            );
        }
    }
    Ok(())
}
