//! Field moments in the Weyl state W(sqrt(N) alpha) Omega against their
//! closed forms, in one, two and three dimensions.
//!
//! ```bash
//! cargo run --example coherent_moments
//! ```

use std::f64::consts::PI;
use std::sync::Arc;

use pauli_fierz::field_modes::build_mode_set;
use pauli_fierz::fock::{
    coherent_state, recommended_truncation, weyl_state_moments, CoherentAmplitude, FockBasis, WeylMoments,
    DEFAULT_TRUNCATION_TOLERANCE,
};
use pauli_fierz::lattice::LatticeSpec;
use pauli_fierz::{Result, C64};

fn main() -> Result<()> {
    for (d, m, cutoff, scale, particles) in [(1, 8, 2.0, 0.15, 3), (2, 4, 1.2, 0.08, 2), (3, 4, 1.2, 0.05, 2)] {
        let modes = Arc::new(build_mode_set(LatticeSpec::new(d, m, 2.0 * PI)?, cutoff)?);
        let values = (0..modes.len()).map(|i| C64::from_polar(scale, 0.7 * i as f64)).collect();
        let alpha = CoherentAmplitude::new(&modes, values)?;
        let z = alpha.scaled((particles as f64).sqrt());
        let basis = FockBasis::new(modes.clone(), recommended_truncation(z.mean_photons(&modes)))?;
        let psi = coherent_state(&basis, &z, DEFAULT_TRUNCATION_TOLERANCE)?;
        let (x, y) = (1, modes.lattice().num_sites() - 1);
        let measured = WeylMoments::measure(&basis, &psi, particles, x, y);
        let exact = weyl_state_moments(&modes, &alpha, particles, x, y);
        println!("d = {d}: {} modes, n_tot = {}, dim = {}", modes.len(), basis.max_photons(), basis.dim());
        println!("  <H_f>/N measured {:.8} exact {:.8}", measured.field_energy.re, exact.field_energy.re);
        for (name, err) in measured.relative_errors(&exact) {
            println!("  {name:<22} relative error {err:.2e}");
        }
    }
    Ok(())
}
