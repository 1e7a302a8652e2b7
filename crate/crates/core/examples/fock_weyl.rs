//! Truncated Fock space: commutation relations on the safe subspace, Weyl
//! operator identities and the truncation rule for coherent states.
//!
//! ```bash
//! cargo run --example fock_weyl
//! ```

use std::f64::consts::PI;
use std::sync::Arc;

use pauli_fierz::field_modes::build_mode_set;
use pauli_fierz::fock::{
    ccr_defect, coherent_state, poisson_tail, recommended_truncation, weyl_identity_defects, CoherentAmplitude,
    FockBasis, DEFAULT_TRUNCATION_TOLERANCE,
};
use pauli_fierz::lattice::LatticeSpec;
use pauli_fierz::{Result, C64};

fn main() -> Result<()> {
    let modes = Arc::new(build_mode_set(LatticeSpec::new(1, 4, 2.0 * PI)?, 1.2)?);
    let f = CoherentAmplitude::new(&modes, vec![C64::new(0.6, 0.2), C64::new(-0.3, 0.4)])?;
    let g = CoherentAmplitude::new(&modes, vec![C64::new(0.1, -0.5), C64::new(0.4, 0.1)])?;
    let mean = f.add(&g).mean_photons(&modes).max(f.mean_photons(&modes));
    let n_tot = recommended_truncation(mean);
    println!("{} modes, mean photon number {mean:.3}, n_tot = {n_tot}", modes.len());

    for n in [n_tot - 4, n_tot - 2, n_tot] {
        let basis = FockBasis::new(modes.clone(), n)?;
        let d = weyl_identity_defects(&basis, &f, &g, DEFAULT_TRUNCATION_TOLERANCE)?;
        println!(
            "n_tot = {n:2} dim = {:4} ccr {:.1e} poisson tail {:.1e} displacement {:.1e} eigenvector {:.1e} composition {:.1e} unitarity {:.1e}",
            basis.dim(),
            ccr_defect(&basis),
            poisson_tail(mean, n),
            d.displacement,
            d.eigenvector,
            d.composition,
            d.unitarity
        );
    }

    let basis = FockBasis::new(modes.clone(), n_tot)?;
    let psi = coherent_state(&basis, &f, DEFAULT_TRUNCATION_TOLERANCE)?;
    println!("coherent state weight in top sector {:.2e}", basis.top_sector_weight(&psi));
    Ok(())
}
