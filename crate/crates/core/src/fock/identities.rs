//! Defect measures for the ladder algebra, Weyl relations and the
//! potential/electric field relation on a truncated Fock space.

use crate::error::Result;
use crate::field_modes::ModeSet;
use crate::fock::basis::FockBasis;
use crate::fock::fields::{field_operators_for, LadderField};
use crate::fock::weyl::{weyl_operator, CoherentAmplitude};
use crate::C64;

/// Largest entry of `[a_m, a_m'^dagger] - delta_mm'` between safe basis states.
pub fn ccr_defect(basis: &FockBasis) -> f64 {
    let ms = basis.modes().len();
    let ann: Vec<_> = (0..ms).map(|m| basis.annihilation_matrix(m).to_dense()).collect();
    let mut worst: f64 = 0.0;
    for m in 0..ms {
        for mp in 0..ms {
            let a = &ann[m];
            let adp = ann[mp].adjoint();
            let comm = a * &adp - &adp * a;
            for i in (0..basis.dim()).filter(|&i| basis.is_safe(i)) {
                for j in (0..basis.dim()).filter(|&j| basis.is_safe(j)) {
                    let expected = if i == j && m == mp { 1.0 } else { 0.0 };
                    worst = worst.max((comm[(i, j)] - C64::new(expected, 0.0)).norm());
                }
            }
        }
    }
    worst
}

/// Squared norms of the residual vectors, the same units as the truncation
/// leakage `1 - ||P psi||^2` they are compared with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylIdentityDefects {
    /// `||(W^* a_m W - a_m - z_m) psi||^2` over the vacuum and one-photon states
    pub displacement: f64,
    /// `||(a_m - z_m) W Omega||^2`
    pub eigenvector: f64,
    /// `||W(f) W(g) Omega - exp(-i Im<f, g>) W(f + g) Omega||^2`
    pub composition: f64,
    /// `max |(W^* W - 1)_ij|`
    pub unitarity: f64,
}

impl WeylIdentityDefects {
    pub fn max(&self) -> f64 {
        self.displacement
            .max(self.eigenvector)
            .max(self.composition)
            .max(self.unitarity)
    }
}

/// Default photon truncation for coherent states of mean photon number `n`:
/// `ceil(n + 6 sqrt(n) + 6)`.
pub fn recommended_truncation(mean_photons: f64) -> usize {
    (mean_photons + 6.0 * mean_photons.sqrt() + 6.0).ceil() as usize
}

pub fn weyl_identity_defects(
    basis: &FockBasis,
    f: &CoherentAmplitude,
    g: &CoherentAmplitude,
    tolerance: f64,
) -> Result<WeylIdentityDefects> {
    let modes = basis.modes();
    let wf = weyl_operator(basis, f, tolerance)?;
    let wg = weyl_operator(basis, g, tolerance)?;
    let wfg = weyl_operator(basis, &f.add(g), tolerance)?;
    let z = f.mode_amplitudes(modes);
    let vac = basis.vacuum();
    let coherent = wf.apply(&vac);

    let low: Vec<Vec<C64>> = (0..basis.dim())
        .filter(|&i| basis.total_photons(i) <= 1)
        .map(|i| {
            let mut v = vec![C64::new(0.0, 0.0); basis.dim()];
            v[i] = C64::new(1.0, 0.0);
            v
        })
        .collect();
    let wf_adj = wf.adjoint();
    let mut displacement: f64 = 0.0;
    let mut eigenvector: f64 = 0.0;
    for (m, zm) in z.iter().enumerate() {
        let a = basis.annihilation_matrix(m);
        for psi in &low {
            let lhs = wf_adj.apply(&a.mul_vec(&wf.apply(psi)));
            let rhs: Vec<C64> = a.mul_vec(psi).iter().zip(psi).map(|(x, p)| x + zm * p).collect();
            displacement = displacement.max(residual_sqr(&lhs, &rhs));
        }
        let lowered = a.mul_vec(&coherent);
        let scaled: Vec<C64> = coherent.iter().map(|c| c * zm).collect();
        eigenvector = eigenvector.max(residual_sqr(&lowered, &scaled));
    }
    let phase = C64::from_polar(1.0, -f.inner(modes, g).im);
    let lhs = wf.apply(&wg.apply(&vac));
    let rhs: Vec<C64> = wfg.apply(&vac).iter().map(|x| x * phase).collect();
    let composition = residual_sqr(&lhs, &rhs);
    Ok(WeylIdentityDefects {
        displacement,
        eigenvector,
        composition,
        unitarity: wf.unitarity_defect(),
    })
}

fn residual_sqr(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>()
}

/// Largest coefficient difference between `A^+(x)` and `-i (eta * E^+)(x)`
/// over all sites; the relation is linear in the ladder operators, so this
/// is an operator identity on every truncation.
pub fn field_identity_defect(modes: &ModeSet) -> f64 {
    let lat = modes.lattice();
    let eta = modes.eta_kernel();
    let fields: Vec<_> = (0..lat.num_sites()).map(|y| field_operators_for(modes, y)).collect();
    let electric: Vec<LadderField> = fields.iter().map(|f| f.electric.clone()).collect();
    let mut worst: f64 = 0.0;
    for (x, f) in fields.iter().enumerate() {
        let conv = LadderField::convolve(&eta, &electric, x, modes).scaled(C64::new(0.0, -1.0));
        worst = worst.max(f.vector_potential.max_abs_diff(&conv));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_modes::build_mode_set;
    use crate::lattice::LatticeSpec;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn commutator_exact_on_safe_states() {
        let lat = LatticeSpec::new(1, 8, 2.0 * PI).unwrap();
        let modes = Arc::new(build_mode_set(lat, 2.0).unwrap());
        let b = FockBasis::new(modes, 4).unwrap();
        assert!(ccr_defect(&b) < 1e-14);
    }

    #[test]
    fn weyl_relations_hold_at_recommended_truncation() {
        let lat = LatticeSpec::new(1, 4, 2.0 * PI).unwrap();
        let modes = Arc::new(build_mode_set(lat, 1.2).unwrap());
        let f = CoherentAmplitude::new(&modes, vec![C64::new(0.6, 0.2), C64::new(-0.3, 0.4)]).unwrap();
        let g = CoherentAmplitude::new(&modes, vec![C64::new(0.1, -0.5), C64::new(0.4, 0.1)]).unwrap();
        let mean = f.add(&g).mean_photons(&modes).max(f.mean_photons(&modes));
        let b = FockBasis::new(modes, recommended_truncation(mean)).unwrap();
        let d = weyl_identity_defects(&b, &f, &g, 1e-6).unwrap();
        assert!(d.max() < 1e-6, "{d:?}");
        assert!(d.composition > 0.0);
    }

    #[test]
    fn potential_is_smoothed_electric_field() {
        for (d, m, cutoff) in [(1, 8, 3.5), (2, 6, 2.1), (3, 4, 1.5)] {
            let lat = LatticeSpec::new(d, m, 2.0 * PI).unwrap();
            let modes = build_mode_set(lat, cutoff).unwrap();
            assert!(field_identity_defect(&modes) < 1e-12);
        }
    }
}
