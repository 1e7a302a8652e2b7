use crate::field_modes::{ModeSet, TransverseProjector};
use crate::fock::basis::{FockBasis, OperatorKind, PhotonOperator};
use crate::fock::weyl::CoherentAmplitude;
use crate::sparse::SparseMatrix;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Positive-frequency part of a quantized field component,
/// `F^+(x) = sum_m c_m a_m`, stored through its per-mode coefficients.
/// The negative-frequency part is the adjoint `sum_m conj(c_m) a_m^dagger`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderField {
    pub coefficients: Vec<[C64; 3]>,
}

impl LadderField {
    fn combine(&self, basis: &FockBasis, component: usize, creation: bool) -> SparseMatrix {
        let n = basis.dim();
        let mut acc = SparseMatrix::zeros(n, n);
        for (m, c) in self.coefficients.iter().enumerate() {
            let c = c[component];
            if c == ZERO {
                continue;
            }
            let a = basis.annihilation_matrix(m);
            let term = if creation {
                a.adjoint().scale(c.conj())
            } else {
                a.scale(c)
            };
            acc = acc.add(&term);
        }
        acc
    }

    pub fn positive(&self, basis: &FockBasis, component: usize) -> PhotonOperator {
        PhotonOperator::new(self.combine(basis, component, false), OperatorKind::Ladder)
    }

    pub fn negative(&self, basis: &FockBasis, component: usize) -> PhotonOperator {
        PhotonOperator::new(self.combine(basis, component, true), OperatorKind::Ladder)
    }

    /// `F^+ + F^-`, hermitian.
    pub fn full(&self, basis: &FockBasis, component: usize) -> PhotonOperator {
        let m = self
            .combine(basis, component, false)
            .add(&self.combine(basis, component, true));
        PhotonOperator::new(m, OperatorKind::Hermitian)
    }

    /// `sum_{y} dx^d kernel(x - y) F(y)` for a family of fields indexed by site.
    pub fn convolve(kernel: &[f64], fields: &[LadderField], site: usize, modes: &ModeSet) -> Self {
        let lat = modes.lattice();
        let dv = lat.cell_volume();
        let mut coefficients = vec![[ZERO; 3]; modes.len()];
        for (y, field) in fields.iter().enumerate() {
            let k = kernel[lat.displacement(site, y)] * dv;
            for (acc, c) in coefficients.iter_mut().zip(&field.coefficients) {
                for i in 0..3 {
                    acc[i] += c[i] * k;
                }
            }
        }
        Self { coefficients }
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self {
            coefficients: self
                .coefficients
                .iter()
                .map(|c| [c[0] * s, c[1] * s, c[2] * s])
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .flat_map(|(a, b)| (0..3).map(move |i| (a[i] - b[i]).norm()))
            .fold(0.0, f64::max)
    }
}

/// Positive-frequency parts of the quantized vector potential and electric
/// field at one lattice site.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldOperators {
    pub vector_potential: LadderField,
    pub electric: LadderField,
}

/// `A^+(x) = sum_m sqrt(w) kappa (2|k|)^{-1/2} eps e^{ikx} a_m` and
/// `E^+(x) = sum_m sqrt(w) kappa sqrt(|k|/2) eps i e^{ikx} a_m`.
pub fn field_operators(basis: &FockBasis, site: usize) -> FieldOperators {
    field_operators_for(basis.modes(), site)
}

pub(crate) fn field_operators_for(modes: &ModeSet, site: usize) -> FieldOperators {
    let lat = modes.lattice();
    let mut a = Vec::with_capacity(modes.len());
    let mut e = Vec::with_capacity(modes.len());
    for mode in modes.modes() {
        let kn = mode.k_norm();
        let phase = lat.plane_wave(mode.momentum_index, site);
        let base = mode.weight.sqrt() * modes.kappa(mode);
        let ca = phase * (base / (2.0 * kn).sqrt());
        let ce = phase * C64::new(0.0, base * (kn / 2.0).sqrt());
        a.push(mode.epsilon.map(|x| ca * x));
        e.push(mode.epsilon.map(|x| ce * x));
    }
    FieldOperators {
        vector_potential: LadderField { coefficients: a },
        electric: LadderField { coefficients: e },
    }
}

/// Classical cutoff vector potential `A_kappa(x) = sum_m w kappa (2|k|)^{-1/2}
/// eps (e^{ikx} alpha_m + c.c.)`.
pub fn classical_vector_potential(modes: &ModeSet, alpha: &CoherentAmplitude, site: usize) -> [f64; 3] {
    let lat = modes.lattice();
    let mut out = [0.0; 3];
    for (mode, a) in modes.modes().iter().zip(alpha.values()) {
        let c = mode.weight * modes.kappa(mode) / (2.0 * mode.k_norm()).sqrt();
        let z = 2.0 * (lat.plane_wave(mode.momentum_index, site) * a).re * c;
        for i in 0..3 {
            out[i] += z * mode.epsilon[i];
        }
    }
    out
}

/// Classical positive-frequency electric field
/// `E^+_kappa(x) = sum_m w kappa sqrt(|k|/2) eps i e^{ikx} alpha_m`.
pub fn classical_electric_positive(modes: &ModeSet, alpha: &CoherentAmplitude, site: usize) -> [C64; 3] {
    let lat = modes.lattice();
    let mut out = [ZERO; 3];
    for (mode, a) in modes.modes().iter().zip(alpha.values()) {
        let c = mode.weight * modes.kappa(mode) * (mode.k_norm() / 2.0).sqrt();
        let z = lat.plane_wave(mode.momentum_index, site) * a * C64::new(0.0, c);
        for i in 0..3 {
            out[i] += z * mode.epsilon[i];
        }
    }
    out
}

/// Discrete transverse kernel `gamma_perp_ij(x) = sum_k w kappa(k)^2 |k|^{-1}
/// e^{ikx} P_ij(k)`, summed over the mode momenta.
pub fn gamma_perp(modes: &ModeSet, displacement: usize) -> [[C64; 3]; 3] {
    let lat = modes.lattice();
    let d = lat.dimension();
    let mut out = [[ZERO; 3]; 3];
    for k in modes.momenta() {
        let kv = lat.momentum(k);
        let kn = crate::lattice::norm(&kv);
        let kappa = crate::field_modes::kappa_profile(kn, modes.cutoff(), d);
        let pref = lat.plane_wave(k, displacement) * (lat.mode_weight() * kappa * kappa / kn);
        let p = TransverseProjector::new(&kv, d);
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] += pref * p.matrix()[i][j];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_modes::build_mode_set;
    use crate::lattice::LatticeSpec;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn vacuum_mean_of_vector_potential_vanishes() {
        let lat = LatticeSpec::new(1, 8, 2.0 * PI).unwrap();
        let modes = Arc::new(build_mode_set(lat, 2.5).unwrap());
        let basis = FockBasis::new(modes, 3).unwrap();
        let vac = basis.vacuum();
        for x in 0..8 {
            let a = field_operators(&basis, x).vector_potential.full(&basis, 0);
            let mean: C64 = crate::linalg::inner(&vac, &a.apply(&vac));
            assert!(mean.norm() < 1e-15);
        }
    }

    #[test]
    fn polarization_sum_reproduces_transverse_kernel() {
        // the gamma_perp route uses projectors; the mode route uses eps eps^T
        let lat = LatticeSpec::new(3, 4, 2.0 * PI).unwrap();
        let modes = build_mode_set(lat, 1.8).unwrap();
        for x in [0usize, 5, 17] {
            let g = gamma_perp(&modes, x);
            let mut h = [[ZERO; 3]; 3];
            for mode in modes.modes() {
                let kn = mode.k_norm();
                let pref = lat.plane_wave(mode.momentum_index, x)
                    * (mode.weight * modes.kappa(mode).powi(2) / kn);
                for i in 0..3 {
                    for j in 0..3 {
                        h[i][j] += pref * mode.epsilon[i] * mode.epsilon[j];
                    }
                }
            }
            for i in 0..3 {
                for j in 0..3 {
                    assert!((g[i][j] - h[i][j]).norm() < 1e-14);
                }
            }
        }
    }
}
