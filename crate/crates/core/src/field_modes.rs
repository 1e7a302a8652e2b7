//! Photon mode geometry: lattice momenta below the UV cutoff, polarization
//! vectors and transverse projectors.
//!
//! In three dimensions every momentum carries two real polarization vectors
//! orthogonal to `k` and to each other. In two dimensions there is one
//! in-plane transverse polarization. In one dimension the field is scalar:
//! one polarization with `epsilon = 1` and the projector is the identity.
//! The zero momentum is never a photon mode.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{dot, norm, LatticeSpec, Vec3};

/// Number of polarizations per momentum in dimension `d`.
pub fn polarization_count(dimension: usize) -> usize {
    if dimension == 3 {
        2
    } else {
        1
    }
}

/// Cutoff profile `(2 pi)^{-d/2} 1_{|k| <= cutoff}`.
pub fn kappa_profile(k_norm: f64, cutoff: f64, dimension: usize) -> f64 {
    if k_norm <= cutoff {
        (2.0 * PI).powf(-(dimension as f64) / 2.0)
    } else {
        0.0
    }
}

/// Second cutoff profile `|k|^{-1} kappa(k)`, set to zero at `k = 0`.
pub fn eta_profile(k_norm: f64, cutoff: f64, dimension: usize) -> f64 {
    if k_norm == 0.0 {
        0.0
    } else {
        kappa_profile(k_norm, cutoff, dimension) / k_norm
    }
}

/// Continuum three dimensional values `(||kappa||^2, ||eta||^2)` =
/// `(cutoff^3 / (6 pi^2), cutoff / (2 pi^2))`.
pub fn cutoff_norms(cutoff: f64) -> (f64, f64) {
    (
        cutoff.powi(3) / (6.0 * PI * PI),
        cutoff / (2.0 * PI * PI),
    )
}

/// Deterministic real polarization basis for momentum `k`.
///
/// In 3d the coordinate axis least aligned with `k` (lowest index on ties) is
/// Gram-Schmidt orthogonalised against `k`; the second vector is `k_hat x e1`.
pub fn polarization_vectors(k: &Vec3, dimension: usize) -> Vec<Vec3> {
    match dimension {
        1 => vec![[1.0, 0.0, 0.0]],
        2 => {
            let n = norm(k);
            vec![[-k[1] / n, k[0] / n, 0.0]]
        }
        _ => {
            let n = norm(k);
            let khat = [k[0] / n, k[1] / n, k[2] / n];
            let mut axis = 0;
            for a in 1..3 {
                if khat[a].abs() < khat[axis].abs() {
                    axis = a;
                }
            }
            let mut e = [0.0; 3];
            e[axis] = 1.0;
            let proj = dot(&e, &khat);
            let mut e1 = [e[0] - proj * khat[0], e[1] - proj * khat[1], e[2] - proj * khat[2]];
            let n1 = norm(&e1);
            e1.iter_mut().for_each(|c| *c /= n1);
            let e2 = [
                khat[1] * e1[2] - khat[2] * e1[1],
                khat[2] * e1[0] - khat[0] * e1[2],
                khat[0] * e1[1] - khat[1] * e1[0],
            ];
            vec![e1, e2]
        }
    }
}

/// `P_ij(k) = delta_ij - k_i k_j / |k|^2`, the identity in one dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseProjector {
    matrix: [[f64; 3]; 3],
}

impl TransverseProjector {
    pub fn new(k: &Vec3, dimension: usize) -> Self {
        let mut matrix = [[0.0; 3]; 3];
        for (i, row) in matrix.iter_mut().enumerate().take(dimension) {
            row[i] = 1.0;
        }
        let k2 = dot(k, k);
        if dimension > 1 && k2 > 0.0 {
            for i in 0..dimension {
                for j in 0..dimension {
                    matrix[i][j] -= k[i] * k[j] / k2;
                }
            }
        }
        Self { matrix }
    }

    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.matrix
    }

    pub fn apply<T>(&self, v: &[T; 3]) -> [T; 3]
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let row = |i: usize| {
            v[0] * self.matrix[i][0] + v[1] * self.matrix[i][1] + v[2] * self.matrix[i][2]
        };
        [row(0), row(1), row(2)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonMode {
    /// Lattice momentum index (FFT ordering).
    pub momentum_index: usize,
    pub k: Vec3,
    pub polarization: usize,
    pub epsilon: Vec3,
    /// Quadrature weight `dk^d`.
    pub weight: f64,
}

impl PhotonMode {
    pub fn k_norm(&self) -> f64 {
        norm(&self.k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    lattice: LatticeSpec,
    cutoff: f64,
    modes: Vec<PhotonMode>,
    /// `lookup[momentum_index * P + polarization]`.
    lookup: Vec<Option<usize>>,
}

/// All lattice momenta with `0 < |k| <= cutoff`.
pub fn build_mode_set(lattice: LatticeSpec, cutoff: f64) -> Result<ModeSet> {
    if !(cutoff > 0.0) {
        return Err(Error::Config(format!("cutoff must be positive, got {cutoff}")));
    }
    if cutoff >= lattice.brillouin_edge() {
        return Err(Error::Config(format!(
            "cutoff {cutoff} reaches the Brillouin zone edge {}",
            lattice.brillouin_edge()
        )));
    }
    let set = ModeSet::with_cutoff(lattice, cutoff);
    if set.is_empty() {
        return Err(Error::Config(format!(
            "no lattice momentum satisfies 0 < |k| <= {cutoff} (momentum spacing {})",
            lattice.momentum_spacing()
        )));
    }
    Ok(set)
}

impl ModeSet {
    fn with_cutoff(lattice: LatticeSpec, cutoff: f64) -> Self {
        let d = lattice.dimension();
        let npol = polarization_count(d);
        let weight = lattice.mode_weight();
        let mut modes = Vec::new();
        let mut lookup = vec![None; lattice.num_sites() * npol];
        for idx in 0..lattice.num_sites() {
            let k = lattice.momentum(idx);
            let kn = norm(&k);
            if kn == 0.0 || kn > cutoff {
                continue;
            }
            for (pol, epsilon) in polarization_vectors(&k, d).into_iter().enumerate() {
                lookup[idx * npol + pol] = Some(modes.len());
                modes.push(PhotonMode {
                    momentum_index: idx,
                    k,
                    polarization: pol,
                    epsilon,
                    weight,
                });
            }
        }
        Self {
            lattice,
            cutoff,
            modes,
            lookup,
        }
    }

    /// A photon sector without modes; the particles then decouple from the field.
    pub fn empty(lattice: LatticeSpec) -> Self {
        let npol = polarization_count(lattice.dimension());
        Self {
            lattice,
            cutoff: 0.0,
            modes: Vec::new(),
            lookup: vec![None; lattice.num_sites() * npol],
        }
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[PhotonMode] {
        &self.modes
    }

    pub fn mode(&self, m: usize) -> Result<&PhotonMode> {
        self.modes.get(m).ok_or(Error::UnknownMode(m))
    }

    pub fn polarizations(&self) -> usize {
        polarization_count(self.lattice.dimension())
    }

    /// Mode index of `(momentum, polarization)`, if it lies below the cutoff.
    pub fn find(&self, momentum_index: usize, polarization: usize) -> Option<usize> {
        let npol = self.polarizations();
        if polarization >= npol {
            return None;
        }
        self.lookup.get(momentum_index * npol + polarization).copied().flatten()
    }

    /// Whether a lattice momentum carries photon modes.
    pub fn contains_momentum(&self, momentum_index: usize) -> bool {
        self.find(momentum_index, 0).is_some()
    }

    /// Distinct lattice momentum indices carrying modes, ascending.
    pub fn momenta(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.modes.iter().map(|m| m.momentum_index).collect();
        out.dedup();
        out
    }

    pub fn kappa(&self, mode: &PhotonMode) -> f64 {
        kappa_profile(mode.k_norm(), self.cutoff, self.lattice.dimension())
    }

    /// Discrete commutator constant `c_Lambda = sum_modes w kappa^2 / (2|k|)`.
    pub fn commutator_constant(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| m.weight * self.kappa(m).powi(2) / (2.0 * m.k_norm()))
            .sum()
    }

    /// Riemann sums `(sum_k w kappa^2, sum_k w eta^2)` over the mode momenta.
    pub fn discrete_cutoff_norms(&self) -> (f64, f64) {
        let d = self.lattice.dimension();
        let w = self.lattice.mode_weight();
        self.momenta().iter().fold((0.0, 0.0), |(a, b), &idx| {
            let kn = norm(&self.lattice.momentum(idx));
            (
                a + w * kappa_profile(kn, self.cutoff, d).powi(2),
                b + w * eta_profile(kn, self.cutoff, d).powi(2),
            )
        })
    }

    /// Position-space kernel `eta(x) = (2 pi)^{-d/2} sum_k w exp(i k x) eta~(k)`
    /// evaluated on every lattice site.
    pub fn eta_kernel(&self) -> Vec<f64> {
        let lat = &self.lattice;
        let d = lat.dimension();
        let pref = (2.0 * PI).powf(-(d as f64) / 2.0) * lat.mode_weight();
        let momenta = self.momenta();
        (0..lat.num_sites())
            .map(|site| {
                momenta
                    .iter()
                    .map(|&k| {
                        let kn = norm(&lat.momentum(k));
                        (lat.plane_wave(k, site) * eta_profile(kn, self.cutoff, d)).re
                    })
                    .sum::<f64>()
                    * pref
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_enumeration() {
        let lat = LatticeSpec::new(1, 8, 2.0 * PI).unwrap();
        let set = build_mode_set(lat, 2.5).unwrap();
        let mut ks: Vec<f64> = set.modes().iter().map(|m| m.k[0]).collect();
        ks.sort_by(f64::total_cmp);
        assert_eq!(ks, vec![-2.0, -1.0, 1.0, 2.0]);
        assert!(set.modes().iter().all(|m| (m.weight - 1.0).abs() < 1e-15));
        assert!(set.modes().iter().all(|m| m.epsilon == [1.0, 0.0, 0.0]));
    }

    #[test]
    fn three_dimensional_shell_brute_force() {
        let lat = LatticeSpec::new(3, 4, 2.0 * PI).unwrap();
        for (cutoff, shell) in [(1.2, 6), (1.5, 18)] {
            let set = build_mode_set(lat, cutoff).unwrap();
            let mut expected = 0;
            for a in -2i64..2 {
                for b in -2i64..2 {
                    for c in -2i64..2 {
                        let r2 = (a * a + b * b + c * c) as f64;
                        if r2 > 0.0 && r2.sqrt() <= cutoff {
                            expected += 1;
                        }
                    }
                }
            }
            // |k| = sqrt(2) < 1.5 already joins the unit shell
            assert_eq!(expected, shell);
            assert_eq!(set.momenta().len(), shell);
            assert_eq!(set.len(), 2 * shell);
        }
    }

    #[test]
    fn polarization_along_z() {
        let eps = polarization_vectors(&[0.0, 0.0, 1.0], 3);
        assert_eq!(eps[0], [1.0, 0.0, 0.0]);
        assert!((eps[1][1] - 1.0).abs() < 1e-15);
        let p = TransverseProjector::new(&[0.0, 0.0, 1.0], 3);
        assert_eq!(
            *p.matrix(),
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]
        );
    }

    #[test]
    fn configuration_errors() {
        let lat = LatticeSpec::new(1, 8, 2.0 * PI).unwrap();
        assert!(build_mode_set(lat, 4.5).is_err());
        assert!(build_mode_set(lat, 0.5).is_err());
        assert!(build_mode_set(lat, -1.0).is_err());
    }

    #[test]
    fn continuum_norm_formulas() {
        let (k1, e1) = cutoff_norms(1.0);
        assert!((k1 - 0.016_886_9).abs() < 1e-7);
        assert!((e1 - 0.050_660_6).abs() < 1e-7);
        let (k2, e2) = cutoff_norms(2.0);
        assert!((k2 - 8.0 / (6.0 * PI * PI)).abs() < 1e-15);
        assert!((e2 - 2.0 / (2.0 * PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn mode_set_closed_under_reflection() {
        let lat = LatticeSpec::new(3, 6, 5.0).unwrap();
        let set = build_mode_set(lat, 2.9).unwrap();
        for m in set.modes() {
            assert!(set.contains_momentum(lat.negate_momentum(m.momentum_index)));
        }
    }
}
