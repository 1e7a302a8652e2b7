use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::field_modes::ModeSet;
use crate::sparse::{SparseMatrix, TripletBuilder};
use crate::C64;

/// Occupation vectors `(n_m)` with `sum n_m <= n_tot`, in graded order: by
/// total photon number, then lexicographically with the first mode's
/// occupation descending.
#[derive(Debug, Clone)]
pub struct FockBasis {
    modes: Arc<ModeSet>,
    max_photons: usize,
    states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if parts == 0 {
        if total == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    if parts == 1 {
        prefix.push(total as u8);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first as u8);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

impl FockBasis {
    pub fn new(modes: Arc<ModeSet>, max_photons: usize) -> Result<Self> {
        if max_photons > u8::MAX as usize {
            return Err(Error::Config(format!(
                "photon truncation {max_photons} exceeds {}",
                u8::MAX
            )));
        }
        let mut states = Vec::new();
        for total in 0..=max_photons {
            compositions(total, modes.len(), &mut Vec::new(), &mut states);
            if modes.is_empty() {
                break;
            }
        }
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Self {
            modes,
            max_photons,
            states,
            index,
        })
    }

    /// `C(modes + n_tot, n_tot)` without building the basis.
    pub fn dimension_for(num_modes: usize, max_photons: usize) -> u128 {
        let mut acc: u128 = 1;
        for i in 1..=num_modes as u128 {
            acc = acc * (max_photons as u128 + i) / i;
        }
        acc
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn modes_arc(&self) -> &Arc<ModeSet> {
        &self.modes
    }

    pub fn max_photons(&self) -> usize {
        self.max_photons
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: usize) -> &[u8] {
        &self.states[i]
    }

    pub fn index_of(&self, occupations: &[u8]) -> Option<usize> {
        self.index.get(occupations).copied()
    }

    pub fn total_photons(&self, i: usize) -> usize {
        self.states[i].iter().map(|&n| n as usize).sum()
    }

    pub fn vacuum(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        v[0] = C64::new(1.0, 0.0);
        v
    }

    /// Weight of a photon vector in the top sector `sum n = n_tot`.
    pub fn top_sector_weight(&self, v: &[C64]) -> f64 {
        v.iter()
            .enumerate()
            .filter(|(i, _)| self.total_photons(*i) == self.max_photons)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    /// Indicator of the sub-space `sum n <= n_tot - 1` on which the ladder
    /// algebra is exact.
    pub fn is_safe(&self, i: usize) -> bool {
        self.total_photons(i) < self.max_photons
    }

    pub(crate) fn annihilation_matrix(&self, m: usize) -> SparseMatrix {
        let mut b = TripletBuilder::new(self.dim(), self.dim());
        let mut buf = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            if s[m] == 0 {
                continue;
            }
            buf.clear();
            buf.extend_from_slice(s);
            buf[m] -= 1;
            let j = self.index[&buf];
            b.add(j, i, C64::new((s[m] as f64).sqrt(), 0.0));
        }
        b.build()
    }

    pub(crate) fn number_diagonal(&self, weights: &[f64]) -> SparseMatrix {
        let diag: Vec<C64> = self
            .states
            .iter()
            .map(|s| {
                C64::new(
                    s.iter().zip(weights).map(|(&n, w)| n as f64 * w).sum(),
                    0.0,
                )
            })
            .collect();
        SparseMatrix::diagonal(&diag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Hermitian,
    Ladder,
    Unitary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonOperator {
    pub matrix: SparseMatrix,
    pub kind: OperatorKind,
}

impl PhotonOperator {
    pub fn new(matrix: SparseMatrix, kind: OperatorKind) -> Self {
        Self { matrix, kind }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.matrix.mul_vec(v)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            kind: self.kind,
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        self.matrix.to_dense()
    }

    /// `max |U^dagger U - I|` entry.
    pub fn unitarity_defect(&self) -> f64 {
        let u = self.to_dense();
        let n = u.nrows();
        (u.adjoint() * &u - DMatrix::<C64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// `(a_m, a_m^dagger)` on the truncated space.
pub fn ladder_operators(basis: &FockBasis, mode: usize) -> Result<(PhotonOperator, PhotonOperator)> {
    basis.modes().mode(mode)?;
    let a = basis.annihilation_matrix(mode);
    let ad = a.adjoint();
    Ok((
        PhotonOperator::new(a, OperatorKind::Ladder),
        PhotonOperator::new(ad, OperatorKind::Ladder),
    ))
}

/// `H_f = sum_m |k_m| a_m^dagger a_m`, diagonal in the occupation basis.
pub fn field_energy_operator(basis: &FockBasis) -> PhotonOperator {
    let weights: Vec<f64> = basis.modes().modes().iter().map(|m| m.k_norm()).collect();
    PhotonOperator::new(basis.number_diagonal(&weights), OperatorKind::Hermitian)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_modes::build_mode_set;
    use crate::lattice::LatticeSpec;
    use std::f64::consts::PI;

    fn two_mode_basis(n_tot: usize) -> FockBasis {
        let lat = LatticeSpec::new(1, 4, 2.0 * PI).unwrap();
        let modes = Arc::new(build_mode_set(lat, 1.2).unwrap());
        assert_eq!(modes.len(), 2);
        FockBasis::new(modes, n_tot).unwrap()
    }

    #[test]
    fn dimension_and_ordering() {
        let b = two_mode_basis(3);
        assert_eq!(b.dim(), 10);
        assert_eq!(FockBasis::dimension_for(2, 3), 10);
        assert_eq!(b.state(0), &[0, 0]);
        assert_eq!(b.state(1), &[1, 0]);
        assert_eq!(b.state(2), &[0, 1]);
        assert_eq!(b.state(3), &[2, 0]);
        for i in 0..b.dim() {
            assert_eq!(b.index_of(b.state(i)), Some(i));
        }
    }

    #[test]
    fn vacuum_expectation_of_a_adag() {
        let b = two_mode_basis(3);
        let (a, ad) = ladder_operators(&b, 0).unwrap();
        let v = a.apply(&ad.apply(&b.vacuum()));
        assert!((v[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn creation_on_single_photon() {
        let b = two_mode_basis(3);
        let (_, ad) = ladder_operators(&b, 0).unwrap();
        let mut one = vec![C64::new(0.0, 0.0); b.dim()];
        one[b.index_of(&[1, 0]).unwrap()] = C64::new(1.0, 0.0);
        let out = ad.apply(&one);
        let two = b.index_of(&[2, 0]).unwrap();
        assert!((out[two].re - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn commutator_is_identity_below_top_sector() {
        let b = two_mode_basis(3);
        for m in 0..2 {
            for mp in 0..2 {
                let (a, _) = ladder_operators(&b, m).unwrap();
                let (_, adp) = ladder_operators(&b, mp).unwrap();
                let a = a.to_dense();
                let adp = adp.to_dense();
                let comm = &a * &adp - &adp * &a;
                for i in 0..b.dim() {
                    for j in 0..b.dim() {
                        if !(b.is_safe(i) && b.is_safe(j)) {
                            continue;
                        }
                        let expected = if i == j && m == mp { 1.0 } else { 0.0 };
                        assert!((comm[(i, j)] - C64::new(expected, 0.0)).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn unknown_mode_is_rejected() {
        let b = two_mode_basis(2);
        assert!(matches!(ladder_operators(&b, 5), Err(Error::UnknownMode(5))));
    }

    #[test]
    fn field_energy_is_diagonal_and_nonnegative() {
        let lat = LatticeSpec::new(1, 8, 2.0 * PI).unwrap();
        let modes = Arc::new(build_mode_set(lat, 2.5).unwrap());
        let b = FockBasis::new(modes.clone(), 4).unwrap();
        let hf = field_energy_operator(&b);
        assert_eq!(hf.apply(&b.vacuum())[0], C64::new(0.0, 0.0));
        let m2 = modes.modes().iter().position(|m| m.k[0] == 2.0).unwrap();
        let mut occ = vec![0u8; modes.len()];
        occ[m2] = 3;
        let i = b.index_of(&occ).unwrap();
        assert_eq!(hf.matrix.get(i, i), C64::new(6.0, 0.0));
        assert!(hf.matrix.hermiticity_defect() == 0.0);
    }
}
