use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::lattice::LatticeSpec;

/// Hard cap on the composite dimension unless configured otherwise.
pub const DEFAULT_MAX_DIMENSION: u128 = 5_000_000;

/// Symmetric N-boson states in the occupation representation over the
/// plane-wave orbitals `exp(i p x) / sqrt(M^d)`, one orbital per lattice
/// momentum index.
#[derive(Debug, Clone)]
pub struct ParticleBasis {
    lattice: LatticeSpec,
    particles: usize,
    states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

fn distribute(total: usize, slots: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if slots == 1 {
        prefix.push(total as u8);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first as u8);
        distribute(total - first, slots - 1, prefix, out);
        prefix.pop();
    }
}

impl ParticleBasis {
    pub fn new(lattice: LatticeSpec, particles: usize) -> Result<Self> {
        if particles == 0 || particles > u8::MAX as usize {
            return Err(Error::Config(format!(
                "particle number must be in 1..=255, got {particles}"
            )));
        }
        let mut states = Vec::new();
        distribute(particles, lattice.num_sites(), &mut Vec::new(), &mut states);
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Self {
            lattice,
            particles,
            states,
            index,
        })
    }

    /// `C(orbitals + N - 1, N)`.
    pub fn dimension_for(orbitals: usize, particles: usize) -> u128 {
        let mut acc: u128 = 1;
        for i in 1..=particles as u128 {
            acc = acc * (orbitals as u128 - 1 + i) / i;
        }
        acc
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn orbitals(&self) -> usize {
        self.lattice.num_sites()
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

    /// `b_to^dagger b_from |i>` as `(target index, amplitude)`.
    pub fn hop(&self, i: usize, from: usize, to: usize) -> Option<(usize, f64)> {
        let s = &self.states[i];
        if s[from] == 0 {
            return None;
        }
        if from == to {
            return Some((i, s[from] as f64));
        }
        let mut t = s.clone();
        let mut amp = (t[from] as f64).sqrt();
        t[from] -= 1;
        t[to] += 1;
        amp *= (t[to] as f64).sqrt();
        Some((self.index[&t], amp))
    }
}

/// `(symmetric particles) x (truncated photons)`; composite index is
/// `particle_index * photon_dim + photon_index`.
#[derive(Debug, Clone)]
pub struct CompositeSpace {
    particles: ParticleBasis,
    photons: FockBasis,
}

impl CompositeSpace {
    /// Refuses spaces above `max_dimension` before enumerating anything.
    pub fn new(
        lattice: LatticeSpec,
        particles: usize,
        photons: FockBasis,
        max_dimension: u128,
    ) -> Result<Arc<Self>> {
        let requested = Self::dimension_for(&lattice, particles, photons.modes().len(), photons.max_photons());
        if requested > max_dimension {
            return Err(Error::ResourceCap {
                requested,
                cap: max_dimension,
            });
        }
        if photons.modes().lattice() != &lattice {
            return Err(Error::Config("photon modes live on a different lattice".into()));
        }
        Ok(Arc::new(Self {
            particles: ParticleBasis::new(lattice, particles)?,
            photons,
        }))
    }

    pub fn dimension_for(lattice: &LatticeSpec, particles: usize, modes: usize, max_photons: usize) -> u128 {
        ParticleBasis::dimension_for(lattice.num_sites(), particles)
            * FockBasis::dimension_for(modes, max_photons)
    }

    pub fn particles(&self) -> &ParticleBasis {
        &self.particles
    }

    pub fn photons(&self) -> &FockBasis {
        &self.photons
    }

    pub fn particle_number(&self) -> usize {
        self.particles.particles()
    }

    pub fn lattice(&self) -> &LatticeSpec {
        self.particles.lattice()
    }

    pub fn dim(&self) -> usize {
        self.particles.dim() * self.photons.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_modes::build_mode_set;
    use std::f64::consts::PI;

    #[test]
    fn dimension_is_binomial() {
        let lat = LatticeSpec::new(1, 8, 2.0 * PI).unwrap();
        for n in 1..=4 {
            let b = ParticleBasis::new(lat, n).unwrap();
            assert_eq!(b.dim() as u128, ParticleBasis::dimension_for(8, n));
            for i in 0..b.dim() {
                assert_eq!(b.index_of(b.state(i)), Some(i));
                assert_eq!(b.state(i).iter().map(|&x| x as usize).sum::<usize>(), n);
            }
        }
        assert_eq!(ParticleBasis::dimension_for(8, 6), 1716);
    }

    #[test]
    fn hop_amplitudes() {
        let lat = LatticeSpec::new(1, 4, 1.0).unwrap();
        let b = ParticleBasis::new(lat, 3).unwrap();
        let i = b.index_of(&[2, 1, 0, 0]).unwrap();
        let (j, amp) = b.hop(i, 0, 1).unwrap();
        assert_eq!(b.state(j), &[1, 2, 0, 0]);
        assert!((amp - 2.0).abs() < 1e-15);
        assert_eq!(b.hop(i, 0, 0), Some((i, 2.0)));
        assert_eq!(b.hop(i, 3, 0), None);
    }

    #[test]
    fn cap_is_enforced_before_enumeration() {
        let lat = LatticeSpec::new(1, 8, 2.0 * PI).unwrap();
        let modes = Arc::new(build_mode_set(lat, 2.5).unwrap());
        let fock = FockBasis::new(modes, 6).unwrap();
        match CompositeSpace::new(lat, 6, fock, 1000) {
            Err(Error::ResourceCap { requested, cap }) => {
                assert_eq!(requested, 1716 * 210);
                assert_eq!(cap, 1000);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }
}
