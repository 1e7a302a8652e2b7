use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{coherent_state, CoherentAmplitude};
use crate::krylov::{KrylovPropagator, KrylovStats};
use crate::lattice::{LatticeSpec, Spectral};
use crate::linalg::norm;
use crate::manybody::basis::CompositeSpace;
use crate::manybody::hamiltonian::PauliFierzOperator;
use crate::sparse::SparseMatrix;
use crate::C64;

#[derive(Debug, Clone)]
pub struct CompositeState {
    space: Arc<CompositeSpace>,
    pub amplitudes: Vec<C64>,
    pub time: f64,
}

impl CompositeState {
    pub fn new(space: Arc<CompositeSpace>, amplitudes: Vec<C64>, time: f64) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            space,
            amplitudes,
            time,
        })
    }

    pub fn space(&self) -> &Arc<CompositeSpace> {
        &self.space
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// Row `ip` of the `particle x photon` coefficient matrix.
    pub fn photon_row(&self, ip: usize) -> &[C64] {
        let nf = self.space.photons().dim();
        &self.amplitudes[ip * nf..(ip + 1) * nf]
    }

    /// `(1 (x) F) Psi`.
    pub fn apply_photon(&self, f: &SparseMatrix) -> Vec<C64> {
        let nf = self.space.photons().dim();
        let mut out = vec![C64::new(0.0, 0.0); self.amplitudes.len()];
        out.par_chunks_mut(nf)
            .zip(self.amplitudes.par_chunks(nf))
            .with_min_len(16)
            .for_each(|(o, x)| f.apply(x, o));
        out
    }

    /// Weight of the top photon sector `sum n = n_tot`.
    pub fn top_sector_weight(&self) -> f64 {
        let fb = self.space.photons();
        let nf = fb.dim();
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| fb.total_photons(i % nf) == fb.max_photons())
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }
}

/// Plane-wave orbital coefficients of a lattice wavefunction normalised by
/// `sum_x dx^d |phi|^2 = 1`: the unitary DFT of `sqrt(dx^d) phi`.
pub fn orbital_coefficients(spectral: &Spectral, phi: &[C64]) -> Vec<C64> {
    let s = spectral.lattice().cell_volume().sqrt();
    let scaled: Vec<C64> = phi.iter().map(|z| z * s).collect();
    spectral.forward_unitary(&scaled)
}

/// Inverse of [`orbital_coefficients`].
pub fn lattice_wavefunction(spectral: &Spectral, coefficients: &[C64]) -> Vec<C64> {
    let s = 1.0 / spectral.lattice().cell_volume().sqrt();
    spectral
        .inverse_unitary(coefficients)
        .into_iter()
        .map(|z| z * s)
        .collect()
}

/// `sum_x dx^d |phi(x)|^2`.
pub fn lattice_norm(lattice: &LatticeSpec, phi: &[C64]) -> f64 {
    (phi.iter().map(|z| z.norm_sqr()).sum::<f64>() * lattice.cell_volume()).sqrt()
}

/// Symmetric tensor power of one orbital vector:
/// `c(n) = sqrt(N! / prod n_p!) prod_p phi_p^{n_p}`.
pub fn symmetric_power(space: &CompositeSpace, orbital: &[C64]) -> Vec<C64> {
    let pb = space.particles();
    let n = pb.particles();
    let log_fact = |k: usize| (1..=k).map(|j| (j as f64).ln()).sum::<f64>();
    let ln_n = log_fact(n);
    (0..pb.dim())
        .map(|i| {
            let s = pb.state(i);
            let mut z = C64::new(1.0, 0.0);
            let mut lf = 0.0;
            for (p, &o) in s.iter().enumerate() {
                if o > 0 {
                    z *= orbital[p].powu(o as u32);
                    lf += log_fact(o as usize);
                }
            }
            z * (0.5 * (ln_n - lf)).exp()
        })
        .collect()
}

/// `phi^{(x)N} (x) W(sqrt(N) alpha) Omega`.
pub fn product_initial_state(
    space: &Arc<CompositeSpace>,
    phi: &[C64],
    alpha: &CoherentAmplitude,
    truncation_tolerance: f64,
) -> Result<CompositeState> {
    let lat = *space.lattice();
    if phi.len() != lat.num_sites() {
        return Err(Error::DimensionMismatch {
            expected: lat.num_sites(),
            found: phi.len(),
        });
    }
    let nrm = lattice_norm(&lat, phi);
    if (nrm - 1.0).abs() > 1e-10 {
        return Err(Error::Config(format!("one-body wavefunction has norm {nrm}, expected 1")));
    }
    let spectral = Spectral::new(lat);
    let orbital = orbital_coefficients(&spectral, phi);
    let particle = symmetric_power(space, &orbital);
    let n = space.particle_number() as f64;
    let photon = coherent_state(space.photons(), &alpha.scaled(n.sqrt()), truncation_tolerance)?;
    let mut amplitudes = Vec::with_capacity(space.dim());
    for p in &particle {
        amplitudes.extend(photon.iter().map(|f| p * f));
    }
    CompositeState::new(space.clone(), amplitudes, 0.0)
}

/// `exp(-i dt H) Psi` by Lanczos propagation.
pub fn propagate(
    state: &CompositeState,
    hamiltonian: &PauliFierzOperator,
    dt: f64,
    propagator: &KrylovPropagator,
) -> Result<(CompositeState, KrylovStats)> {
    if state.space.dim() != hamiltonian.space().dim() {
        return Err(Error::DimensionMismatch {
            expected: hamiltonian.space().dim(),
            found: state.space.dim(),
        });
    }
    let (amplitudes, stats) = propagator.propagate(hamiltonian, &state.amplitudes, dt)?;
    Ok((
        CompositeState {
            space: state.space.clone(),
            amplitudes,
            time: state.time + dt,
        },
        stats,
    ))
}
