use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::linalg::inner;
use crate::manybody::state::CompositeState;
use crate::C64;

/// `gamma_pq = N^{-1} <Psi, b_q^dagger b_p Psi>` in the plane-wave orbital basis,
/// so that `<phi, gamma phi> = sum conj(phi_p) gamma_pq phi_q`.
pub fn reduced_density_particle(state: &CompositeState) -> DMatrix<C64> {
    let space = state.space();
    let pb = space.particles();
    let ns = pb.orbitals();
    let n = pb.particles() as f64;
    let rows: Vec<Vec<C64>> = (0..ns)
        .into_par_iter()
        .map(|p| {
            let mut acc = vec![C64::new(0.0, 0.0); ns];
            for i in 0..pb.dim() {
                if pb.state(i)[p] == 0 {
                    continue;
                }
                let xi = state.photon_row(i);
                for (q, slot) in acc.iter_mut().enumerate() {
                    let (j, amp) = pb.hop(i, p, q).expect("occupied");
                    *slot += inner(state.photon_row(j), xi) * amp;
                }
            }
            acc
        })
        .collect();
    DMatrix::from_fn(ns, ns, |p, q| rows[p][q] / n)
}

/// `C_{m m'} = <a_{m'}^dagger a_m>`.
pub fn photon_correlations(state: &CompositeState) -> DMatrix<C64> {
    let fb = state.space().photons();
    let lowered: Vec<Vec<C64>> = (0..fb.modes().len())
        .map(|m| state.apply_photon(&fb.annihilation_matrix(m)))
        .collect();
    let nm = lowered.len();
    DMatrix::from_fn(nm, nm, |m, mp| inner(&lowered[mp], &lowered[m]))
}

/// `gamma^{(0,1)}_{m m'} = N^{-1} sqrt(|k_m| |k_m'|) <a_{m'}^dagger a_m>` in the
/// orthonormal mode basis; its trace is `N^{-1} <H_f>`.
pub fn reduced_energy_matrix_photon(state: &CompositeState) -> DMatrix<C64> {
    let modes = state.space().photons().modes();
    let n = state.space().particle_number() as f64;
    let k: Vec<f64> = modes.modes().iter().map(|m| m.k_norm().sqrt()).collect();
    let c = photon_correlations(state);
    DMatrix::from_fn(c.nrows(), c.ncols(), |m, mp| c[(m, mp)] * (k[m] * k[mp] / n))
}

/// First-quantised amplitudes `psi(p_1, ..., p_N; f)` in the orbital basis,
/// laid out with `p_1` slowest and the photon index fastest.
///
/// Every arrangement of an occupation configuration `n` carries
/// `c(n) sqrt(prod n_p! / N!)`.
pub fn first_quantized(state: &CompositeState) -> Vec<C64> {
    let space = state.space();
    let pb = space.particles();
    let ns = pb.orbitals();
    let n = pb.particles();
    let nf = space.photons().dim();
    let total = ns.pow(n as u32);
    let fact = |k: usize| (1..=k).map(|j| j as f64).product::<f64>();
    let mut out = vec![C64::new(0.0, 0.0); total * nf];
    let mut occ = vec![0u8; ns];
    for idx in 0..total {
        occ.iter_mut().for_each(|o| *o = 0);
        let mut r = idx;
        for _ in 0..n {
            occ[r % ns] += 1;
            r /= ns;
        }
        let i = pb.index_of(&occ).expect("valid configuration");
        let w = (occ.iter().map(|&o| fact(o as usize)).product::<f64>() / fact(n)).sqrt();
        for (f, z) in state.photon_row(i).iter().enumerate() {
            out[idx * nf + f] = z * w;
        }
    }
    out
}

/// Partial trace of the first-quantised amplitudes over particles `2..N` and
/// the photons; direct double sum, for small oracles.
pub fn reduced_density_particle_direct(state: &CompositeState) -> DMatrix<C64> {
    let ns = state.space().particles().orbitals();
    let nf = state.space().photons().dim();
    let psi = first_quantized(state);
    let rest = psi.len() / (ns * nf);
    // p_1 is the fastest particle index in `first_quantized`
    DMatrix::from_fn(ns, ns, |p, q| {
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..rest {
            for f in 0..nf {
                acc += psi[(r * ns + q) * nf + f].conj() * psi[(r * ns + p) * nf + f];
            }
        }
        acc
    })
}
