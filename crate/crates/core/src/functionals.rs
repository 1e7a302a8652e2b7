//! Counting functionals comparing a many-body state with mean-field data.
//!
//! With `B_m = |k_m|^{1/2} a_m / sqrt(N)` and the orthonormal-basis mode
//! function `U_m = sqrt(w) u_m`, the field part is
//! `beta^b = sum_m ||(B_m - U_m) Psi||^2`, and `gamma^{(0,1)}_{mm'} = <B_m' Psi, B_m Psi>`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{field_energy_operator, field_operators, weyl_operator, classical_electric_positive, CoherentAmplitude};
use crate::lattice::Spectral;
use crate::linalg::{hermitian_eigen, hermiticity_defect, hilbert_schmidt_norm, inner, norm_sqr, projector};
use crate::manybody::{
    orbital_coefficients, reduced_density_particle, reduced_energy_matrix_photon, CompositeState,
    PauliFierzOperator,
};
use crate::C64;

/// Slack used when checking the inequality chains.
pub const BOUND_SLACK: f64 = 1e-10;

fn orbital(state: &CompositeState, phi: &[C64]) -> Vec<C64> {
    orbital_coefficients(&Spectral::new(*state.space().lattice()), phi)
}

/// `beta^a = 1 - <phi, gamma^{(1,0)} phi>`.
pub fn beta_a(state: &CompositeState, phi: &[C64]) -> f64 {
    let gamma = reduced_density_particle(state);
    beta_a_from_matrix(&gamma, &orbital(state, phi))
}

fn beta_a_from_matrix(gamma: &DMatrix<C64>, orbital: &[C64]) -> f64 {
    let n = orbital.len();
    let mut s = C64::new(0.0, 0.0);
    for p in 0..n {
        for q in 0..n {
            s += orbital[p].conj() * gamma[(p, q)] * orbital[q];
        }
    }
    (1.0 - s.re).max(0.0)
}

/// `beta^b = sum_m w |k_m| ||(a_m / sqrt(w N) - alpha_m) Psi||^2`.
pub fn beta_b(state: &CompositeState, alpha: &CoherentAmplitude) -> f64 {
    let fb = state.space().photons();
    let n = state.space().particle_number() as f64;
    fb.modes()
        .modes()
        .iter()
        .enumerate()
        .map(|(m, mode)| {
            let lowered = state.apply_photon(&fb.annihilation_matrix(m));
            let s = 1.0 / (mode.weight * n).sqrt();
            let a = alpha.values()[m];
            let dist: f64 = lowered
                .iter()
                .zip(&state.amplitudes)
                .map(|(l, x)| (l * s - a * x).norm_sqr())
                .sum();
            mode.weight * mode.k_norm() * dist
        })
        .sum()
}

/// `beta^c = ||(H / N - E_M) Psi||^2`.
pub fn beta_c(state: &CompositeState, hamiltonian: &PauliFierzOperator, energy: f64) -> f64 {
    let n = state.space().particle_number() as f64;
    let h = hamiltonian.apply_vec(&state.amplitudes);
    h.iter()
        .zip(&state.amplitudes)
        .map(|(hx, x)| (hx / n - x * energy).norm_sqr())
        .sum()
}

/// `sum |eigenvalues of (gamma - rho)|`.
pub fn trace_norm_distance(gamma: &DMatrix<C64>, rho: &DMatrix<C64>) -> Result<f64> {
    if gamma.shape() != rho.shape() {
        return Err(Error::DimensionMismatch {
            expected: gamma.nrows(),
            found: rho.nrows(),
        });
    }
    let tol = 1e-10;
    for m in [gamma, rho] {
        let dev = hermiticity_defect(m);
        if dev > tol {
            return Err(Error::NonHermitian { deviation: dev });
        }
    }
    let diff = gamma - rho;
    let herm = (&diff + diff.adjoint()) * C64::new(0.5, 0.0);
    Ok(hermitian_eigen(&herm).0.iter().map(|l| l.abs()).sum())
}

/// Sides of `Tr|gamma - p| <= 2 ||gamma - p||_HS + Tr(gamma - p)` for a rank-one
/// projector `p`; returns `(lhs, rhs)`.
pub fn rank_one_bound(gamma: &DMatrix<C64>, p: &DMatrix<C64>) -> Result<(f64, f64)> {
    let lhs = trace_norm_distance(gamma, p)?;
    let diff = gamma - p;
    Ok((lhs, 2.0 * hilbert_schmidt_norm(&diff) + diff.trace().re))
}

/// Evaluated sides of the condensation inequalities for one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaBounds {
    pub beta_a: f64,
    pub tr_dist_particle: f64,
    /// `sqrt(8 beta^a)`
    pub particle_upper: f64,
    pub beta_b: f64,
    pub tr_dist_photon: f64,
    /// `3 beta^b + 6 ||u|| sqrt(beta^b)`
    pub photon_upper: f64,
    /// `2 ||gamma - p||_HS + Tr(gamma - p)` for the particle matrix
    pub rank_one_particle: f64,
    pub violations: Vec<String>,
}

impl LemmaBounds {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The mode function `u` written in the orthonormal mode basis.
fn orthonormal_u(state: &CompositeState, alpha: &CoherentAmplitude) -> Vec<C64> {
    let modes = state.space().photons().modes();
    alpha.energy_mode(modes).mode_amplitudes(modes)
}

pub fn lemma_bounds_check(state: &CompositeState, phi: &[C64], alpha: &CoherentAmplitude) -> Result<LemmaBounds> {
    let gamma = reduced_density_particle(state);
    let orb = orbital(state, phi);
    let p = projector(&orb);
    let ba = beta_a_from_matrix(&gamma, &orb);
    let tr_p = trace_norm_distance(&gamma, &p)?;
    let (_, rank_one) = rank_one_bound(&gamma, &p)?;

    let bb = beta_b(state, alpha);
    let u = orthonormal_u(state, alpha);
    let u_norm = norm_sqr(&u).sqrt();
    let gamma_f = reduced_energy_matrix_photon(state);
    let tr_f = trace_norm_distance(&gamma_f, &projector(&u))?;

    let out = LemmaBounds {
        beta_a: ba,
        tr_dist_particle: tr_p,
        particle_upper: (8.0 * ba).sqrt(),
        beta_b: bb,
        tr_dist_photon: tr_f,
        photon_upper: 3.0 * bb + 6.0 * u_norm * bb.sqrt(),
        rank_one_particle: rank_one,
        violations: Vec::new(),
    };
    let mut violations = Vec::new();
    let mut check = |name: &str, lhs: f64, rhs: f64| {
        if !(lhs <= rhs + BOUND_SLACK) {
            violations.push(format!("{name}: {lhs:.6e} > {rhs:.6e}"));
        }
    };
    check("beta_a <= Tr|gamma - p|", out.beta_a, out.tr_dist_particle);
    check("Tr|gamma - p| <= sqrt(8 beta_a)", out.tr_dist_particle, out.particle_upper);
    check("Tr|gamma - p| <= 2||gamma - p||_HS + Tr(gamma - p)", out.tr_dist_particle, out.rank_one_particle);
    check("Tr|gamma_f - |u><u|| <= 3 beta_b + 6||u|| sqrt(beta_b)", out.tr_dist_photon, out.photon_upper);
    Ok(LemmaBounds { violations, ..out })
}

/// `(a_N, b_N, c_N)` for an initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub a_n: f64,
    pub b_n: f64,
    pub c_n: f64,
}

/// `a_N = Tr|gamma - |phi><phi||`, `b_N = N^{-1} <W^* Psi, H_f W^* Psi>` with
/// `W = W(sqrt(N) alpha)`, `c_N = ||(H/N - E_M) Psi||^2`.
pub fn initial_condition_values(
    state: &CompositeState,
    phi: &[C64],
    alpha: &CoherentAmplitude,
    hamiltonian: &PauliFierzOperator,
    energy: f64,
    truncation_tolerance: f64,
) -> Result<InitialData> {
    let space = state.space();
    let fb = space.photons();
    let n = space.particle_number() as f64;
    let gamma = reduced_density_particle(state);
    let a_n = trace_norm_distance(&gamma, &projector(&orbital(state, phi)))?;
    let w_inv = weyl_operator(fb, &alpha.scaled(-n.sqrt()), truncation_tolerance)?;
    let chi = state.apply_photon(&w_inv.matrix);
    let hf = field_energy_operator(fb);
    let hchi = CompositeState::new(space.clone(), chi.clone(), state.time)?.apply_photon(&hf.matrix);
    let b_n = inner(&chi, &hchi).re / n;
    let c_n = beta_c(state, hamiltonian, energy);
    Ok(InitialData { a_n, b_n, c_n })
}

/// `sum_y dx^d ||(E^+(y) / sqrt(N) - E^+_classical(y)) Psi||^2`.
pub fn field_fluctuation_integral(state: &CompositeState, alpha: &CoherentAmplitude) -> f64 {
    let space = state.space();
    let fb = space.photons();
    let lat = *space.lattice();
    let n = space.particle_number() as f64;
    let mut total = 0.0;
    for y in 0..lat.num_sites() {
        let ops = field_operators(fb, y).electric;
        let classical = classical_electric_positive(fb.modes(), alpha, y);
        for (i, c) in classical.iter().enumerate() {
            if ops.coefficients.iter().all(|v| v[i] == C64::new(0.0, 0.0)) {
                continue;
            }
            let e = state.apply_photon(&ops.positive(fb, i).matrix);
            let s: f64 = e
                .iter()
                .zip(&state.amplitudes)
                .map(|(ex, x)| (ex / n.sqrt() - c * x).norm_sqr())
                .sum();
            total += s * lat.cell_volume();
        }
    }
    total
}

/// One time sample of the comparison; the field names follow the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaReport {
    pub t: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub beta_a: f64,
    pub beta_b: f64,
    pub beta_c: f64,
    pub beta: f64,
    pub tr_dist_particle: f64,
    pub tr_dist_photon: f64,
    #[serde(rename = "E_M")]
    pub e_m: f64,
    #[serde(rename = "E_many_per_N")]
    pub e_many_per_n: f64,
    pub gauge_residual: f64,
    pub norm_phi: f64,
    #[serde(rename = "norm_Psi")]
    pub norm_psi: f64,
    pub leakage: f64,
}

pub const CSV_HEADER: &str = "t,N,Lambda,beta_a,beta_b,beta_c,beta,tr_dist_particle,tr_dist_photon,E_M,E_many_per_N,gauge_residual,norm_phi,norm_Psi,leakage";

impl BetaReport {
    /// Finite, nonnegative parts and `beta` equal to their sum.
    pub fn validate(&self) -> Result<()> {
        let parts = [
            ("beta_a", self.beta_a),
            ("beta_b", self.beta_b),
            ("beta_c", self.beta_c),
            ("beta", self.beta),
            ("tr_dist_particle", self.tr_dist_particle),
            ("tr_dist_photon", self.tr_dist_photon),
            ("gauge_residual", self.gauge_residual),
            ("leakage", self.leakage),
        ];
        for (name, v) in parts {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Instability {
                    time: self.t,
                    detail: format!("{name} = {v} is not a finite nonnegative number"),
                });
            }
        }
        if self.beta != self.beta_a + self.beta_b + self.beta_c {
            return Err(Error::Instability {
                time: self.t,
                detail: "beta is not the sum of its parts".into(),
            });
        }
        Ok(())
    }
}

/// Mean-field data at one time, as needed by [`beta_report`].
#[derive(Debug, Clone)]
pub struct MeanFieldSample<'a> {
    pub phi: &'a [C64],
    pub alpha: &'a CoherentAmplitude,
    pub energy: f64,
    pub gauge_residual: f64,
    pub norm_phi: f64,
}

pub fn beta_report(
    state: &CompositeState,
    hamiltonian: &PauliFierzOperator,
    sample: &MeanFieldSample<'_>,
) -> Result<BetaReport> {
    let space = state.space();
    let n = space.particle_number();
    let gamma = reduced_density_particle(state);
    let orb = orbital(state, sample.phi);
    let ba = beta_a_from_matrix(&gamma, &orb);
    let tr_p = trace_norm_distance(&gamma, &projector(&orb))?;
    let bb = beta_b(state, sample.alpha);
    let u = orthonormal_u(state, sample.alpha);
    let tr_f = trace_norm_distance(&reduced_energy_matrix_photon(state), &projector(&u))?;
    let h = hamiltonian.apply_vec(&state.amplitudes);
    let nf = n as f64;
    let e_many = inner(&state.amplitudes, &h).re / nf;
    let bc: f64 = h
        .iter()
        .zip(&state.amplitudes)
        .map(|(hx, x)| (hx / nf - x * sample.energy).norm_sqr())
        .sum();
    let report = BetaReport {
        t: state.time,
        n,
        lambda: space.photons().modes().cutoff(),
        beta_a: ba,
        beta_b: bb,
        beta_c: bc,
        beta: ba + bb + bc,
        tr_dist_particle: tr_p,
        tr_dist_photon: tr_f,
        e_m: sample.energy,
        e_many_per_n: e_many,
        gauge_residual: sample.gauge_residual,
        norm_phi: sample.norm_phi,
        norm_psi: state.norm(),
        leakage: state.top_sector_weight(),
    };
    report.validate()?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_modes::build_mode_set;
    use crate::fock::FockBasis;
    use crate::lattice::LatticeSpec;
    use crate::manybody::{lattice_norm, product_initial_state, CompositeSpace};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn space(n: usize, n_tot: usize) -> Arc<CompositeSpace> {
        let lat = LatticeSpec::new(1, 4, 2.0 * PI).unwrap();
        let modes = Arc::new(build_mode_set(lat, 1.2).unwrap());
        CompositeSpace::new(lat, n, FockBasis::new(modes, n_tot).unwrap(), 1 << 20).unwrap()
    }

    fn normalized_phi(lat: &LatticeSpec) -> Vec<C64> {
        let phi: Vec<C64> = (0..lat.num_sites())
            .map(|x| C64::from_polar(1.0 + 0.25 * (x as f64).cos(), 0.4 * x as f64))
            .collect();
        let s = lattice_norm(lat, &phi);
        phi.iter().map(|z| z / s).collect()
    }

    #[test]
    fn trace_norm_examples() {
        let e1 = projector(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let e2 = projector(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(trace_norm_distance(&e1, &e1).unwrap() < 1e-15);
        assert!((trace_norm_distance(&e1, &e2).unwrap() - 2.0).abs() < 1e-14);
        let bad = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
        assert!(matches!(trace_norm_distance(&bad, &e1), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn trace_norm_equals_singular_value_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a = DMatrix::from_fn(5, 5, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let b = DMatrix::from_fn(5, 5, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let (a, b) = (&a * a.adjoint(), &b + b.adjoint());
            let svd: f64 = (&a - &b).singular_values().iter().sum();
            assert!((trace_norm_distance(&a, &b).unwrap() - svd).abs() < 1e-10);
        }
    }

    #[test]
    fn product_state_has_vanishing_functionals() {
        let sp = space(2, 8);
        let lat = *sp.lattice();
        let phi = normalized_phi(&lat);
        let modes = sp.photons().modes();
        let alpha = CoherentAmplitude::new(modes, vec![C64::new(0.15, -0.1), C64::new(0.05, 0.0)]).unwrap();
        let st = product_initial_state(&sp, &phi, &alpha, 1e-6).unwrap();
        assert!(beta_a(&st, &phi) < 1e-14);
        assert!(beta_b(&st, &alpha) < 1e-6);
        let b = lemma_bounds_check(&st, &phi, &alpha).unwrap();
        assert!(b.holds(), "{:?}", b.violations);
        assert!(b.tr_dist_particle < 1e-12);
    }

    #[test]
    fn single_photon_beta_b() {
        let sp = space(3, 2);
        let fb = sp.photons();
        let modes = fb.modes();
        for m in 0..modes.len() {
            let mut occ = vec![0u8; modes.len()];
            occ[m] = 1;
            let f = fb.index_of(&occ).unwrap();
            let mut amps = vec![C64::new(0.0, 0.0); sp.dim()];
            amps[f] = C64::new(1.0, 0.0);
            let st = CompositeState::new(sp.clone(), amps, 0.0).unwrap();
            let bb = beta_b(&st, &CoherentAmplitude::zeros(modes));
            // w = 1 here
            assert!((bb - modes.modes()[m].k_norm() / 3.0).abs() < 1e-15);
            let fluct = field_fluctuation_integral(&st, &CoherentAmplitude::zeros(modes));
            assert!((fluct - 0.5 * bb).abs() < 1e-13);
        }
    }

    #[test]
    fn particle_orthogonal_to_condensate_gives_unit_beta_a() {
        let sp = space(1, 1);
        let lat = *sp.lattice();
        let v = 1.0 / lat.volume().sqrt();
        let phi: Vec<C64> = (0..4).map(|x| lat.plane_wave(0, x) * v).collect();
        let mut amps = vec![C64::new(0.0, 0.0); sp.dim()];
        let i = sp.particles().index_of(&[0, 1, 0, 0]).unwrap();
        amps[i * sp.photons().dim()] = C64::new(1.0, 0.0);
        let st = CompositeState::new(sp.clone(), amps, 0.0).unwrap();
        assert!((beta_a(&st, &phi) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn report_rejects_inconsistent_sums() {
        let mut r = BetaReport {
            t: 0.0,
            n: 2,
            lambda: 1.0,
            beta_a: 0.1,
            beta_b: 0.2,
            beta_c: 0.3,
            beta: 0.0,
            tr_dist_particle: 0.0,
            tr_dist_photon: 0.0,
            e_m: 0.0,
            e_many_per_n: 0.0,
            gauge_residual: 0.0,
            norm_phi: 1.0,
            norm_psi: 1.0,
            leakage: 0.0,
        };
        assert!(r.validate().is_err());
        r.beta = r.beta_a + r.beta_b + r.beta_c;
        assert!(r.validate().is_ok());
        r.beta_b = f64::NAN;
        assert!(r.validate().is_err());
    }
}
