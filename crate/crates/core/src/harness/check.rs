use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field_modes::build_mode_set;
use crate::fock::{
    ccr_defect, coherent_state, field_identity_defect, recommended_truncation, weyl_identity_defects,
    weyl_state_moments, CoherentAmplitude, FockBasis, WeylMoments,
};
use crate::functionals::{beta_c, initial_condition_values, lemma_bounds_check};
use crate::harness::config::{ExperimentConfig, Scenario};
use crate::harness::run::{run_ms, run_quantum, RunOptions};
use crate::krylov::KrylovPropagator;
use crate::lattice::LatticeSpec;
use crate::linalg::{hermitian_eigen, max_abs_diff, unitary_exponential};
use crate::manybody::{
    assemble_pauli_fierz, first_quantized, lattice_norm, product_initial_state, propagate, reduced_density_particle,
    reduced_density_particle_direct, reduced_energy_matrix_photon, CompositeSpace, CompositeState, CouplingForm,
    HamiltonianSpec,
};
use crate::meanfield::{MaxwellSchrodinger, MsParams};
use crate::potential::PairPotential;
use crate::C64;

/// Deliberate defects used to confirm that the corresponding check can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Feed the untransformed current into the Maxwell equations.
    DropTransverseProjection,
    /// Use `2 A . p` instead of `p . A + A . p` in the many-body coupling.
    UnsymmetrizedCoupling,
}

impl std::str::FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "drop-transverse-projection" => Ok(Fault::DropTransverseProjection),
            "unsymmetrized-coupling" => Ok(Fault::UnsymmetrizedCoupling),
            _ => Err(format!(
                "unknown fault {s:?}; expected drop-transverse-projection or unsymmetrized-coupling"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub config_hash: String,
    pub fault: Option<Fault>,
    pub checks: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Suite {
    checks: Vec<CheckOutcome>,
}

impl Suite {
    /// Runs `f`, which returns `(value, threshold, detail)`; passes when
    /// `value <= threshold`. An error counts as a failure.
    fn run(&mut self, name: &str, f: impl FnOnce() -> Result<(f64, f64, String)>) {
        let start = Instant::now();
        let outcome = match f() {
            Ok((value, threshold, detail)) => CheckOutcome {
                name: name.into(),
                passed: value <= threshold,
                value,
                threshold,
                detail,
                seconds: 0.0,
            },
            Err(e) => CheckOutcome {
                name: name.into(),
                passed: false,
                value: f64::NAN,
                threshold: f64::NAN,
                detail: format!("{}: {e}", e.code()),
                seconds: 0.0,
            },
        };
        self.checks.push(CheckOutcome {
            seconds: start.elapsed().as_secs_f64(),
            ..outcome
        });
    }
}

fn small_lattice() -> LatticeSpec {
    LatticeSpec::new(1, 4, 2.0 * PI).expect("valid lattice")
}

/// `N` particles on four sites with the two `|k| = 1` modes.
fn small_space(n: usize, n_tot: usize) -> Result<Arc<CompositeSpace>> {
    let lat = small_lattice();
    let modes = Arc::new(build_mode_set(lat, 1.2)?);
    CompositeSpace::new(lat, n, FockBasis::new(modes, n_tot)?, 1 << 22)
}

fn random_c64(rng: &mut ChaCha8Rng, scale: f64) -> C64 {
    C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

fn random_phi(lat: &LatticeSpec, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let phi: Vec<C64> = (0..lat.num_sites()).map(|_| random_c64(rng, 1.0)).collect();
    let s = lattice_norm(lat, &phi);
    phi.iter().map(|z| z / s).collect()
}

/// A normalized state near a product state with random one-body data, plus
/// the (independently perturbed) one-body data to compare it with.
///
/// The distance from the product scales like `10^u`, `u` uniform in `[-4, 1]`,
/// so the draws range from nearly condensed to essentially random.
pub fn random_composite_state(
    space: &Arc<CompositeSpace>,
    rng: &mut ChaCha8Rng,
) -> Result<(CompositeState, Vec<C64>, CoherentAmplitude)> {
    let lat = *space.lattice();
    let modes = space.photons().modes();
    let phi = random_phi(&lat, rng);
    let alpha = CoherentAmplitude::new(modes, (0..modes.len()).map(|_| random_c64(rng, 0.3)).collect())?;
    let product = product_initial_state(space, &phi, &alpha, 1e-2)?;
    let noise = 10f64.powf(rng.gen_range(-4.0..1.0));
    let mut amps: Vec<C64> = product
        .amplitudes
        .iter()
        .map(|z| z + random_c64(rng, noise))
        .collect();
    let s = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|z| *z /= s);

    let shift = 10f64.powf(rng.gen_range(-4.0..0.0));
    let phi_cmp: Vec<C64> = phi.iter().map(|z| z + random_c64(rng, shift)).collect();
    let s = lattice_norm(&lat, &phi_cmp);
    let phi_cmp = phi_cmp.iter().map(|z| z / s).collect();
    let alpha_cmp = alpha.add(&CoherentAmplitude::new(
        modes,
        (0..modes.len()).map(|_| random_c64(rng, shift)).collect(),
    )?);
    Ok((CompositeState::new(space.clone(), amps, 0.0)?, phi_cmp, alpha_cmp))
}

fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    hermitian_eigen(&h).0.into_iter().fold(f64::INFINITY, f64::min)
}

/// Runs the property suite at reduced sizes. Individual failures are
/// reported in the returned value; only configuration errors are returned
/// as `Err`.
pub fn self_check(cfg: &ExperimentConfig, fault: Option<Fault>) -> Result<CheckReport> {
    let scn = Scenario::new(cfg.clone())?;
    let mut suite = Suite { checks: Vec::new() };
    let coupling = match fault {
        Some(Fault::UnsymmetrizedCoupling) => CouplingForm::Unsymmetrized,
        _ => CouplingForm::Symmetrized,
    };

    suite.run("ccr", || {
        let lat = LatticeSpec::new(1, 8, 2.0 * PI)?;
        let basis = FockBasis::new(Arc::new(build_mode_set(lat, 2.0)?), 4)?;
        Ok((ccr_defect(&basis), 1e-13, format!("{} states", basis.dim())))
    });

    suite.run("weyl_identities", || {
        let modes = Arc::new(build_mode_set(small_lattice(), 1.2)?);
        let f = CoherentAmplitude::new(&modes, vec![C64::new(0.6, 0.2), C64::new(-0.3, 0.4)])?;
        let g = CoherentAmplitude::new(&modes, vec![C64::new(0.1, -0.5), C64::new(0.4, 0.1)])?;
        let mean = f.add(&g).mean_photons(&modes).max(f.mean_photons(&modes));
        let basis = FockBasis::new(modes, recommended_truncation(mean))?;
        let d = weyl_identity_defects(&basis, &f, &g, 1e-6)?;
        Ok((d.max(), 1e-6, format!("{d:?}")))
    });

    suite.run("field_identity", || {
        let mut worst: f64 = 0.0;
        for (d, m, cutoff) in [(1, 8, 3.5), (2, 6, 2.1), (3, 4, 1.5)] {
            let modes = build_mode_set(LatticeSpec::new(d, m, 2.0 * PI)?, cutoff)?;
            worst = worst.max(field_identity_defect(&modes));
        }
        Ok((worst, 1e-12, "d = 1, 2, 3".into()))
    });

    suite.run("weyl_moments", || {
        let lat = LatticeSpec::new(1, 8, 2.0 * PI)?;
        let modes = Arc::new(build_mode_set(lat, 2.0)?);
        let alpha = CoherentAmplitude::new(
            &modes,
            vec![C64::new(0.2, 0.1), C64::new(-0.1, 0.15), C64::new(0.05, -0.1), C64::new(0.0, 0.12)],
        )?;
        let particles = 3;
        let z = alpha.scaled((particles as f64).sqrt());
        let basis = FockBasis::new(modes.clone(), recommended_truncation(z.mean_photons(&modes)))?;
        let psi = coherent_state(&basis, &z, 1e-6)?;
        let measured = WeylMoments::measure(&basis, &psi, particles, 1, 5);
        let exact = weyl_state_moments(&modes, &alpha, particles, 1, 5);
        let errs = measured.relative_errors(&exact);
        let worst = errs.iter().map(|e| e.1).fold(0.0, f64::max);
        Ok((worst, 1e-5, format!("{errs:?}")))
    });

    suite.run("hamiltonian_hermitian", || {
        let space = small_space(2, 3)?;
        let pot = PairPotential::gaussian(small_lattice(), 1.0, 0.5)?;
        let h = assemble_pauli_fierz(&space, &HamiltonianSpec { potential: pot, coupling })?;
        Ok((h.hermiticity_defect(), 1e-12, format!("dimension {}", space.dim())))
    });

    suite.run("gauge_transversality", || {
        let lat = LatticeSpec::new(3, 4, 2.0 * PI)?;
        let modes = Arc::new(build_mode_set(lat, 1.5)?);
        let params = MsParams {
            dt: 0.01,
            project_source: fault != Some(Fault::DropTransverseProjection),
            ..MsParams::default()
        };
        let ms = MaxwellSchrodinger::new(modes.clone(), PairPotential::gaussian(lat, 0.5, 0.8)?, params)?;
        let phi: Vec<C64> = (0..lat.num_sites())
            .map(|x| {
                let r = lat.position(x);
                C64::from_polar((r[0].cos() + 1.5).sqrt(), r[1] + 0.5 * r[2].sin())
            })
            .collect();
        let s = lattice_norm(&lat, &phi);
        let phi: Vec<C64> = phi.iter().map(|z| z / s).collect();
        let st = ms.initial_state(&phi, &CoherentAmplitude::zeros(&modes))?;
        let mut worst: f64 = 0.0;
        ms.evolve(&st, 20, |_, s| {
            worst = worst.max(ms.gauge_residual(s));
            Ok(())
        })?;
        Ok((worst, 1e-12, "d = 3, 20 steps".into()))
    });

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    suite.run("lemma_bounds", || {
        let mut violations = Vec::new();
        for i in 0..cfg.random_states {
            let space = small_space(1 + i % 3, 4)?;
            let (st, phi, alpha) = random_composite_state(&space, &mut rng)?;
            let b = lemma_bounds_check(&st, &phi, &alpha)?;
            violations.extend(b.violations);
        }
        Ok((
            violations.len() as f64,
            0.0,
            format!("{} states; {}", cfg.random_states, violations.join("; ")),
        ))
    });

    suite.run("reduced_matrices_psd", || {
        let mut worst: f64 = 0.0;
        for i in 0..20 {
            let space = small_space(1 + i % 3, 4)?;
            let (st, _, _) = random_composite_state(&space, &mut rng)?;
            worst = worst
                .max(-min_eigenvalue(&reduced_density_particle(&st)))
                .max(-min_eigenvalue(&reduced_energy_matrix_photon(&st)));
        }
        Ok((worst, 1e-12, "largest negative eigenvalue".into()))
    });

    suite.run("partial_trace_oracle", || {
        let mut worst: f64 = 0.0;
        for n in 1..=3 {
            let space = small_space(n, 3)?;
            let (st, _, _) = random_composite_state(&space, &mut rng)?;
            let a = reduced_density_particle(&st);
            let b = reduced_density_particle_direct(&st);
            worst = worst.max((a - b).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
        Ok((worst, 1e-12, "N = 1, 2, 3".into()))
    });

    suite.run("permutation_symmetry", || {
        let space = small_space(2, 3)?;
        let (st, _, _) = random_composite_state(&space, &mut rng)?;
        let psi = first_quantized(&st);
        let (ns, nf) = (space.particles().orbitals(), space.photons().dim());
        let mut worst: f64 = 0.0;
        for p in 0..ns {
            for q in 0..ns {
                for f in 0..nf {
                    worst = worst.max((psi[(p * ns + q) * nf + f] - psi[(q * ns + p) * nf + f]).norm());
                }
            }
        }
        Ok((worst, 1e-14, "N = 2".into()))
    });

    suite.run("krylov_vs_dense", || {
        let space = small_space(2, 3)?;
        let pot = PairPotential::gaussian(small_lattice(), 1.0, 0.5)?;
        let h = assemble_pauli_fierz(&space, &HamiltonianSpec::new(pot))?;
        let (st, _, _) = random_composite_state(&space, &mut rng)?;
        let tol = 1e-9;
        let (out, _) = propagate(&st, &h, 0.7, &KrylovPropagator::new(30, tol))?;
        let u = unitary_exponential(&h.to_sparse().to_dense(), 0.7);
        let exact = &u * nalgebra::DVector::from_column_slice(&st.amplitudes);
        let err = max_abs_diff(&out.amplitudes, exact.as_slice());
        Ok((err, 10.0 * tol, format!("dimension {}", space.dim())))
    });

    let n_small = *cfg.particle_numbers.iter().min().expect("validated nonempty");
    suite.run("initial_data", || {
        let space = scn.space(n_small)?;
        let h = assemble_pauli_fierz(&space, &HamiltonianSpec::new(scn.potential.clone()))?;
        let solver = MaxwellSchrodinger::new(scn.modes.clone(), scn.potential.clone(), MsParams::default())?;
        let e_m = solver.energy(&solver.initial_state(&scn.phi0, &scn.alpha0)?).total;
        let tol = cfg.tolerances.truncation;
        let st = product_initial_state(&space, &scn.phi0, &scn.alpha0, tol)?;
        let d = initial_condition_values(&st, &scn.phi0, &scn.alpha0, &h, e_m, tol)?;
        let value = (d.a_n / 1e-12).max(d.b_n / tol);
        Ok((value, 1.0, format!("N = {n_small}: a_N = {:.3e}, b_N = {:.3e}, c_N = {:.6e}", d.a_n, d.b_n, d.c_n)))
    });

    suite.run("product_state_energy", || {
        let space = scn.space(n_small)?;
        let h = assemble_pauli_fierz(&space, &HamiltonianSpec::new(scn.potential.clone()))?;
        let solver = MaxwellSchrodinger::new(scn.modes.clone(), scn.potential.clone(), MsParams::default())?;
        let e_m = solver.energy(&solver.initial_state(&scn.phi0, &scn.alpha0)?).total;
        let st = product_initial_state(&space, &scn.phi0, &scn.alpha0, cfg.tolerances.truncation)?;
        let nf = n_small as f64;
        let predicted =
            e_m + scn.modes.commutator_constant() / nf - solver.interaction_expectation(&scn.phi0) / (2.0 * nf);
        let measured = h.expectation(&st.amplitudes).re / nf;
        Ok(((measured - predicted).abs(), 1e-10, format!("<H>/N = {measured}, expected {predicted}")))
    });

    suite.run("quantum_conservation", || {
        let mut first: Option<(f64, f64)> = None;
        let mut drift: (f64, f64) = (0.0, 0.0);
        let e_m = {
            let solver = MaxwellSchrodinger::new(scn.modes.clone(), scn.potential.clone(), MsParams::default())?;
            solver.energy(&solver.initial_state(&scn.phi0, &scn.alpha0)?).total
        };
        run_quantum(&scn, n_small, &RunOptions::default(), |_, st, h| {
            let e = h.expectation(&st.amplitudes).re / n_small as f64;
            let bc = beta_c(st, h, e_m);
            let (e0, b0) = *first.get_or_insert((e, bc));
            drift = (drift.0.max((e - e0).abs()), drift.1.max((bc - b0).abs()));
            Ok(())
        })?;
        Ok((
            drift.0.max(drift.1),
            1e-8,
            format!("N = {n_small}: <H>/N drift {:.3e}, beta_c drift {:.3e}", drift.0, drift.1),
        ))
    });

    let ms = run_ms(&scn).map(|(_, s)| s);
    suite.run("ms_energy_conservation", || {
        let s = ms.as_ref().map_err(clone_error)?;
        Ok((s.energy_relative_drift, 1e-6, format!("E_M = {}", s.energy_initial)))
    });
    suite.run("ms_norm_conservation", || {
        let s = ms.as_ref().map_err(clone_error)?;
        Ok((s.norm_drift, 1e-10, String::new()))
    });

    suite.run("ms_uniform_phase", || {
        let lat = LatticeSpec::new(1, 8, 2.0 * PI)?;
        let modes = Arc::new(build_mode_set(lat, 2.0)?);
        let pot = PairPotential::gaussian(lat, 1.3, 0.8)?;
        let mu = pot.integral() / lat.volume();
        let ms = MaxwellSchrodinger::new(modes.clone(), pot, MsParams { dt: 0.01, ..MsParams::default() })?;
        let phi = vec![C64::new(1.0 / lat.volume().sqrt(), 0.0); lat.num_sites()];
        let st = ms.initial_state(&phi, &CoherentAmplitude::zeros(&modes))?;
        let out = ms.evolve(&st, 100, |_, _| Ok(()))?;
        let err = out
            .phi
            .iter()
            .zip(&phi)
            .map(|(z, z0)| (z - z0 * C64::from_polar(1.0, -mu * out.time)).norm())
            .fold(0.0, f64::max);
        Ok((err, 1e-8, format!("t = {}", out.time)))
    });

    Ok(CheckReport {
        config_hash: scn.hash.clone(),
        fault,
        checks: suite.checks,
    })
}

fn clone_error(e: &crate::error::Error) -> crate::error::Error {
    crate::error::Error::Instability {
        time: f64::NAN,
        detail: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_names_parse() {
        assert_eq!("drop-transverse-projection".parse::<Fault>(), Ok(Fault::DropTransverseProjection));
        assert_eq!("unsymmetrized-coupling".parse::<Fault>(), Ok(Fault::UnsymmetrizedCoupling));
        assert!("nope".parse::<Fault>().is_err());
    }

    #[test]
    fn random_states_are_normalized_and_reproducible() {
        let space = small_space(2, 3).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        let (sa, _, _) = random_composite_state(&space, &mut a).unwrap();
        let (sb, _, _) = random_composite_state(&space, &mut b).unwrap();
        assert_eq!(sa.amplitudes, sb.amplitudes);
        assert!((sa.norm() - 1.0).abs() < 1e-13);
    }
}
