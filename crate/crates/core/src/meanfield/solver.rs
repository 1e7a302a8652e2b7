use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field_modes::ModeSet;
use crate::fock::CoherentAmplitude;
use crate::krylov::{KrylovPropagator, LinearOperator};
use crate::lattice::{dot, Spectral};
use crate::manybody::lattice_norm;
use crate::meanfield::fields::{
    alpha_from_fields, field_energy, initial_fields_from_alpha, longitudinal_residual, transverse_part,
    FieldComponents,
};
use crate::potential::PairPotential;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct MsParams {
    pub dt: f64,
    /// Lanczos tolerance for the magnetic kinetic propagator.
    pub krylov_tolerance: f64,
    /// Apply `P(k)` to the current source. Switching it off is a fault injection.
    pub project_source: bool,
    /// Abort when `|E_M(t) - E_M(0)| / max(|E_M(0)|, 1)` exceeds this.
    pub max_relative_drift: f64,
}

impl Default for MsParams {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            krylov_tolerance: 1e-13,
            project_source: true,
            max_relative_drift: 1e-2,
        }
    }
}

/// `(phi, A~, E~)` at time `t`; `phi` holds site values with
/// `sum_x dx^d |phi|^2 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveState {
    pub phi: Vec<C64>,
    pub a: FieldComponents,
    pub e: FieldComponents,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsEnergy {
    /// `||(-i grad - A_kappa) phi||^2`
    pub kinetic: f64,
    /// `1/2 <phi, (v * |phi|^2) phi>`
    pub interaction: f64,
    /// `||u||^2`
    pub field: f64,
    pub total: f64,
}

struct MagneticKinetic<'a> {
    spectral: &'a Spectral,
    a: &'a [[f64; 3]],
}

impl LinearOperator for MagneticKinetic<'_> {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = ZERO);
        for axis in 0..self.spectral.lattice().dimension() {
            let shifted = covariant(self.spectral, self.a, x, axis);
            let twice = covariant(self.spectral, self.a, &shifted, axis);
            y.iter_mut().zip(twice).for_each(|(a, b)| *a += b);
        }
    }
}

/// `(p_axis - A_axis) psi` with the spectral momentum operator.
fn covariant(spectral: &Spectral, a: &[[f64; 3]], psi: &[C64], axis: usize) -> Vec<C64> {
    let mut out = spectral.momentum_operator(psi, axis);
    for ((o, z), av) in out.iter_mut().zip(psi).zip(a) {
        *o -= z * av[axis];
    }
    out
}

/// Strang-split Maxwell-Schroedinger integrator.
///
/// One step: a particle half step with the field frozen at `t_n`, an exact
/// rotation of every field mode under the transverse current source evaluated
/// at the half step, and a particle half step with the field at `t_{n+1}`.
/// Each particle half step is itself `exp(-iV) exp(-i(p - A)^2) exp(-iV)`.
#[derive(Debug, Clone)]
pub struct MaxwellSchrodinger {
    modes: Arc<ModeSet>,
    potential: PairPotential,
    spectral: Spectral,
    params: MsParams,
}

impl MaxwellSchrodinger {
    pub fn new(modes: Arc<ModeSet>, potential: PairPotential, params: MsParams) -> Result<Self> {
        if !(params.dt > 0.0) || !params.dt.is_finite() {
            return Err(Error::Config(format!("time step must be positive, got {}", params.dt)));
        }
        if potential.lattice() != modes.lattice() {
            return Err(Error::Config("pair potential and photon modes use different lattices".into()));
        }
        let spectral = Spectral::new(*modes.lattice());
        Ok(Self {
            modes,
            potential,
            spectral,
            params,
        })
    }

    pub fn modes(&self) -> &Arc<ModeSet> {
        &self.modes
    }

    pub fn params(&self) -> &MsParams {
        &self.params
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn initial_state(&self, phi: &[C64], alpha: &CoherentAmplitude) -> Result<EffectiveState> {
        let lat = self.modes.lattice();
        if phi.len() != lat.num_sites() {
            return Err(Error::DimensionMismatch {
                expected: lat.num_sites(),
                found: phi.len(),
            });
        }
        let n = lattice_norm(lat, phi);
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::Config(format!("one-body wavefunction has norm {n}, expected 1")));
        }
        let (a, e) = initial_fields_from_alpha(&self.modes, alpha)?;
        Ok(EffectiveState {
            phi: phi.to_vec(),
            a,
            e,
            time: 0.0,
        })
    }

    /// Real-space cutoff field `(kappa * A)(x) = (2 pi)^{-d/2} sum_k w exp(ikx) A~(k)`.
    pub fn position_field(&self, field: &[[C64; 3]]) -> Vec<[f64; 3]> {
        let ns = field.len();
        let mut out = vec![[0.0; 3]; ns];
        for i in 0..self.modes.lattice().dimension() {
            let comp: Vec<C64> = field.iter().map(|v| v[i]).collect();
            for (o, z) in out.iter_mut().zip(self.spectral.to_position(&comp)) {
                o[i] = z.re;
            }
        }
        out
    }

    /// Largest imaginary part of the position-space `A` and `E`.
    pub fn reality_residual(&self, state: &EffectiveState) -> f64 {
        let mut worst: f64 = 0.0;
        for field in [&state.a, &state.e] {
            for i in 0..3 {
                let comp: Vec<C64> = field.iter().map(|v| v[i]).collect();
                for z in self.spectral.to_position(&comp) {
                    worst = worst.max(z.im.abs());
                }
            }
        }
        worst
    }

    /// `j = 2 Re(conj(phi) p phi) - 2 |phi|^2 A_kappa`.
    pub fn current_density(&self, phi: &[C64], a_sites: &[[f64; 3]]) -> Vec<[f64; 3]> {
        let mut j = vec![[0.0; 3]; phi.len()];
        for axis in 0..self.modes.lattice().dimension() {
            let p = self.spectral.momentum_operator(phi, axis);
            for ((jx, z), (pz, av)) in j.iter_mut().zip(phi).zip(p.iter().zip(a_sites)) {
                jx[axis] = 2.0 * (z.conj() * pz).re - 2.0 * z.norm_sqr() * av[axis];
            }
        }
        j
    }

    fn mean_field_potential(&self, phi: &[C64]) -> Vec<f64> {
        let rho: Vec<f64> = phi.iter().map(|z| z.norm_sqr()).collect();
        self.potential.convolve(&self.spectral, &rho)
    }

    pub fn energy(&self, state: &EffectiveState) -> MsEnergy {
        let lat = self.modes.lattice();
        let dv = lat.cell_volume();
        let a_sites = self.position_field(&state.a);
        let mut kinetic = 0.0;
        for axis in 0..lat.dimension() {
            kinetic += covariant(&self.spectral, &a_sites, &state.phi, axis)
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                * dv;
        }
        let v = self.mean_field_potential(&state.phi);
        let interaction = 0.5 * dv * state.phi.iter().zip(&v).map(|(z, vx)| z.norm_sqr() * vx).sum::<f64>();
        let field = field_energy(&self.modes, &state.a, &state.e);
        MsEnergy {
            kinetic,
            interaction,
            field,
            total: kinetic + interaction + field,
        }
    }

    /// `<phi, (v * |phi|^2) phi>`.
    pub fn interaction_expectation(&self, phi: &[C64]) -> f64 {
        let dv = self.modes.lattice().cell_volume();
        let v = self.mean_field_potential(phi);
        dv * phi.iter().zip(&v).map(|(z, vx)| z.norm_sqr() * vx).sum::<f64>()
    }

    pub fn gauge_residual(&self, state: &EffectiveState) -> f64 {
        longitudinal_residual(&self.modes, &state.a, &state.e)
    }

    /// `(u, alpha)` of the current fields.
    pub fn mode_functions(&self, state: &EffectiveState) -> Result<(CoherentAmplitude, CoherentAmplitude)> {
        alpha_from_fields(&self.modes, &state.a, &state.e, 1e-9)
    }

    pub fn norm(&self, state: &EffectiveState) -> f64 {
        lattice_norm(self.modes.lattice(), &state.phi)
    }

    /// Discrete `(||phi||_{H^2}, ||A||_{H^2}, ||E||_{H^1})`.
    pub fn sobolev_norms(&self, state: &EffectiveState) -> (f64, f64, f64) {
        let lat = self.modes.lattice();
        let w = lat.mode_weight();
        let phi_hat = self.spectral.to_momentum(&state.phi);
        let mut out = (0.0, 0.0, 0.0);
        for idx in 0..lat.num_sites() {
            let k = lat.momentum(idx);
            let k2 = dot(&k, &k);
            out.0 += w * (1.0 + k2).powi(2) * phi_hat[idx].norm_sqr();
            out.1 += w * (1.0 + k2).powi(2) * state.a[idx].iter().map(|z| z.norm_sqr()).sum::<f64>();
            out.2 += w * (1.0 + k2) * state.e[idx].iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        (out.0.sqrt(), out.1.sqrt(), out.2.sqrt())
    }

    fn potential_phase(&self, phi: &mut [C64], tau: f64) {
        let v = self.mean_field_potential(phi);
        for (z, vx) in phi.iter_mut().zip(v) {
            *z *= C64::from_polar(1.0, -vx * tau);
        }
    }

    fn particle_half_step(&self, phi: &[C64], a_sites: &[[f64; 3]], tau: f64) -> Result<Vec<C64>> {
        let lat = self.modes.lattice();
        let mut psi = phi.to_vec();
        self.potential_phase(&mut psi, tau / 2.0);
        if a_sites.iter().all(|v| v.iter().all(|&x| x == 0.0)) {
            let mut hat = psi;
            self.spectral.forward_raw(&mut hat);
            for (idx, z) in hat.iter_mut().enumerate() {
                let k = lat.momentum(idx);
                *z *= C64::from_polar(1.0 / lat.num_sites() as f64, -dot(&k, &k) * tau);
            }
            self.spectral.inverse_raw(&mut hat);
            psi = hat;
        } else {
            let op = MagneticKinetic {
                spectral: &self.spectral,
                a: a_sites,
            };
            let prop = KrylovPropagator::new(30, self.params.krylov_tolerance);
            psi = prop.propagate(&op, &psi, tau)?.0;
        }
        self.potential_phase(&mut psi, tau / 2.0);
        Ok(psi)
    }

    /// Transverse, cutoff-restricted current source `P(k) 1_Lambda j~(k)`.
    pub fn current_source(&self, phi: &[C64], a: &[[C64; 3]]) -> FieldComponents {
        let lat = self.modes.lattice();
        let a_sites = self.position_field(a);
        let j = self.current_density(phi, &a_sites);
        let mut jt = vec![[ZERO; 3]; lat.num_sites()];
        for i in 0..lat.dimension() {
            let comp: Vec<C64> = j.iter().map(|v| C64::new(v[i], 0.0)).collect();
            for (slot, z) in jt.iter_mut().zip(self.spectral.to_momentum(&comp)) {
                slot[i] = z;
            }
        }
        if self.params.project_source {
            transverse_part(&self.modes, &jt)
        } else {
            (0..lat.num_sites())
                .map(|idx| if self.modes.contains_momentum(idx) { jt[idx] } else { [ZERO; 3] })
                .collect()
        }
    }

    pub fn step(&self, state: &EffectiveState) -> Result<EffectiveState> {
        let dt = self.params.dt;
        let lat = self.modes.lattice();
        let a_old = self.position_field(&state.a);
        let phi_half = self.particle_half_step(&state.phi, &a_old, dt / 2.0)?;

        let a_mid: FieldComponents = state
            .a
            .iter()
            .zip(&state.e)
            .map(|(a, e)| [0, 1, 2].map(|i| a[i] - e[i] * (dt / 2.0)))
            .collect();
        let source = self.current_source(&phi_half, &a_mid);
        let mut a = vec![[ZERO; 3]; lat.num_sites()];
        let mut e = vec![[ZERO; 3]; lat.num_sites()];
        for idx in self.modes.momenta() {
            let k = lat.momentum(idx);
            let w = dot(&k, &k).sqrt();
            let (c, s) = ((w * dt).cos(), (w * dt).sin());
            for i in 0..3 {
                let eq = source[idx][i] / (w * w);
                let x0 = state.a[idx][i] - eq;
                let e0 = state.e[idx][i];
                a[idx][i] = x0 * c - e0 * (s / w) + eq;
                e[idx][i] = e0 * c + x0 * (w * s);
            }
        }

        let a_new = self.position_field(&a);
        let phi = self.particle_half_step(&phi_half, &a_new, dt / 2.0)?;
        Ok(EffectiveState {
            phi,
            a,
            e,
            time: state.time + dt,
        })
    }

    /// Advances `steps` steps, calling `observe` after each, and aborts on
    /// energy drift beyond `max_relative_drift` or on non-finite values.
    pub fn evolve<F>(&self, state: &EffectiveState, steps: usize, mut observe: F) -> Result<EffectiveState>
    where
        F: FnMut(usize, &EffectiveState) -> Result<()>,
    {
        let e0 = self.energy(state).total;
        let scale = e0.abs().max(1.0);
        let mut current = state.clone();
        for n in 1..=steps {
            current = self.step(&current)?;
            let e = self.energy(&current).total;
            let drift = (e - e0).abs() / scale;
            if !e.is_finite() || drift > self.params.max_relative_drift {
                return Err(Error::Instability {
                    time: current.time,
                    detail: format!("energy drift {drift:.3e} (E_M {e} vs {e0}) at dt {}", self.params.dt),
                });
            }
            observe(n, &current)?;
        }
        Ok(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_modes::build_mode_set;
    use crate::lattice::LatticeSpec;
    use std::f64::consts::PI;

    fn uniform(lat: &LatticeSpec) -> Vec<C64> {
        vec![C64::new(1.0 / lat.volume().sqrt(), 0.0); lat.num_sites()]
    }

    fn solver(d: usize, m: usize, cutoff: f64, g: f64, dt: f64) -> MaxwellSchrodinger {
        let lat = LatticeSpec::new(d, m, 2.0 * PI).unwrap();
        let modes = Arc::new(build_mode_set(lat, cutoff).unwrap());
        let v = PairPotential::gaussian(lat, g, 0.8).unwrap();
        MaxwellSchrodinger::new(modes, v, MsParams { dt, ..MsParams::default() }).unwrap()
    }

    #[test]
    fn uniform_state_acquires_mean_field_phase() {
        let ms = solver(1, 8, 2.5, 1.3, 0.01);
        let lat = *ms.modes().lattice();
        let st = ms.initial_state(&uniform(&lat), &CoherentAmplitude::zeros(ms.modes())).unwrap();
        let out = ms.evolve(&st, 100, |_, _| Ok(())).unwrap();
        let phase = ms.potential.integral() / lat.volume();
        for (z, z0) in out.phi.iter().zip(&st.phi) {
            assert!((z - z0 * C64::from_polar(1.0, -phase * out.time)).norm() < 1e-8);
        }
        assert!(out.a.iter().chain(&out.e).all(|v| v.iter().all(|z| z.norm() == 0.0)));
    }

    #[test]
    fn current_of_plane_wave_in_constant_field() {
        let ms = solver(1, 8, 2.5, 0.0, 0.01);
        let lat = *ms.modes().lattice();
        let v = lat.volume();
        let phi: Vec<C64> = (0..8).map(|x| lat.plane_wave(2, x) / v.sqrt()).collect();
        let zero = vec![[0.0; 3]; 8];
        for j in ms.current_density(&phi, &zero) {
            assert!((j[0] - 4.0 / v).abs() < 1e-14);
        }
        let a0 = vec![[0.3, 0.0, 0.0]; 8];
        for j in ms.current_density(&phi, &a0) {
            assert!((j[0] - 2.0 * (2.0 - 0.3) / v).abs() < 1e-14);
        }
    }

    #[test]
    fn energy_of_simple_states() {
        let ms = solver(1, 8, 2.5, 0.9, 0.01);
        let lat = *ms.modes().lattice();
        let st = ms.initial_state(&uniform(&lat), &CoherentAmplitude::zeros(ms.modes())).unwrap();
        let e = ms.energy(&st);
        assert!((e.total - ms.potential.integral() / (2.0 * lat.volume())).abs() < 1e-14);

        let free = solver(1, 8, 2.5, 0.0, 0.01);
        let phi: Vec<C64> = (0..8).map(|x| lat.plane_wave(3, x) / lat.volume().sqrt()).collect();
        let st = free.initial_state(&phi, &CoherentAmplitude::zeros(free.modes())).unwrap();
        assert!((free.energy(&st).total - 9.0).abs() < 1e-12);
    }

    #[test]
    fn transverse_projection_keeps_coulomb_gauge_in_three_dimensions() {
        let ms = solver(3, 4, 1.5, 0.5, 0.01);
        let lat = *ms.modes().lattice();
        let phi: Vec<C64> = (0..lat.num_sites())
            .map(|x| {
                let r = lat.position(x);
                C64::from_polar((r[0].cos() + 1.5).sqrt(), r[1] + 0.5 * r[2].sin())
            })
            .collect();
        let s = lattice_norm(&lat, &phi);
        let phi: Vec<C64> = phi.iter().map(|z| z / s).collect();
        let st = ms.initial_state(&phi, &CoherentAmplitude::zeros(ms.modes())).unwrap();
        let out = ms.evolve(&st, 20, |_, _| Ok(())).unwrap();
        assert!(ms.gauge_residual(&out) <= 1e-12);

        let mut faulty = ms.clone();
        faulty.params.project_source = false;
        let out = faulty.evolve(&st, 20, |_, _| Ok(())).unwrap();
        assert!(faulty.gauge_residual(&out) > 1e-6);
    }
}
