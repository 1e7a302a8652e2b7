use crate::error::{Error, Result};
use crate::field_modes::{ModeSet, TransverseProjector};
use crate::fock::CoherentAmplitude;
use crate::lattice::dot;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Fourier amplitudes `(A~(k), E~(k))`, one 3-vector per lattice momentum,
/// supported on the photon-mode momenta.
pub type FieldComponents = Vec<[C64; 3]>;

/// `A~(k) = sum_l (2|k|)^{-1/2} [eps(k) alpha(k) + eps(-k) conj(alpha(-k))]`,
/// `E~(k) = sum_l sqrt(|k|/2) i [eps(k) alpha(k) - eps(-k) conj(alpha(-k))]`.
pub fn initial_fields_from_alpha(modes: &ModeSet, alpha: &CoherentAmplitude) -> Result<(FieldComponents, FieldComponents)> {
    if alpha.len() != modes.len() {
        return Err(Error::DimensionMismatch {
            expected: modes.len(),
            found: alpha.len(),
        });
    }
    let lat = modes.lattice();
    let ns = lat.num_sites();
    let mut a = vec![[ZERO; 3]; ns];
    let mut e = vec![[ZERO; 3]; ns];
    for (mode, &z) in modes.modes().iter().zip(alpha.values()) {
        let k = mode.momentum_index;
        let mk = lat.negate_momentum(k);
        let kn = mode.k_norm();
        let ca = 1.0 / (2.0 * kn).sqrt();
        let ce = (kn / 2.0).sqrt();
        for i in 0..3 {
            let eps = mode.epsilon[i];
            // contribution at +k from alpha(k), and at -k from conj(alpha(k))
            a[k][i] += z * (ca * eps);
            e[k][i] += C64::new(0.0, ce * eps) * z;
            a[mk][i] += z.conj() * (ca * eps);
            e[mk][i] -= C64::new(0.0, ce * eps) * z.conj();
        }
    }
    Ok((a, e))
}

/// Largest `|k . A~(k)|` and `|k . E~(k)|` over all momenta.
pub fn longitudinal_residual(modes: &ModeSet, a: &[[C64; 3]], e: &[[C64; 3]]) -> f64 {
    let lat = modes.lattice();
    if lat.dimension() == 1 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for idx in 0..lat.num_sites() {
        let k = lat.momentum(idx);
        for field in [a, e] {
            let s: C64 = (0..3).map(|i| field[idx][i] * k[i]).sum();
            worst = worst.max(s.norm());
        }
    }
    worst
}

/// `u(k, l) = 2^{-1/2} eps_l(k) . (|k| A~(k) - i E~(k))` and `alpha = |k|^{-1/2} u`.
///
/// Rejects fields with a longitudinal part above `tolerance` or support off the
/// photon-mode momenta.
pub fn alpha_from_fields(
    modes: &ModeSet,
    a: &[[C64; 3]],
    e: &[[C64; 3]],
    tolerance: f64,
) -> Result<(CoherentAmplitude, CoherentAmplitude)> {
    let lat = modes.lattice();
    let residual = longitudinal_residual(modes, a, e);
    if residual > tolerance {
        return Err(Error::Longitudinal { residual });
    }
    for idx in 0..lat.num_sites() {
        if modes.contains_momentum(idx) {
            continue;
        }
        let stray = a[idx].iter().chain(&e[idx]).map(|z| z.norm()).fold(0.0, f64::max);
        if stray > tolerance {
            return Err(Error::Config(format!(
                "field amplitude {stray} at momentum {:?} outside the photon modes",
                lat.momentum(idx)
            )));
        }
    }
    let mut u = Vec::with_capacity(modes.len());
    for mode in modes.modes() {
        let k = mode.momentum_index;
        let kn = mode.k_norm();
        let s: C64 = (0..3)
            .map(|i| mode.epsilon[i] * (a[k][i] * kn - C64::new(0.0, 1.0) * e[k][i]))
            .sum();
        u.push(s / 2f64.sqrt());
    }
    let u = CoherentAmplitude::new(modes, u)?;
    let alpha = CoherentAmplitude::from_energy_mode(modes, &u);
    Ok((u, alpha))
}

/// `||u||^2 = 1/2 sum_k w (|k|^2 |A~|^2 + |E~|^2)` over the mode momenta.
pub fn field_energy(modes: &ModeSet, a: &[[C64; 3]], e: &[[C64; 3]]) -> f64 {
    let lat = modes.lattice();
    let w = lat.mode_weight();
    modes
        .momenta()
        .into_iter()
        .map(|idx| {
            let k = lat.momentum(idx);
            let k2 = dot(&k, &k);
            let na: f64 = a[idx].iter().map(|z| z.norm_sqr()).sum();
            let ne: f64 = e[idx].iter().map(|z| z.norm_sqr()).sum();
            0.5 * w * (k2 * na + ne)
        })
        .sum()
}

/// `P(k) v` per momentum; zero outside the mode momenta.
pub fn transverse_part(modes: &ModeSet, field: &[[C64; 3]]) -> FieldComponents {
    let lat = modes.lattice();
    (0..lat.num_sites())
        .map(|idx| {
            if !modes.contains_momentum(idx) {
                return [ZERO; 3];
            }
            TransverseProjector::new(&lat.momentum(idx), lat.dimension()).apply(&field[idx])
        })
        .collect()
}
