use crate::error::{Error, Result};
use crate::field_modes::ModeSet;
use crate::fock::basis::{FockBasis, OperatorKind, PhotonOperator};
use crate::krylov::KrylovPropagator;
use crate::linalg::unitary_exponential;
use crate::sparse::SparseMatrix;
use crate::C64;

pub const DEFAULT_TRUNCATION_TOLERANCE: f64 = 1e-6;

/// Continuum one-photon amplitude `f(k, lambda)`, one value per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentAmplitude {
    values: Vec<C64>,
}

impl CoherentAmplitude {
    pub fn new(modes: &ModeSet, values: Vec<C64>) -> Result<Self> {
        if values.len() != modes.len() {
            return Err(Error::DimensionMismatch {
                expected: modes.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Config("coherent amplitude is not finite".into()));
        }
        Ok(Self { values })
    }

    pub fn zeros(modes: &ModeSet) -> Self {
        Self {
            values: vec![C64::new(0.0, 0.0); modes.len()],
        }
    }

    /// Builds an amplitude from `(momentum index, polarization, value)` entries;
    /// entries outside the mode set (zero momentum or beyond the cutoff) are rejected.
    pub fn from_entries(modes: &ModeSet, entries: &[(usize, usize, C64)]) -> Result<Self> {
        let mut out = Self::zeros(modes);
        for &(k, pol, value) in entries {
            if value == C64::new(0.0, 0.0) {
                continue;
            }
            let m = modes.find(k, pol).ok_or_else(|| {
                Error::Config(format!(
                    "amplitude on momentum {:?} polarization {pol} lies outside the photon modes",
                    modes.lattice().momentum(k)
                ))
            })?;
            out.values[m] += value;
        }
        Ok(out)
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            values: self.values.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    /// `sum_m w |k_m|^p |f_m|^2`; `p = 0` is the norm squared on the one-photon space.
    pub fn weighted_norm_sqr(&self, modes: &ModeSet, power: i32) -> f64 {
        modes
            .modes()
            .iter()
            .zip(&self.values)
            .map(|(m, z)| m.weight * m.k_norm().powi(power) * z.norm_sqr())
            .sum()
    }

    pub fn norm_sqr(&self, modes: &ModeSet) -> f64 {
        self.weighted_norm_sqr(modes, 0)
    }

    /// `<f, g> = sum_m w conj(f_m) g_m`.
    pub fn inner(&self, modes: &ModeSet, other: &Self) -> C64 {
        modes
            .modes()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(m, (a, b))| a.conj() * b * m.weight)
            .sum()
    }

    /// Per-mode displacement `z_m = sqrt(w) f_m` of the truncated ladder algebra.
    pub fn mode_amplitudes(&self, modes: &ModeSet) -> Vec<C64> {
        modes
            .modes()
            .iter()
            .zip(&self.values)
            .map(|(m, z)| z * m.weight.sqrt())
            .collect()
    }

    /// Mean photon number `sum |z_m|^2` of the coherent state.
    pub fn mean_photons(&self, modes: &ModeSet) -> f64 {
        self.norm_sqr(modes)
    }

    /// `u = |k|^{1/2} alpha`.
    pub fn energy_mode(&self, modes: &ModeSet) -> Self {
        Self {
            values: modes
                .modes()
                .iter()
                .zip(&self.values)
                .map(|(m, z)| z * m.k_norm().sqrt())
                .collect(),
        }
    }

    /// `alpha = |k|^{-1/2} u`.
    pub fn from_energy_mode(modes: &ModeSet, u: &Self) -> Self {
        Self {
            values: modes
                .modes()
                .iter()
                .zip(&u.values)
                .map(|(m, z)| z / m.k_norm().sqrt())
                .collect(),
        }
    }

    /// Coefficients in the orthonormal mode basis `e_m = delta_m / sqrt(w)`.
    pub fn orthonormal_coefficients(&self, modes: &ModeSet) -> Vec<C64> {
        self.mode_amplitudes(modes)
    }
}

/// `P(X > n)` for `X ~ Poisson(mean)`.
pub fn poisson_tail(mean: f64, n: usize) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    let mut log_term = -mean;
    for j in 1..=n + 1 {
        log_term += mean.ln() - (j as f64).ln();
    }
    let mut term = log_term.exp();
    let mut tail = 0.0;
    let mut j = n + 1;
    loop {
        tail += term;
        j += 1;
        term *= mean / j as f64;
        if term < 1e-18 * tail.max(1e-300) || j > n + 10_000 {
            break;
        }
    }
    tail.min(1.0)
}

/// Smallest photon truncation whose Poisson tail is at most `tolerance`.
pub fn suggested_truncation(mean: f64, tolerance: f64) -> usize {
    (0..).find(|&n| poisson_tail(mean, n) <= tolerance).unwrap_or(0)
}

fn check_leakage(basis: &FockBasis, mean: f64, tolerance: f64) -> Result<f64> {
    let leakage = poisson_tail(mean, basis.max_photons());
    if leakage > tolerance {
        return Err(Error::Truncation {
            leakage,
            threshold: tolerance,
            mean_photons: mean,
            suggested_truncation: suggested_truncation(mean, tolerance),
        });
    }
    Ok(leakage)
}

fn generator(basis: &FockBasis, f: &CoherentAmplitude) -> SparseMatrix {
    // i (z a^dagger - conj(z) a), hermitian
    let n = basis.dim();
    let mut acc = SparseMatrix::zeros(n, n);
    for (m, z) in f.mode_amplitudes(basis.modes()).into_iter().enumerate() {
        if z == C64::new(0.0, 0.0) {
            continue;
        }
        let a = basis.annihilation_matrix(m);
        let i = C64::new(0.0, 1.0);
        acc = acc
            .add(&a.adjoint().scale(i * z))
            .add(&a.scale(-i * z.conj()));
    }
    acc
}

/// `W(f) = exp(sum_m z_m a_m^dagger - conj(z_m) a_m)` on the truncated space.
///
/// Rejected when the Poisson tail of the coherent photon number above the
/// truncation exceeds `tolerance`.
pub fn weyl_operator(basis: &FockBasis, f: &CoherentAmplitude, tolerance: f64) -> Result<PhotonOperator> {
    check_leakage(basis, f.mean_photons(basis.modes()), tolerance)?;
    let g = generator(basis, f).to_dense();
    let w = unitary_exponential(&g, 1.0);
    Ok(PhotonOperator::new(
        SparseMatrix::from_dense(&w, 0.0),
        OperatorKind::Unitary,
    ))
}

/// Coherent state `W(f) Omega`.
pub fn coherent_state(basis: &FockBasis, f: &CoherentAmplitude, tolerance: f64) -> Result<Vec<C64>> {
    check_leakage(basis, f.mean_photons(basis.modes()), tolerance)?;
    let g = generator(basis, f);
    let prop = KrylovPropagator::new(40, 1e-14);
    let (v, _) = prop.propagate(&g, &basis.vacuum(), 1.0)?;
    Ok(v)
}
