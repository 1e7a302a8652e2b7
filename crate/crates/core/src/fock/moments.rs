use crate::field_modes::ModeSet;
use crate::fock::basis::{field_energy_operator, FockBasis};
use crate::fock::fields::{
    classical_electric_positive, classical_vector_potential, field_operators, gamma_perp,
};
use crate::fock::weyl::CoherentAmplitude;
use crate::linalg::inner;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Scaled field moments in the coherent state `W(sqrt(N) alpha) Omega`.
///
/// | field | quantity |
/// |---|---|
/// | `vector_potential` | `<N^{-1/2} A(x)>` |
/// | `vector_potential_sq` | `<N^{-1} A(x)^2>` |
/// | `correlation` | `<N^{-1} A^i(x) A^j(y)>` |
/// | `field_energy` | `<N^{-1} H_f>` |
/// | `field_energy_sq` | `<N^{-2} H_f^2>` |
/// | `potential_energy` | `<N^{-3/2} A(x) H_f>` |
/// | `potential_sq_energy` | `<N^{-2} A(x)^2 H_f>` |
#[derive(Debug, Clone, PartialEq)]
pub struct WeylMoments {
    pub vector_potential: [C64; 3],
    pub vector_potential_sq: C64,
    pub correlation: [[C64; 3]; 3],
    pub field_energy: C64,
    pub field_energy_sq: C64,
    pub potential_energy: [C64; 3],
    pub potential_sq_energy: C64,
}

impl WeylMoments {
    /// Expectations of the same operators in an arbitrary photon vector.
    pub fn measure(basis: &FockBasis, psi: &[C64], particles: usize, x: usize, y: usize) -> Self {
        let n = particles as f64;
        let ax = field_operators(basis, x).vector_potential;
        let ay = field_operators(basis, y).vector_potential;
        let hf = field_energy_operator(basis);
        let hpsi = hf.apply(psi);
        let ax_psi: Vec<Vec<C64>> = (0..3).map(|i| ax.full(basis, i).apply(psi)).collect();
        let ay_psi: Vec<Vec<C64>> = (0..3).map(|i| ay.full(basis, i).apply(psi)).collect();
        let ax_hpsi: Vec<Vec<C64>> = (0..3).map(|i| ax.full(basis, i).apply(&hpsi)).collect();

        let mut out = Self::zero();
        for i in 0..3 {
            out.vector_potential[i] = inner(psi, &ax_psi[i]) / n.sqrt();
            out.vector_potential_sq += inner(&ax_psi[i], &ax_psi[i]) / n;
            for j in 0..3 {
                out.correlation[i][j] = inner(&ax_psi[i], &ay_psi[j]) / n;
            }
            out.potential_energy[i] = inner(psi, &ax_hpsi[i]) / n.powf(1.5);
            out.potential_sq_energy += inner(&ax_psi[i], &ax_hpsi[i]) / (n * n);
        }
        out.field_energy = inner(psi, &hpsi) / n;
        out.field_energy_sq = inner(&hpsi, &hpsi) / (n * n);
        out
    }

    fn zero() -> Self {
        Self {
            vector_potential: [ZERO; 3],
            vector_potential_sq: ZERO,
            correlation: [[ZERO; 3]; 3],
            field_energy: ZERO,
            field_energy_sq: ZERO,
            potential_energy: [ZERO; 3],
            potential_sq_energy: ZERO,
        }
    }

    fn entries(&self) -> Vec<(&'static str, C64)> {
        let mut out = Vec::new();
        for i in 0..3 {
            out.push(("vector_potential", self.vector_potential[i]));
            out.push(("potential_energy", self.potential_energy[i]));
            for j in 0..3 {
                out.push(("correlation", self.correlation[i][j]));
            }
        }
        out.push(("vector_potential_sq", self.vector_potential_sq));
        out.push(("field_energy", self.field_energy));
        out.push(("field_energy_sq", self.field_energy_sq));
        out.push(("potential_sq_energy", self.potential_sq_energy));
        out
    }

    /// Largest deviation per moment family, relative to the magnitude of the
    /// reference family (absolute when the reference vanishes).
    pub fn relative_errors(&self, reference: &Self) -> Vec<(&'static str, f64)> {
        let mine = self.entries();
        let theirs = reference.entries();
        let mut families: Vec<(&'static str, f64, f64)> = Vec::new();
        for ((name, a), (_, b)) in mine.iter().zip(&theirs) {
            let slot = match families.iter_mut().find(|f| f.0 == *name) {
                Some(s) => s,
                None => {
                    families.push((name, 0.0, 0.0));
                    families.last_mut().unwrap()
                }
            };
            slot.1 = slot.1.max((a - b).norm());
            slot.2 = slot.2.max(b.norm());
        }
        families
            .into_iter()
            .map(|(name, err, scale)| (name, if scale > 0.0 { err / scale } else { err }))
            .collect()
    }
}

/// Closed-form moments of `W(sqrt(N) alpha) Omega` on the discrete mode set,
/// with `c_Lambda` the discrete commutator constant and `gamma_perp` the
/// discrete transverse kernel.
pub fn weyl_state_moments(
    modes: &ModeSet,
    alpha: &CoherentAmplitude,
    particles: usize,
    x: usize,
    y: usize,
) -> WeylMoments {
    let n = particles as f64;
    let c = modes.commutator_constant();
    let ax = classical_vector_potential(modes, alpha, x);
    let ay = classical_vector_potential(modes, alpha, y);
    let ex = classical_electric_positive(modes, alpha, x);
    let u_sq = alpha.weighted_norm_sqr(modes, 1);
    let k2 = alpha.weighted_norm_sqr(modes, 2);
    let g = gamma_perp(modes, modes.lattice().displacement(x, y));
    let i_unit = C64::new(0.0, 1.0);

    let a_sq: f64 = ax.iter().map(|a| a * a).sum();
    let a_dot_e: C64 = (0..3).map(|i| ex[i] * ax[i]).sum();
    let mut out = WeylMoments::zero();
    for i in 0..3 {
        out.vector_potential[i] = C64::new(ax[i], 0.0);
        out.potential_energy[i] = ax[i] * u_sq - i_unit * ex[i] / n;
        for j in 0..3 {
            out.correlation[i][j] = ax[i] * ay[j] + g[i][j] / (2.0 * n);
        }
    }
    out.vector_potential_sq = C64::new(a_sq + c / n, 0.0);
    out.field_energy = C64::new(u_sq, 0.0);
    out.field_energy_sq = C64::new(u_sq * u_sq + k2 / n, 0.0);
    out.potential_sq_energy = (a_sq + c / n) * u_sq - 2.0 * i_unit * a_dot_e / n;
    out
}
