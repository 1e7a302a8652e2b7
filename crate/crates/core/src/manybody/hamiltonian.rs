use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::krylov::LinearOperator;
use crate::lattice::{dot, Spectral};
use crate::manybody::basis::{CompositeSpace, ParticleBasis};
use crate::potential::PairPotential;
use crate::sparse::{SparseMatrix, TripletBuilder};
use crate::C64;

/// How the minimal-coupling cross term is discretised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingForm {
    /// `(-i grad) . A + A . (-i grad)`, hermitian.
    #[default]
    Symmetrized,
    /// `2 A . (-i grad)` only; not hermitian on a lattice. Fault injection.
    Unsymmetrized,
}

#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    pub potential: PairPotential,
    pub coupling: CouplingForm,
}

impl HamiltonianSpec {
    pub fn new(potential: PairPotential) -> Self {
        Self {
            potential,
            coupling: CouplingForm::Symmetrized,
        }
    }
}

/// `particle (x) photon`; `None` stands for the identity factor.
#[derive(Debug, Clone)]
pub struct KroneckerTerm {
    pub particle: Option<SparseMatrix>,
    pub photon: Option<SparseMatrix>,
}

/// The Pauli-Fierz Hamiltonian
/// `sum_j (-i grad_j - A(x_j)/sqrt(N))^2 + N^{-1} sum_{j<k} v(x_j - x_k) + H_f`
/// stored as a sum of Kronecker products.
#[derive(Debug, Clone)]
pub struct PauliFierzOperator {
    space: Arc<CompositeSpace>,
    terms: Vec<KroneckerTerm>,
}

/// `sum_p f(p) b_{p'}^dagger b_p` with `(p', f) = rule(p)`.
fn one_body<F>(basis: &ParticleBasis, rule: F) -> SparseMatrix
where
    F: Fn(usize) -> Option<(usize, C64)>,
{
    let n = basis.dim();
    let mut b = TripletBuilder::new(n, n);
    let targets: Vec<Option<(usize, C64)>> = (0..basis.orbitals()).map(&rule).collect();
    for i in 0..n {
        for (p, &occ) in basis.state(i).iter().enumerate() {
            if occ == 0 {
                continue;
            }
            if let Some((q, c)) = targets[p] {
                let (j, amp) = basis.hop(i, p, q).expect("occupied orbital");
                b.add(j, i, c * amp);
            }
        }
    }
    b.build()
}

/// `(2N)^{-1} sum v~(p1 - q1) / M^d  b_{p1}^dagger b_{p2}^dagger b_{q2} b_{q1}`
/// with momentum conservation.
fn pair_interaction(basis: &ParticleBasis, v_hat: &[f64]) -> SparseMatrix {
    let lat = *basis.lattice();
    let ns = basis.orbitals();
    let n = basis.dim();
    let pref = 1.0 / (2.0 * basis.particles() as f64 * ns as f64);
    let mut b = TripletBuilder::new(n, n);
    let mut occ = vec![0u8; ns];
    for i in 0..n {
        let s = basis.state(i);
        for q1 in 0..ns {
            if s[q1] == 0 {
                continue;
            }
            occ.copy_from_slice(s);
            let a1 = (occ[q1] as f64).sqrt();
            occ[q1] -= 1;
            for q2 in 0..ns {
                if occ[q2] == 0 {
                    continue;
                }
                let a2 = (occ[q2] as f64).sqrt();
                occ[q2] -= 1;
                let total = lat.add_momenta(q1, q2);
                for p1 in 0..ns {
                    let transfer = lat.add_momenta(p1, lat.negate_momentum(q1));
                    let v = v_hat[transfer];
                    if v == 0.0 {
                        continue;
                    }
                    let p2 = lat.add_momenta(total, lat.negate_momentum(p1));
                    occ[p2] += 1;
                    let c2 = (occ[p2] as f64).sqrt();
                    occ[p1] += 1;
                    let c1 = (occ[p1] as f64).sqrt();
                    let j = basis.index_of(&occ).expect("particle number conserved");
                    b.add(j, i, C64::new(pref * v * a1 * a2 * c1 * c2, 0.0));
                    occ[p1] -= 1;
                    occ[p2] -= 1;
                }
                occ[q2] += 1;
            }
        }
    }
    b.build()
}

/// Assembles the Hamiltonian on `space`.
///
/// Cross term: `-N^{-1/2} sum_m c_m eps_m . (p' + p) b_{p'}^dagger b_p (x) a_m`
/// with `p' = p + k_m`, plus its adjoint; `c_m = sqrt(w) kappa (2|k|)^{-1/2}`.
/// Diamagnetic term: `N^{-1} A . A` normal ordered, grouped by the particle
/// momentum transfer `q` into `S_q (x) G_q` with `S_q = sum_p b_{p+q}^dagger b_p`.
pub fn assemble_pauli_fierz(space: &Arc<CompositeSpace>, spec: &HamiltonianSpec) -> Result<PauliFierzOperator> {
    let pb = space.particles();
    let fb = space.photons();
    let lat = *pb.lattice();
    if spec.potential.lattice() != &lat {
        return Err(Error::Config("pair potential lives on a different lattice".into()));
    }
    let n = pb.particles() as f64;
    let modes = fb.modes();
    let spectral = Spectral::new(lat);

    let mut terms = Vec::new();

    // kinetic + pair potential + diamagnetic vacuum constant
    let c_lambda = modes.commutator_constant();
    let diag: Vec<C64> = (0..pb.dim())
        .map(|i| {
            let kin: f64 = pb
                .state(i)
                .iter()
                .enumerate()
                .map(|(p, &o)| {
                    let k = lat.momentum(p);
                    o as f64 * dot(&k, &k)
                })
                .sum();
            C64::new(kin + c_lambda, 0.0)
        })
        .collect();
    let mut particle_only = SparseMatrix::diagonal(&diag);
    if !spec.potential.is_zero() {
        let v_hat = spec.potential.lattice_transform(&spectral);
        particle_only = particle_only.add(&pair_interaction(pb, &v_hat));
    }
    terms.push(KroneckerTerm {
        particle: Some(particle_only),
        photon: None,
    });

    let ladders: Vec<SparseMatrix> = (0..modes.len()).map(|m| fb.annihilation_matrix(m)).collect();
    let creators: Vec<SparseMatrix> = ladders.iter().map(|a| a.adjoint()).collect();
    let coupling: Vec<f64> = modes
        .modes()
        .iter()
        .map(|m| m.weight.sqrt() * modes.kappa(m) / (2.0 * m.k_norm()).sqrt())
        .collect();

    // cross terms
    for (m, mode) in modes.modes().iter().enumerate() {
        let k = mode.momentum_index;
        let minus_k = lat.negate_momentum(k);
        let eps = mode.epsilon;
        let c = -coupling[m] / n.sqrt();
        let element = |p: usize, q: usize| match spec.coupling {
            CouplingForm::Symmetrized => {
                let (pp, pq) = (lat.momentum(p), lat.momentum(q));
                dot(&eps, &[pp[0] + pq[0], pp[1] + pq[1], pp[2] + pq[2]])
            }
            CouplingForm::Unsymmetrized => 2.0 * dot(&eps, &lat.momentum(p)),
        };
        let lower = one_body(pb, |p| {
            let q = lat.add_momenta(p, k);
            Some((q, C64::new(c * element(p, q), 0.0)))
        });
        let raise = one_body(pb, |p| {
            let q = lat.add_momenta(p, minus_k);
            Some((q, C64::new(c * element(p, q), 0.0)))
        });
        terms.push(KroneckerTerm {
            particle: Some(lower),
            photon: Some(ladders[m].clone()),
        });
        terms.push(KroneckerTerm {
            particle: Some(raise),
            photon: Some(creators[m].clone()),
        });
    }

    // diamagnetic term grouped by momentum transfer
    let mut groups: BTreeMap<usize, SparseMatrix> = BTreeMap::new();
    let nf = fb.dim();
    let mut push = |q: usize, m: SparseMatrix| {
        let slot = groups.entry(q).or_insert_with(|| SparseMatrix::zeros(nf, nf));
        *slot = slot.add(&m);
    };
    for (m, a) in modes.modes().iter().enumerate() {
        for (mp, b) in modes.modes().iter().enumerate() {
            let e = dot(&a.epsilon, &b.epsilon);
            if e == 0.0 {
                continue;
            }
            let s = C64::new(coupling[m] * coupling[mp] * e / n, 0.0);
            let (k, kp) = (a.momentum_index, b.momentum_index);
            let (mk, mkp) = (lat.negate_momentum(k), lat.negate_momentum(kp));
            push(lat.add_momenta(k, kp), ladders[m].matmul(&ladders[mp]).scale(s));
            push(lat.add_momenta(k, mkp), creators[mp].matmul(&ladders[m]).scale(s));
            push(lat.add_momenta(mk, kp), creators[m].matmul(&ladders[mp]).scale(s));
            push(lat.add_momenta(mk, mkp), creators[m].matmul(&creators[mp]).scale(s));
        }
    }

    let mut photon_only = crate::fock::field_energy_operator(fb).matrix;
    for (q, g) in groups {
        if g.nnz() == 0 {
            continue;
        }
        if q == 0 {
            photon_only = photon_only.add(&g.scale(C64::new(n, 0.0)));
            continue;
        }
        let shift = one_body(pb, |p| Some((lat.add_momenta(p, q), C64::new(1.0, 0.0))));
        terms.push(KroneckerTerm {
            particle: Some(shift),
            photon: Some(g),
        });
    }
    if !modes.is_empty() {
        terms.push(KroneckerTerm {
            particle: None,
            photon: Some(photon_only),
        });
    }

    Ok(PauliFierzOperator {
        space: space.clone(),
        terms,
    })
}

fn kron(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let (ra, rb) = (a.rows(), b.rows());
    let mut t = TripletBuilder::new(ra * rb, a.cols() * b.cols());
    for i in 0..ra {
        for (j, x) in a.row(i) {
            for r in 0..rb {
                for (c, y) in b.row(r) {
                    t.add(i * rb + r, j * b.cols() + c, x * y);
                }
            }
        }
    }
    t.build()
}

impl PauliFierzOperator {
    pub fn space(&self) -> &Arc<CompositeSpace> {
        &self.space
    }

    pub fn terms(&self) -> &[KroneckerTerm] {
        &self.terms
    }

    pub fn apply_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        LinearOperator::apply(self, x, &mut y);
        y
    }

    /// `<x, H x>`.
    pub fn expectation(&self, x: &[C64]) -> C64 {
        crate::linalg::inner(x, &self.apply_vec(x))
    }

    /// Explicit sparse matrix; intended for small spaces and oracles.
    pub fn to_sparse(&self) -> SparseMatrix {
        let np = self.space.particles().dim();
        let nf = self.space.photons().dim();
        let ip = SparseMatrix::identity(np);
        let iff = SparseMatrix::identity(nf);
        let mut acc = SparseMatrix::zeros(np * nf, np * nf);
        for t in &self.terms {
            let p = t.particle.as_ref().unwrap_or(&ip);
            let f = t.photon.as_ref().unwrap_or(&iff);
            acc = acc.add(&kron(p, f));
        }
        acc
    }

    /// `max |H_ij - conj(H_ji)|` of the assembled matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        self.to_sparse().hermiticity_defect()
    }
}

impl LinearOperator for PauliFierzOperator {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let nf = self.space.photons().dim();
        let zero = C64::new(0.0, 0.0);
        y.iter_mut().for_each(|v| *v = zero);
        let mut tmp = vec![zero; x.len()];
        for term in &self.terms {
            let t: &[C64] = match &term.photon {
                Some(f) => {
                    tmp.par_chunks_mut(nf)
                        .zip(x.par_chunks(nf))
                        .with_min_len(16)
                        .for_each(|(t_row, x_row)| f.apply(x_row, t_row));
                    &tmp
                }
                None => x,
            };
            match &term.particle {
                None => y
                    .par_chunks_mut(nf)
                    .zip(t.par_chunks(nf))
                    .with_min_len(16)
                    .for_each(|(yr, tr)| yr.iter_mut().zip(tr).for_each(|(a, b)| *a += b)),
                Some(p) => y
                    .par_chunks_mut(nf)
                    .enumerate()
                    .with_min_len(16)
                    .for_each(|(ip, yr)| {
                        for (j, v) in p.row(ip) {
                            let tr = &t[j * nf..(j + 1) * nf];
                            yr.iter_mut().zip(tr).for_each(|(a, b)| *a += v * b);
                        }
                    }),
            }
        }
    }
}
