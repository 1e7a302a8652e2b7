//! Lanczos approximation of `exp(-i t H) psi` for hermitian `H`.
//!
//! The Krylov basis is built once per substep with full reorthogonalisation;
//! when the a-posteriori error estimate exceeds the tolerance the substep is
//! halved and the same basis is reused. All vector reductions run serially so
//! results do not depend on the thread count.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{inner, norm};
use crate::sparse::SparseMatrix;
use crate::C64;

pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        SparseMatrix::apply(self, x, y)
    }
}

impl LinearOperator for DMatrix<C64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..self.ncols()).map(|j| self[(i, j)] * x[j]).sum();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovPropagator {
    pub subspace_dimension: usize,
    /// Bound on the estimated error of each accepted substep.
    pub tolerance: f64,
    pub max_halvings: u32,
}

impl Default for KrylovPropagator {
    fn default() -> Self {
        Self {
            subspace_dimension: 30,
            tolerance: 1e-9,
            max_halvings: 24,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KrylovStats {
    pub substeps: usize,
    pub matvecs: usize,
    pub max_error_estimate: f64,
}

struct LanczosBasis {
    vectors: Vec<Vec<C64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// Coupling to the first discarded Krylov vector; zero on breakdown.
    residual_beta: f64,
}

impl KrylovPropagator {
    pub fn new(subspace_dimension: usize, tolerance: f64) -> Self {
        Self {
            subspace_dimension,
            tolerance,
            ..Self::default()
        }
    }

    fn lanczos<O: LinearOperator + ?Sized>(
        &self,
        op: &O,
        start: &[C64],
        stats: &mut KrylovStats,
    ) -> LanczosBasis {
        let n = op.dim();
        let m = self.subspace_dimension.min(n).max(1);
        let start_norm = norm(start);
        let mut vectors = vec![start.iter().map(|z| z / start_norm).collect::<Vec<_>>()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut w = vec![C64::new(0.0, 0.0); n];
        let mut residual_beta = 0.0;
        for j in 0..m {
            op.apply(&vectors[j], &mut w);
            stats.matvecs += 1;
            let a = inner(&vectors[j], &w).re;
            alpha.push(a);
            let scale = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(a.abs());
            for _ in 0..2 {
                for v in &vectors {
                    let c = inner(v, &w);
                    for (wi, vi) in w.iter_mut().zip(v) {
                        *wi -= c * vi;
                    }
                }
            }
            let b = norm(&w);
            if b <= 1e-13 * scale.max(1e-300) || b == 0.0 {
                residual_beta = 0.0;
                break;
            }
            if j + 1 == m {
                residual_beta = b;
                break;
            }
            beta.push(b);
            vectors.push(w.iter().map(|z| z / b).collect());
        }
        LanczosBasis {
            vectors,
            alpha,
            beta,
            residual_beta,
        }
    }

    /// `exp(-i tau T) e_1` on the tridiagonal Lanczos matrix.
    fn small_exponential(basis: &LanczosBasis, tau: f64) -> Vec<C64> {
        let k = basis.alpha.len();
        let t = DMatrix::from_fn(k, k, |r, c| {
            if r == c {
                basis.alpha[r]
            } else if r + 1 == c {
                basis.beta[r]
            } else if c + 1 == r {
                basis.beta[c]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        (0..k)
            .map(|r| {
                (0..k)
                    .map(|c| {
                        let q = eig.eigenvectors[(r, c)] * eig.eigenvectors[(0, c)];
                        C64::from_polar(q, -tau * eig.eigenvalues[c])
                    })
                    .sum()
            })
            .collect()
    }

    /// Advances `psi` by `exp(-i dt H)`.
    pub fn propagate<O: LinearOperator + ?Sized>(
        &self,
        op: &O,
        psi: &[C64],
        dt: f64,
    ) -> Result<(Vec<C64>, KrylovStats)> {
        let mut stats = KrylovStats::default();
        let mut state = psi.to_vec();
        if dt == 0.0 {
            return Ok((state, stats));
        }
        let direction = dt.signum();
        let mut remaining = dt.abs();
        let min_step = dt.abs() / 2f64.powi(self.max_halvings as i32);
        let mut tau = remaining;
        while remaining > 0.0 {
            let scale = norm(&state);
            if scale == 0.0 {
                return Ok((state, stats));
            }
            let basis = self.lanczos(op, &state, &mut stats);
            tau = tau.min(remaining);
            let (coeffs, err) = loop {
                let coeffs = Self::small_exponential(&basis, direction * tau);
                let err = scale * basis.residual_beta * coeffs.last().map_or(0.0, |c| c.norm());
                if err <= self.tolerance {
                    break (coeffs, err);
                }
                tau *= 0.5;
                if tau < min_step {
                    return Err(Error::KrylovNonConvergence { residual: err });
                }
            };
            stats.max_error_estimate = stats.max_error_estimate.max(err);
            let mut next = vec![C64::new(0.0, 0.0); state.len()];
            for (v, c) in basis.vectors.iter().zip(&coeffs) {
                let c = c * scale;
                for (ni, vi) in next.iter_mut().zip(v) {
                    *ni += c * vi;
                }
            }
            state = next;
            stats.substeps += 1;
            remaining -= tau;
            if remaining <= 1e-14 * dt.abs() {
                remaining = 0.0;
            }
            tau *= 2.0;
        }
        Ok((state, stats))
    }
}
