//! Dense linear algebra helpers and vector kernels.

use nalgebra::DMatrix;

use crate::C64;

/// `<a, b>`, antilinear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    norm_sqr(a).sqrt()
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eigenvalues (ascending) and eigenvectors of a hermitian matrix.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    if m.is_empty() {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = m.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Largest `|M_ij - conj(M_ji)|`.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Trace norm of a hermitian matrix, `sum |eigenvalue|`.
pub fn trace_norm_hermitian(m: &DMatrix<C64>) -> f64 {
    hermitian_eigen(m).0.iter().map(|l| l.abs()).sum()
}

pub fn hilbert_schmidt_norm(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `exp(-i t H)` for hermitian `H` via its eigendecomposition.
pub fn unitary_exponential(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let (values, vectors) = hermitian_eigen(h);
    let n = values.len();
    let phases = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            C64::from_polar(1.0, -t * values[r])
        } else {
            C64::new(0.0, 0.0)
        }
    });
    &vectors * phases * vectors.adjoint()
}

/// Rank-one projector `|v><v|`.
pub fn projector(v: &[C64]) -> DMatrix<C64> {
    let n = v.len();
    DMatrix::from_fn(n, n, |r, c| v[r] * v[c].conj())
}
