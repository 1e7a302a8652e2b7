//! Periodic lattice geometry and the discrete Fourier transforms on it.
//!
//! Sites and lattice momenta share one flat indexing: the coordinate along
//! axis 0 varies slowest. Momentum indices use FFT ordering, so index `n` on an
//! axis stands for the integer frequency `n` when `n < M/2` and `n - M`
//! otherwise; the physical momenta are `2 pi n / L` with `n` in `-M/2..M/2`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Three-component real vector; unused trailing components are zero when d < 3.
pub type Vec3 = [f64; 3];

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    dimension: usize,
    sites_per_axis: usize,
    side_length: f64,
}

impl LatticeSpec {
    pub fn new(dimension: usize, sites_per_axis: usize, side_length: f64) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::Config(format!(
                "lattice dimension must be 1, 2 or 3, got {dimension}"
            )));
        }
        if sites_per_axis < 2 || sites_per_axis % 2 != 0 {
            return Err(Error::Config(format!(
                "sites per axis must be even and at least 2, got {sites_per_axis}"
            )));
        }
        if !(side_length > 0.0) || !side_length.is_finite() {
            return Err(Error::Config(format!(
                "side length must be positive, got {side_length}"
            )));
        }
        Ok(Self {
            dimension,
            sites_per_axis,
            side_length,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn sites_per_axis(&self) -> usize {
        self.sites_per_axis
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    pub fn num_sites(&self) -> usize {
        self.sites_per_axis.pow(self.dimension as u32)
    }

    /// Lattice spacing `L / M`.
    pub fn spacing(&self) -> f64 {
        self.side_length / self.sites_per_axis as f64
    }

    /// Momentum spacing `2 pi / L`.
    pub fn momentum_spacing(&self) -> f64 {
        2.0 * PI / self.side_length
    }

    pub fn volume(&self) -> f64 {
        self.side_length.powi(self.dimension as i32)
    }

    /// Volume of one lattice cell, `dx^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    /// Quadrature weight of one momentum mode, `dk^d`.
    pub fn mode_weight(&self) -> f64 {
        self.momentum_spacing().powi(self.dimension as i32)
    }

    /// Largest momentum magnitude representable along an axis, `pi M / L`.
    pub fn brillouin_edge(&self) -> f64 {
        PI * self.sites_per_axis as f64 / self.side_length
    }

    pub fn coords(&self, index: usize) -> [usize; 3] {
        let m = self.sites_per_axis;
        let mut out = [0usize; 3];
        let mut rest = index;
        for axis in (0..self.dimension).rev() {
            out[axis] = rest % m;
            rest /= m;
        }
        out
    }

    pub fn index(&self, coords: [usize; 3]) -> usize {
        let m = self.sites_per_axis;
        (0..self.dimension).fold(0, |acc, axis| acc * m + coords[axis] % m)
    }

    /// Signed integer frequencies of a momentum index.
    pub fn frequencies(&self, index: usize) -> [i64; 3] {
        let m = self.sites_per_axis as i64;
        let c = self.coords(index);
        let mut out = [0i64; 3];
        for axis in 0..self.dimension {
            let n = c[axis] as i64;
            out[axis] = if n < m / 2 { n } else { n - m };
        }
        out
    }

    /// Momentum index for signed integer frequencies (taken modulo M).
    pub fn index_of_frequencies(&self, freq: [i64; 3]) -> usize {
        let m = self.sites_per_axis as i64;
        let mut c = [0usize; 3];
        for axis in 0..self.dimension {
            c[axis] = freq[axis].rem_euclid(m) as usize;
        }
        self.index(c)
    }

    pub fn momentum(&self, index: usize) -> Vec3 {
        let dk = self.momentum_spacing();
        let f = self.frequencies(index);
        [f[0] as f64 * dk, f[1] as f64 * dk, f[2] as f64 * dk]
    }

    pub fn position(&self, index: usize) -> Vec3 {
        let dx = self.spacing();
        let c = self.coords(index);
        [c[0] as f64 * dx, c[1] as f64 * dx, c[2] as f64 * dx]
    }

    /// Momentum index of `k_a + k_b`, wrapped into the Brillouin zone.
    pub fn add_momenta(&self, a: usize, b: usize) -> usize {
        let ca = self.coords(a);
        let cb = self.coords(b);
        self.index([ca[0] + cb[0], ca[1] + cb[1], ca[2] + cb[2]])
    }

    pub fn negate_momentum(&self, a: usize) -> usize {
        let m = self.sites_per_axis;
        let c = self.coords(a);
        self.index([(m - c[0]) % m, (m - c[1]) % m, (m - c[2]) % m])
    }

    /// Site index of `x_a - x_b` (periodic).
    pub fn displacement(&self, a: usize, b: usize) -> usize {
        self.add_momenta(a, self.negate_momentum(b))
    }

    /// Phase `exp(i k . x)` for lattice momentum `k` and site `x`, computed from
    /// integers so that it is exact modulo the reciprocal lattice.
    pub fn plane_wave(&self, momentum: usize, site: usize) -> C64 {
        let m = self.sites_per_axis as i64;
        let f = self.frequencies(momentum);
        let c = self.coords(site);
        let mut phase = 0i64;
        for axis in 0..self.dimension {
            phase += f[axis] * c[axis] as i64;
        }
        let reduced = phase.rem_euclid(m) as f64;
        C64::from_polar(1.0, 2.0 * PI * reduced / m as f64)
    }
}

/// Discrete Fourier transforms on a lattice.
///
/// `forward_unitary` maps site coefficients to momentum coefficients with the
/// unitary normalisation `(1/sqrt(M^d)) sum_x exp(-i k x) f(x)`. The continuum
/// transforms use the symmetric `(2 pi)^{-d/2}` convention with the Riemann
/// sums `sum_x dx^d` and `sum_k dk^d`.
#[derive(Clone)]
pub struct Spectral {
    lattice: LatticeSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("lattice", &self.lattice).finish()
    }
}

impl Spectral {
    pub fn new(lattice: LatticeSpec) -> Self {
        let mut planner = FftPlanner::new();
        let m = lattice.sites_per_axis();
        Self {
            lattice,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    fn transform_axes(&self, data: &mut [C64], fft: &Arc<dyn Fft<f64>>) {
        let m = self.lattice.sites_per_axis();
        let d = self.lattice.dimension();
        let total = self.lattice.num_sites();
        let mut line = vec![C64::new(0.0, 0.0); m];
        for axis in 0..d {
            let stride = m.pow((d - 1 - axis) as u32);
            let block = stride * m;
            for start in (0..total).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (j, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + j * stride];
                    }
                    fft.process(&mut line);
                    for (j, value) in line.iter().enumerate() {
                        data[base + j * stride] = *value;
                    }
                }
            }
        }
    }

    /// Unnormalised forward DFT, `sum_x exp(-i k x) f(x)`.
    pub fn forward_raw(&self, data: &mut [C64]) {
        self.transform_axes(data, &self.forward);
    }

    /// Unnormalised inverse DFT, `sum_k exp(i k x) f(k)`.
    pub fn inverse_raw(&self, data: &mut [C64]) {
        self.transform_axes(data, &self.inverse);
    }

    pub fn forward_unitary(&self, values: &[C64]) -> Vec<C64> {
        let mut out = values.to_vec();
        self.forward_raw(&mut out);
        let s = 1.0 / (self.lattice.num_sites() as f64).sqrt();
        out.iter_mut().for_each(|z| *z *= s);
        out
    }

    pub fn inverse_unitary(&self, values: &[C64]) -> Vec<C64> {
        let mut out = values.to_vec();
        self.inverse_raw(&mut out);
        let s = 1.0 / (self.lattice.num_sites() as f64).sqrt();
        out.iter_mut().for_each(|z| *z *= s);
        out
    }

    /// Continuum transform `(2 pi)^{-d/2} sum_x dx^d exp(-i k x) f(x)`.
    pub fn to_momentum(&self, values: &[C64]) -> Vec<C64> {
        let d = self.lattice.dimension() as i32;
        let mut out = values.to_vec();
        self.forward_raw(&mut out);
        let s = (2.0 * PI).powf(-d as f64 / 2.0) * self.lattice.cell_volume();
        out.iter_mut().for_each(|z| *z *= s);
        out
    }

    /// Inverse of [`Spectral::to_momentum`], `(2 pi)^{-d/2} sum_k dk^d exp(i k x) f(k)`.
    pub fn to_position(&self, values: &[C64]) -> Vec<C64> {
        let d = self.lattice.dimension() as i32;
        let mut out = values.to_vec();
        self.inverse_raw(&mut out);
        let s = (2.0 * PI).powf(-d as f64 / 2.0) * self.lattice.mode_weight();
        out.iter_mut().for_each(|z| *z *= s);
        out
    }

    /// Periodic convolution `sum_y a(x - y) b(y)` without cell-volume factor.
    pub fn circular_convolve(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        let mut fa = a.to_vec();
        let mut fb = b.to_vec();
        self.forward_raw(&mut fa);
        self.forward_raw(&mut fb);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x *= *y;
        }
        self.inverse_raw(&mut fa);
        let s = 1.0 / self.lattice.num_sites() as f64;
        fa.iter_mut().for_each(|z| *z *= s);
        fa
    }

    /// Spectral derivative `-i d/dx_axis` of site values.
    pub fn momentum_operator(&self, values: &[C64], axis: usize) -> Vec<C64> {
        let mut out = values.to_vec();
        self.forward_raw(&mut out);
        for (idx, z) in out.iter_mut().enumerate() {
            *z *= self.lattice.momentum(idx)[axis];
        }
        self.inverse_raw(&mut out);
        let s = 1.0 / self.lattice.num_sites() as f64;
        out.iter_mut().for_each(|z| *z *= s);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_or_tiny_grids() {
        assert!(LatticeSpec::new(1, 7, 1.0).is_err());
        assert!(LatticeSpec::new(1, 0, 1.0).is_err());
        assert!(LatticeSpec::new(4, 8, 1.0).is_err());
        assert!(LatticeSpec::new(1, 8, -1.0).is_err());
    }

    #[test]
    fn momentum_grid_is_symmetric_range() {
        let lat = LatticeSpec::new(1, 8, 2.0 * PI).unwrap();
        let mut ks: Vec<i64> = (0..8).map(|i| lat.frequencies(i)[0]).collect();
        ks.sort();
        assert_eq!(ks, vec![-4, -3, -2, -1, 0, 1, 2, 3]);
        assert!((lat.momentum_spacing() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn index_round_trip_3d() {
        let lat = LatticeSpec::new(3, 4, 1.0).unwrap();
        for i in 0..lat.num_sites() {
            assert_eq!(lat.index(lat.coords(i)), i);
            assert_eq!(lat.index_of_frequencies(lat.frequencies(i)), i);
            assert_eq!(lat.negate_momentum(lat.negate_momentum(i)), i);
        }
    }

    #[test]
    fn unitary_transform_matches_direct_sum() {
        let lat = LatticeSpec::new(2, 4, 3.0).unwrap();
        let sp = Spectral::new(lat);
        let f: Vec<C64> = (0..lat.num_sites())
            .map(|i| C64::new((i as f64).sin(), (0.3 * i as f64).cos()))
            .collect();
        let fast = sp.forward_unitary(&f);
        let norm = 1.0 / (lat.num_sites() as f64).sqrt();
        for k in 0..lat.num_sites() {
            let direct: C64 = (0..lat.num_sites())
                .map(|x| lat.plane_wave(k, x).conj() * f[x] * norm)
                .sum();
            assert!((direct - fast[k]).norm() < 1e-12);
        }
        let back = sp.inverse_unitary(&fast);
        for (a, b) in back.iter().zip(&f) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn continuum_transforms_are_inverse_and_preserve_l2() {
        let lat = LatticeSpec::new(1, 16, 5.0).unwrap();
        let sp = Spectral::new(lat);
        let f: Vec<C64> = (0..16).map(|i| C64::new(i as f64, -(i as f64).sqrt())).collect();
        let k = sp.to_momentum(&f);
        let back = sp.to_position(&k);
        for (a, b) in back.iter().zip(&f) {
            assert!((a - b).norm() < 1e-10);
        }
        let lx: f64 = f.iter().map(|z| z.norm_sqr()).sum::<f64>() * lat.cell_volume();
        let lk: f64 = k.iter().map(|z| z.norm_sqr()).sum::<f64>() * lat.mode_weight();
        assert!((lx - lk).abs() < 1e-9 * lx);
    }

    #[test]
    fn spectral_derivative_of_plane_wave() {
        let lat = LatticeSpec::new(1, 8, 2.0 * PI).unwrap();
        let sp = Spectral::new(lat);
        let k_idx = lat.index_of_frequencies([2, 0, 0]);
        let f: Vec<C64> = (0..8).map(|x| lat.plane_wave(k_idx, x)).collect();
        let df = sp.momentum_operator(&f, 0);
        for (a, b) in df.iter().zip(&f) {
            assert!((a - b * 2.0).norm() < 1e-12);
        }
    }
}
