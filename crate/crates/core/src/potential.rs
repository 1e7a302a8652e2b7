//! Pair potential tabulated on lattice displacements.
//!
//! The same table feeds the many-body interaction and the mean-field
//! convolution `v * |phi|^2`, so both sides see bit-identical data.

use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Spectral};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct PairPotential {
    lattice: LatticeSpec,
    table: Vec<f64>,
}

impl PairPotential {
    pub fn zero(lattice: LatticeSpec) -> Self {
        Self {
            table: vec![0.0; lattice.num_sites()],
            lattice,
        }
    }

    /// Periodised Gaussian `g sum_n exp(-|x - n L|^2 / (2 sigma^2))` over image
    /// offsets `n` in `-2..=2` per axis.
    pub fn gaussian(lattice: LatticeSpec, strength: f64, width: f64) -> Result<Self> {
        if !(strength >= 0.0) || !strength.is_finite() {
            return Err(Error::Config(format!("potential strength must be nonnegative, got {strength}")));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::Config(format!("potential width must be positive, got {width}")));
        }
        let d = lattice.dimension();
        let len = lattice.side_length();
        let m = lattice.sites_per_axis();
        let dx = lattice.spacing();
        let table = (0..lattice.num_sites())
            .map(|s| {
                // minimal-image magnitudes, so v(x) and v(-x) come from identical inputs
                let c = lattice.coords(s);
                let r: Vec<f64> = (0..d)
                    .map(|a| {
                        let j = c[a].min(m - c[a]);
                        j as f64 * dx
                    })
                    .collect();
                let mut acc = 0.0;
                for n0 in -2i32..=2 {
                    for n1 in if d > 1 { -2i32..=2 } else { 0..=0 } {
                        for n2 in if d > 2 { -2i32..=2 } else { 0..=0 } {
                            let n = [n0, n1, n2];
                            let r2: f64 = (0..d).map(|a| (r[a] - n[a] as f64 * len).powi(2)).sum();
                            acc += (-r2 / (2.0 * width * width)).exp();
                        }
                    }
                }
                strength * acc
            })
            .collect();
        Ok(Self { lattice, table })
    }

    /// Arbitrary table; must be real, nonnegative and even under `x -> -x`.
    pub fn from_table(lattice: LatticeSpec, table: Vec<f64>) -> Result<Self> {
        if table.len() != lattice.num_sites() {
            return Err(Error::DimensionMismatch {
                expected: lattice.num_sites(),
                found: table.len(),
            });
        }
        for (s, &v) in table.iter().enumerate() {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("potential must be finite and nonnegative, v[{s}] = {v}")));
            }
            let minus = lattice.negate_momentum(s);
            if table[minus] != v {
                return Err(Error::Config(format!("potential is not even: v[{s}] != v[{minus}]")));
            }
        }
        Ok(Self { lattice, table })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    /// `v(x_s)` indexed by displacement site.
    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|&v| v == 0.0)
    }

    /// `sum_x dx^d v(x)`.
    pub fn integral(&self) -> f64 {
        self.table.iter().sum::<f64>() * self.lattice.cell_volume()
    }

    /// `v~(k) = sum_s v(x_s) exp(-i k x_s)` per lattice momentum; real because
    /// the table is even.
    pub fn lattice_transform(&self, spectral: &Spectral) -> Vec<f64> {
        let mut data: Vec<C64> = self.table.iter().map(|&v| C64::new(v, 0.0)).collect();
        spectral.forward_raw(&mut data);
        data.iter().map(|z| z.re).collect()
    }

    /// `(v * rho)(x) = sum_y dx^d v(x - y) rho(y)`.
    pub fn convolve(&self, spectral: &Spectral, rho: &[f64]) -> Vec<f64> {
        let a: Vec<C64> = self.table.iter().map(|&v| C64::new(v, 0.0)).collect();
        let b: Vec<C64> = rho.iter().map(|&v| C64::new(v, 0.0)).collect();
        let dv = self.lattice.cell_volume();
        spectral
            .circular_convolve(&a, &b)
            .iter()
            .map(|z| z.re * dv)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_table_is_exactly_even() {
        for d in 1..=3 {
            let lat = LatticeSpec::new(d, 6, 5.0).unwrap();
            let v = PairPotential::gaussian(lat, 0.7, 0.9).unwrap();
            for s in 0..lat.num_sites() {
                assert_eq!(v.table()[s], v.table()[lat.negate_momentum(s)]);
            }
            assert!(PairPotential::from_table(lat, v.table().to_vec()).is_ok());
        }
    }

    #[test]
    fn rejects_odd_or_negative_tables() {
        let lat = LatticeSpec::new(1, 4, 1.0).unwrap();
        assert!(PairPotential::from_table(lat, vec![1.0, 0.5, 0.2, 0.4]).is_err());
        assert!(PairPotential::from_table(lat, vec![1.0, -0.5, 0.2, -0.5]).is_err());
        assert!(PairPotential::gaussian(lat, 1.0, 0.0).is_err());
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let lat = LatticeSpec::new(2, 4, 2.0 * PI).unwrap();
        let spectral = Spectral::new(lat);
        let v = PairPotential::gaussian(lat, 1.3, 1.1).unwrap();
        let rho: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let fast = v.convolve(&spectral, &rho);
        for x in 0..16 {
            let direct: f64 = (0..16)
                .map(|y| v.table()[lat.displacement(x, y)] * rho[y] * lat.cell_volume())
                .sum();
            assert!((fast[x] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_density_convolution_is_integral_over_volume() {
        let lat = LatticeSpec::new(1, 8, 2.0 * PI).unwrap();
        let spectral = Spectral::new(lat);
        let v = PairPotential::gaussian(lat, 1.0, 0.8).unwrap();
        let rho = vec![1.0 / lat.volume(); 8];
        for value in v.convolve(&spectral, &rho) {
            assert!((value - v.integral() / lat.volume()).abs() < 1e-13);
        }
    }
}
