use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field_modes::{build_mode_set, ModeSet};
use crate::fock::{CoherentAmplitude, FockBasis};
use crate::lattice::{dot, LatticeSpec};
use crate::manybody::{lattice_norm, CompositeSpace, ParticleBasis};
use crate::potential::PairPotential;
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub dimension: usize,
    pub sites_per_axis: usize,
    pub side_length: f64,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            dimension: 1,
            sites_per_axis: 8,
            side_length: 2.0 * PI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    Gaussian,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialConfig {
    pub kind: PotentialKind,
    pub strength: f64,
    pub width: f64,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self {
            kind: PotentialKind::Gaussian,
            strength: 1.0,
            width: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiPreset {
    Uniform,
    PlaneWave,
    GaussianPacket,
}

/// Initial one-body wavefunction. `frequencies` are integer lattice momenta
/// `k = 2 pi n / L` (plane wave, or carrier of the packet); `center` defaults
/// to the middle of the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhiConfig {
    pub preset: PhiPreset,
    pub frequencies: [i64; 3],
    pub width: f64,
    pub center: Option<[f64; 3]>,
}

impl Default for PhiConfig {
    fn default() -> Self {
        Self {
            preset: PhiPreset::GaussianPacket,
            frequencies: [1, 0, 0],
            width: 1.0,
            center: None,
        }
    }
}

/// One nonzero coefficient of the initial mode function `alpha_0`,
/// `value = [re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeAmplitude {
    pub frequencies: [i64; 3],
    #[serde(default)]
    pub polarization: usize,
    pub value: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub final_time: f64,
    /// Maxwell-Schroedinger step.
    pub ms_dt: f64,
    pub sample_interval: f64,
    /// Times at which the N sweep compares runs.
    pub sweep_times: Vec<f64>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            final_time: 1.0,
            ms_dt: 1e-3,
            sample_interval: 0.25,
            sweep_times: vec![0.25, 0.5, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceConfig {
    pub krylov: f64,
    pub krylov_subspace: usize,
    /// Poisson tail allowed when preparing coherent states.
    pub truncation: f64,
    /// Abort when the top photon sector of the evolved state carries more weight.
    pub max_leakage: f64,
    pub ms_krylov: f64,
    /// Abort the mean-field run beyond this relative energy drift.
    pub ms_max_drift: f64,
    /// Accepted longitudinal residual when reading off mode functions.
    pub longitudinal: f64,
    /// Allowed excess of a sample over the fitted envelope.
    pub envelope_slack: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            krylov: 1e-9,
            krylov_subspace: 30,
            truncation: 1e-6,
            max_leakage: 1e-2,
            ms_krylov: 1e-13,
            ms_max_drift: 1e-2,
            longitudinal: 1e-9,
            envelope_slack: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Stem of every output file.
    pub name: String,
    pub lattice: LatticeConfig,
    /// Photon cutoff; `0` removes every mode and decouples the field.
    pub cutoff: f64,
    pub potential: PotentialConfig,
    pub particle_numbers: Vec<usize>,
    /// Particle numbers for the initial-data scan of the sweep.
    pub scan_particle_numbers: Vec<usize>,
    pub max_photons: usize,
    pub phi0: PhiConfig,
    pub alpha0: Vec<ModeAmplitude>,
    pub time: TimeConfig,
    pub tolerances: ToleranceConfig,
    pub max_dimension: u64,
    /// Write a checkpoint every this many samples; `0` disables.
    pub checkpoint_every: usize,
    /// Randomized states drawn by the self check.
    pub random_states: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "default".into(),
            lattice: LatticeConfig::default(),
            cutoff: 2.0,
            potential: PotentialConfig::default(),
            particle_numbers: (2..=6).collect(),
            scan_particle_numbers: (2..=8).collect(),
            max_photons: 6,
            phi0: PhiConfig::default(),
            alpha0: vec![ModeAmplitude {
                frequencies: [1, 0, 0],
                polarization: 0,
                value: [0.1, 0.0],
            }],
            time: TimeConfig::default(),
            tolerances: ToleranceConfig::default(),
            max_dimension: 5_000_000,
            checkpoint_every: 0,
            random_states: 200,
            seed: 0,
        }
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn whole_multiple(total: f64, unit: f64, what: &str) -> Result<usize> {
    let n = (total / unit).round();
    if n < 1.0 || ((n * unit - total).abs() > 1e-9 * total.abs().max(1.0)) {
        return Err(config_err(format!("{what}: {total} is not a positive multiple of {unit}")));
    }
    Ok(n as usize)
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| config_err(format!("invalid configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    /// Hex sha256 of the compact JSON form of the resolved configuration.
    pub fn hash(&self) -> String {
        hex_digest(&self.hash_bytes())
    }

    pub fn hash_bytes(&self) -> [u8; 32] {
        let text = serde_json::to_string(self).expect("configuration serializes");
        Sha256::digest(text.as_bytes()).into()
    }

    pub fn lattice_spec(&self) -> Result<LatticeSpec> {
        let l = &self.lattice;
        LatticeSpec::new(l.dimension, l.sites_per_axis, l.side_length)
    }

    pub fn steps_per_sample(&self) -> Result<usize> {
        whole_multiple(self.time.sample_interval, self.time.ms_dt, "sample_interval")
    }

    pub fn sample_count(&self) -> Result<usize> {
        whole_multiple(self.time.final_time, self.time.sample_interval, "final_time")
    }

    /// Index of the sample at time `t`.
    pub fn sample_index(&self, t: f64) -> Result<usize> {
        let n = self.sample_count()?;
        let i = (t / self.time.sample_interval).round();
        if i < 0.0 || i as usize > n || (i * self.time.sample_interval - t).abs() > 1e-9 {
            return Err(config_err(format!("time {t} is not on the sample grid")));
        }
        Ok(i as usize)
    }

    /// Cross-checks everything that does not need a Hilbert space.
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(config_err(format!("run name {:?} is not a plain file stem", self.name)));
        }
        self.lattice_spec()?;
        if self.particle_numbers.is_empty() || self.particle_numbers.contains(&0) {
            return Err(config_err("particle_numbers must be a nonempty list of positive integers"));
        }
        if self.scan_particle_numbers.contains(&0) {
            return Err(config_err("scan_particle_numbers must be positive"));
        }
        if !(self.cutoff >= 0.0) {
            return Err(config_err(format!("cutoff must be nonnegative, got {}", self.cutoff)));
        }
        let t = &self.time;
        for (name, v) in [("final_time", t.final_time), ("ms_dt", t.ms_dt), ("sample_interval", t.sample_interval)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(config_err(format!("{name} must be positive, got {v}")));
            }
        }
        self.steps_per_sample()?;
        self.sample_count()?;
        for &s in &t.sweep_times {
            self.sample_index(s)?;
        }
        let tol = &self.tolerances;
        for (name, v) in [
            ("krylov", tol.krylov),
            ("truncation", tol.truncation),
            ("max_leakage", tol.max_leakage),
            ("ms_krylov", tol.ms_krylov),
            ("ms_max_drift", tol.ms_max_drift),
            ("longitudinal", tol.longitudinal),
        ] {
            if !(v > 0.0) {
                return Err(config_err(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if tol.krylov_subspace < 2 {
            return Err(config_err("krylov_subspace must be at least 2"));
        }
        if self.phi0.preset == PhiPreset::GaussianPacket && !(self.phi0.width > 0.0) {
            return Err(config_err("gaussian packet width must be positive"));
        }
        if self.potential.kind == PotentialKind::Gaussian
            && (!(self.potential.width > 0.0) || !(self.potential.strength >= 0.0))
        {
            return Err(config_err("gaussian potential needs width > 0 and strength >= 0"));
        }
        Ok(())
    }

    /// Requirements of the N sweep on top of [`validate`](Self::validate).
    pub fn validate_sweep(&self) -> Result<()> {
        self.validate()?;
        let distinct = |v: &[usize]| {
            let mut v = v.to_vec();
            v.sort_unstable();
            v.dedup();
            v.len()
        };
        if distinct(&self.particle_numbers) < 3 {
            return Err(config_err("an N sweep needs at least three distinct particle numbers"));
        }
        if !self.scan_particle_numbers.is_empty() && distinct(&self.scan_particle_numbers) < 3 {
            return Err(config_err("the initial-data scan needs at least three distinct particle numbers"));
        }
        Ok(())
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Resolved physical inputs shared by the classical and the quantum runs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ExperimentConfig,
    pub hash: String,
    pub lattice: LatticeSpec,
    pub modes: std::sync::Arc<ModeSet>,
    pub potential: PairPotential,
    pub phi0: Vec<C64>,
    pub alpha0: CoherentAmplitude,
}

impl Scenario {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let lattice = config.lattice_spec()?;
        let modes = if config.cutoff == 0.0 {
            ModeSet::empty(lattice)
        } else {
            build_mode_set(lattice, config.cutoff)?
        };
        let potential = match config.potential.kind {
            PotentialKind::Zero => PairPotential::zero(lattice),
            PotentialKind::Gaussian => PairPotential::gaussian(lattice, config.potential.strength, config.potential.width)?,
        };
        let phi0 = initial_wavefunction(&lattice, &config.phi0)?;
        let entries = config
            .alpha0
            .iter()
            .map(|a| {
                let idx = frequency_index(&lattice, a.frequencies)?;
                Ok((idx, a.polarization, C64::new(a.value[0], a.value[1])))
            })
            .collect::<Result<Vec<_>>>()?;
        let alpha0 = CoherentAmplitude::from_entries(&modes, &entries)?;
        Ok(Self {
            hash: config.hash(),
            config,
            lattice,
            modes: std::sync::Arc::new(modes),
            potential,
            phi0,
            alpha0,
        })
    }

    /// Composite space for `n` particles, refusing dimensions above the cap.
    pub fn space(&self, n: usize) -> Result<std::sync::Arc<CompositeSpace>> {
        let photons = FockBasis::new(self.modes.clone(), self.config.max_photons)?;
        CompositeSpace::new(self.lattice, n, photons, self.config.max_dimension as u128)
    }

    pub fn dimension(&self, n: usize) -> u128 {
        ParticleBasis::dimension_for(self.lattice.num_sites(), n)
            * FockBasis::dimension_for(self.modes.len(), self.config.max_photons)
    }
}

fn frequency_index(lat: &LatticeSpec, f: [i64; 3]) -> Result<usize> {
    let half = (lat.sites_per_axis() / 2) as i64;
    for (axis, &n) in f.iter().enumerate() {
        let allowed = if axis < lat.dimension() { -half..half } else { 0..1 };
        if !allowed.contains(&n) {
            return Err(config_err(format!("frequencies {f:?} do not name a lattice momentum")));
        }
    }
    Ok(lat.index_of_frequencies(f))
}

/// Site values of the named preset, normalized to `sum dx^d |phi|^2 = 1`.
pub fn initial_wavefunction(lat: &LatticeSpec, spec: &PhiConfig) -> Result<Vec<C64>> {
    let kidx = frequency_index(lat, spec.frequencies)?;
    let k = lat.momentum(kidx);
    let l = lat.side_length();
    let center = spec.center.unwrap_or([l / 2.0; 3]);
    let phi: Vec<C64> = (0..lat.num_sites())
        .map(|s| {
            let x = lat.position(s);
            match spec.preset {
                PhiPreset::Uniform => C64::new(1.0, 0.0),
                PhiPreset::PlaneWave => C64::from_polar(1.0, dot(&k, &x)),
                PhiPreset::GaussianPacket => {
                    let mut r2 = 0.0;
                    for axis in 0..lat.dimension() {
                        let dx = (x[axis] - center[axis]).rem_euclid(l);
                        let dx = if dx >= l / 2.0 { dx - l } else { dx };
                        r2 += dx * dx;
                    }
                    C64::from_polar((-r2 / (2.0 * spec.width * spec.width)).exp(), dot(&k, &x))
                }
            }
        })
        .collect();
    let n = lattice_norm(lat, &phi);
    if !(n > 0.0) || !n.is_finite() {
        return Err(config_err("initial wavefunction vanishes on the lattice"));
    }
    Ok(phi.iter().map(|z| z / n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_and_hash_is_stable() {
        let cfg = ExperimentConfig::default();
        let back = ExperimentConfig::from_json(&cfg.to_json_pretty()).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.hash(), back.hash());
        assert_eq!(cfg.hash().len(), 64);
        let partial = ExperimentConfig::from_json(r#"{"name": "x"}"#).unwrap();
        assert_eq!(partial.max_photons, 6);
        assert_ne!(partial.hash(), cfg.hash());
    }

    #[test]
    fn unknown_fields_and_bad_grids_are_config_errors() {
        assert!(matches!(ExperimentConfig::from_json(r#"{"nmae": "x"}"#), Err(Error::Config(_))));
        let mut cfg = ExperimentConfig::default();
        cfg.time.sample_interval = 0.3;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let mut cfg = ExperimentConfig::default();
        cfg.particle_numbers = vec![4];
        cfg.validate().unwrap();
        assert!(matches!(cfg.validate_sweep(), Err(Error::Config(_))));
        cfg.particle_numbers = vec![4, 4, 4];
        assert!(cfg.validate_sweep().is_err());
    }

    #[test]
    fn scenario_resolves_defaults() {
        let s = Scenario::new(ExperimentConfig::default()).unwrap();
        assert_eq!(s.modes.len(), 4);
        assert!((lattice_norm(&s.lattice, &s.phi0) - 1.0).abs() < 1e-14);
        assert_eq!(s.alpha0.values().iter().filter(|z| z.norm() > 0.0).count(), 1);
        assert_eq!(s.dimension(6), 1716 * 210);
        assert_eq!(s.config.steps_per_sample().unwrap(), 250);
        assert_eq!(s.config.sample_count().unwrap(), 4);
    }

    #[test]
    fn cutoff_errors() {
        let mut cfg = ExperimentConfig::default();
        cfg.cutoff = 0.5;
        assert!(matches!(Scenario::new(cfg.clone()), Err(Error::Config(_))));
        cfg.cutoff = 10.0;
        assert!(matches!(Scenario::new(cfg.clone()), Err(Error::Config(_))));
        cfg.cutoff = 0.0;
        cfg.alpha0.clear();
        assert!(Scenario::new(cfg).unwrap().modes.is_empty());
    }

    #[test]
    fn presets_are_normalized() {
        let lat = LatticeSpec::new(2, 6, 3.0).unwrap();
        for preset in [PhiPreset::Uniform, PhiPreset::PlaneWave, PhiPreset::GaussianPacket] {
            let spec = PhiConfig { preset, frequencies: [1, -1, 0], width: 0.7, center: None };
            let phi = initial_wavefunction(&lat, &spec).unwrap();
            assert!((lattice_norm(&lat, &phi) - 1.0).abs() < 1e-14);
        }
        let bad = PhiConfig { frequencies: [3, 0, 0], ..PhiConfig::default() };
        assert!(initial_wavefunction(&LatticeSpec::new(1, 6, 3.0).unwrap(), &bad).is_err());
    }
}
