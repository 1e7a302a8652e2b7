use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{suggested_truncation, CoherentAmplitude};
use crate::functionals::{beta_report, BetaReport, MeanFieldSample, CSV_HEADER};
use crate::harness::checkpoint::Checkpoint;
use crate::harness::config::Scenario;
use crate::krylov::KrylovPropagator;
use crate::linalg::inner;
use crate::manybody::{assemble_pauli_fierz, product_initial_state, propagate, CompositeState, HamiltonianSpec, PauliFierzOperator};
use crate::meanfield::{alpha_from_fields, EffectiveState, MaxwellSchrodinger, MsEnergy, MsParams};

/// Mean-field data at one sample time.
#[derive(Debug, Clone)]
pub struct MsSample {
    pub index: usize,
    pub state: EffectiveState,
    pub alpha: CoherentAmplitude,
    pub energy: MsEnergy,
    pub gauge_residual: f64,
    pub norm_phi: f64,
}

pub const MS_CSV_HEADER: &str = "t,E_M,E_kinetic,E_interaction,E_field,gauge_residual,norm_phi";

pub const QM_CSV_HEADER: &str = "t,N,E_many_per_N,energy_variance,photons_per_N,norm_Psi,leakage";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsSummary {
    pub steps: usize,
    pub energy_initial: f64,
    pub energy_relative_drift: f64,
    pub norm_drift: f64,
    pub max_gauge_residual: f64,
    pub wall_seconds: f64,
}

/// Quantum-only observables at one sample time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QmRow {
    pub t: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "E_many_per_N")]
    pub e_many_per_n: f64,
    /// `||(H/N - <H/N>) Psi||^2`
    pub energy_variance: f64,
    pub photons_per_n: f64,
    #[serde(rename = "norm_Psi")]
    pub norm_psi: f64,
    pub leakage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    #[serde(rename = "N")]
    pub n: usize,
    pub dimension: usize,
    pub samples: usize,
    pub matvecs: usize,
    pub max_leakage: f64,
    pub resumed_from_sample: Option<usize>,
    pub wall_seconds: f64,
}

/// Output of [`run_comparison`]; rows are ordered by `N`, then `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub name: String,
    pub rows: Vec<BetaReport>,
    pub runs: Vec<RunStats>,
    pub ms: MsSummary,
    pub wall_seconds: f64,
}

impl RunRecord {
    pub fn rows_for(&self, n: usize) -> impl Iterator<Item = &BetaReport> {
        self.rows.iter().filter(move |r| r.n == n)
    }

    /// Largest `|x(t) - x(0)|` of a column over the run with `n` particles.
    pub fn drift(&self, n: usize, column: impl Fn(&BetaReport) -> f64) -> f64 {
        let mut rows = self.rows_for(n);
        let Some(first) = rows.next() else { return 0.0 };
        let x0 = column(first);
        rows.map(|r| (column(r) - x0).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Directory for periodic checkpoints (enabled by `checkpoint_every`).
    pub checkpoint_dir: Option<PathBuf>,
    /// Resume points keyed by particle number.
    pub resume: BTreeMap<usize, Checkpoint>,
}

pub fn ms_solver(scn: &Scenario) -> Result<MaxwellSchrodinger> {
    let tol = &scn.config.tolerances;
    let params = MsParams {
        dt: scn.config.time.ms_dt,
        krylov_tolerance: tol.ms_krylov,
        max_relative_drift: tol.ms_max_drift,
        ..MsParams::default()
    };
    MaxwellSchrodinger::new(scn.modes.clone(), scn.potential.clone(), params)
}

fn ms_sample(scn: &Scenario, solver: &MaxwellSchrodinger, index: usize, state: EffectiveState) -> Result<MsSample> {
    let (_, alpha) = alpha_from_fields(&scn.modes, &state.a, &state.e, scn.config.tolerances.longitudinal)?;
    Ok(MsSample {
        index,
        energy: solver.energy(&state),
        gauge_residual: solver.gauge_residual(&state),
        norm_phi: solver.norm(&state),
        alpha,
        state,
    })
}

/// Mean-field trajectory at every sample time, including `t = 0`.
pub fn run_ms(scn: &Scenario) -> Result<(Vec<MsSample>, MsSummary)> {
    let start = Instant::now();
    let solver = ms_solver(scn)?;
    let steps = scn.config.steps_per_sample()?;
    let count = scn.config.sample_count()?;
    let mut state = solver.initial_state(&scn.phi0, &scn.alpha0)?;
    let mut samples = vec![ms_sample(scn, &solver, 0, state.clone())?];
    let mut max_gauge: f64 = samples[0].gauge_residual;
    for index in 1..=count {
        state = solver.evolve(&state, steps, |_, s| {
            max_gauge = max_gauge.max(solver.gauge_residual(s));
            Ok(())
        })?;
        state.time = index as f64 * scn.config.time.sample_interval;
        samples.push(ms_sample(scn, &solver, index, state.clone())?);
    }
    let e0 = samples[0].energy.total;
    let summary = MsSummary {
        steps: steps * count,
        energy_initial: e0,
        energy_relative_drift: samples
            .iter()
            .map(|s| (s.energy.total - e0).abs() / e0.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max),
        norm_drift: samples.iter().map(|s| (s.norm_phi - 1.0).abs()).fold(0.0, f64::max),
        max_gauge_residual: max_gauge,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((samples, summary))
}

pub fn checkpoint_path(dir: &Path, name: &str, n: usize) -> PathBuf {
    dir.join(format!("{name}.N{n}.ckpt"))
}

fn mean_photons(state: &CompositeState) -> f64 {
    let fb = state.space().photons();
    let weights = vec![1.0; fb.modes().len()];
    let number = fb.number_diagonal(&weights);
    inner(&state.amplitudes, &state.apply_photon(&number)).re
}

/// Propagates the product initial state (or a checkpoint) for `n` particles
/// and hands every sample to `on_sample`.
pub fn run_quantum<F>(scn: &Scenario, n: usize, options: &RunOptions, mut on_sample: F) -> Result<RunStats>
where
    F: FnMut(usize, &CompositeState, &PauliFierzOperator) -> Result<()>,
{
    let start = Instant::now();
    let cfg = &scn.config;
    let tol = &cfg.tolerances;
    let space = scn.space(n)?;
    let h = assemble_pauli_fierz(&space, &HamiltonianSpec::new(scn.potential.clone()))?;
    let count = cfg.sample_count()?;
    let interval = cfg.time.sample_interval;
    let (mut state, first) = match options.resume.get(&n) {
        Some(ck) => {
            if ck.config_hash != cfg.hash_bytes() {
                return Err(Error::Checkpoint("checkpoint belongs to a different configuration".into()));
            }
            if ck.particles != n || ck.sample_index > count {
                return Err(Error::Checkpoint(format!(
                    "checkpoint for N = {} at sample {} does not fit this run",
                    ck.particles, ck.sample_index
                )));
            }
            (CompositeState::new(space.clone(), ck.amplitudes.clone(), ck.time)?, ck.sample_index)
        }
        None => (product_initial_state(&space, &scn.phi0, &scn.alpha0, tol.truncation)?, 0),
    };
    let propagator = KrylovPropagator::new(tol.krylov_subspace, tol.krylov);
    let mut stats = RunStats {
        n,
        dimension: space.dim(),
        samples: 0,
        matvecs: 0,
        max_leakage: 0.0,
        resumed_from_sample: options.resume.get(&n).map(|c| c.sample_index),
        wall_seconds: 0.0,
    };
    for index in first..=count {
        if index > first {
            let (next, ks) = propagate(&state, &h, interval, &propagator)?;
            state = next;
            state.time = index as f64 * interval;
            stats.matvecs += ks.matvecs;
        }
        let leakage = state.top_sector_weight();
        stats.max_leakage = stats.max_leakage.max(leakage);
        if leakage > tol.max_leakage {
            let mean = mean_photons(&state);
            return Err(Error::Truncation {
                leakage,
                threshold: tol.max_leakage,
                mean_photons: mean,
                suggested_truncation: suggested_truncation(mean, tol.max_leakage).max(cfg.max_photons + 1),
            });
        }
        on_sample(index, &state, &h)?;
        stats.samples += 1;
        if let Some(dir) = &options.checkpoint_dir {
            if cfg.checkpoint_every > 0 && index > first && index % cfg.checkpoint_every == 0 {
                Checkpoint {
                    config_hash: cfg.hash_bytes(),
                    particles: n,
                    sample_index: index,
                    time: state.time,
                    amplitudes: state.amplitudes.clone(),
                }
                .write(&checkpoint_path(dir, &cfg.name, n))?;
            }
        }
    }
    stats.wall_seconds = start.elapsed().as_secs_f64();
    Ok(stats)
}

/// Quantum-only observables, no mean-field reference.
pub fn run_qm(scn: &Scenario, options: &RunOptions) -> Result<(Vec<QmRow>, Vec<RunStats>)> {
    let results: Vec<Result<(Vec<QmRow>, RunStats)>> = scn
        .config
        .particle_numbers
        .par_iter()
        .map(|&n| {
            let mut rows = Vec::new();
            let stats = run_quantum(scn, n, options, |_, st, h| {
                let nf = n as f64;
                let hpsi = h.apply_vec(&st.amplitudes);
                let e = inner(&st.amplitudes, &hpsi).re / nf;
                let var = hpsi
                    .iter()
                    .zip(&st.amplitudes)
                    .map(|(hx, x)| (hx / nf - x * e).norm_sqr())
                    .sum();
                rows.push(QmRow {
                    t: st.time,
                    n,
                    e_many_per_n: e,
                    energy_variance: var,
                    photons_per_n: mean_photons(st) / nf,
                    norm_psi: st.norm(),
                    leakage: st.top_sector_weight(),
                });
                Ok(())
            })?;
            Ok((rows, stats))
        })
        .collect();
    let mut rows = Vec::new();
    let mut stats = Vec::new();
    for r in results {
        let (r, s) = r?;
        rows.extend(r);
        stats.push(s);
    }
    Ok((rows, stats))
}

/// Quantum versus mean-field comparison for every configured particle number.
pub fn run_comparison(scn: &Scenario, options: &RunOptions) -> Result<RunRecord> {
    let start = Instant::now();
    let (ms, ms_summary) = run_ms(scn)?;
    let results: Vec<Result<(Vec<BetaReport>, RunStats)>> = scn
        .config
        .particle_numbers
        .par_iter()
        .map(|&n| {
            let mut rows = Vec::new();
            let stats = run_quantum(scn, n, options, |index, st, h| {
                let m = &ms[index];
                let sample = MeanFieldSample {
                    phi: &m.state.phi,
                    alpha: &m.alpha,
                    energy: m.energy.total,
                    gauge_residual: m.gauge_residual,
                    norm_phi: m.norm_phi,
                };
                rows.push(beta_report(st, h, &sample)?);
                Ok(())
            })?;
            Ok((rows, stats))
        })
        .collect();
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for r in results {
        let (r, s) = r?;
        rows.extend(r);
        runs.push(s);
    }
    Ok(RunRecord {
        config_hash: scn.hash.clone(),
        name: scn.config.name.clone(),
        rows,
        runs,
        ms: ms_summary,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

fn csv_writer(path: &Path, header: &str) -> Result<csv::Writer<std::fs::File>> {
    use std::io::Write;
    let mut file = std::fs::File::create(path)?;
    writeln!(file, "{header}")?;
    Ok(csv::WriterBuilder::new().has_headers(false).from_writer(file))
}

pub fn write_beta_csv(path: &Path, rows: &[BetaReport]) -> Result<()> {
    let mut w = csv_writer(path, CSV_HEADER)?;
    for r in rows {
        r.validate()?;
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ms_csv(path: &Path, samples: &[MsSample]) -> Result<()> {
    let mut w = csv_writer(path, MS_CSV_HEADER)?;
    for s in samples {
        let e = s.energy;
        w.serialize((s.state.time, e.total, e.kinetic, e.interaction, e.field, s.gauge_residual, s.norm_phi))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_qm_csv(path: &Path, rows: &[QmRow]) -> Result<()> {
    let mut w = csv_writer(path, QM_CSV_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
