use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{initial_condition_values, BetaReport};
use crate::harness::config::Scenario;
use crate::harness::run::{run_comparison, RunOptions, RunRecord};
use crate::manybody::{assemble_pauli_fierz, product_initial_state, HamiltonianSpec};
use crate::meanfield::{MaxwellSchrodinger, MsParams};

/// Absolute slack of the monotonicity verdicts.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Initial data of the product state for one particle number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    #[serde(rename = "N")]
    pub n: usize,
    pub a_n: f64,
    pub b_n: f64,
    pub beta_c0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendVerdict {
    pub t: f64,
    pub particle_numbers: Vec<usize>,
    pub tr_dist_particle: Vec<f64>,
    pub non_increasing: bool,
    /// log-log slopes in `N`
    pub tr_dist_particle_slope: f64,
    pub beta_slope: f64,
}

/// Envelope `(beta(0) + c / N) exp(C t)` with `c` the commutator constant and
/// `C` fitted through the origin in `ln(beta / (beta(0) + c/N))` versus `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GronwallFit {
    pub c_prime: f64,
    pub rate: f64,
    /// Largest `beta / envelope` over all samples.
    pub max_ratio: f64,
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub config_hash: String,
    pub scan: Vec<ScanPoint>,
    pub beta_c0_slope: Option<f64>,
    pub trends: Vec<TrendVerdict>,
    pub gronwall: GronwallFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub run: RunRecord,
    pub summary: SweepSummary,
}

/// Least-squares slope of `ln y` against `ln x`; `None` unless at least two
/// points are positive.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `a_N`, `b_N` and `beta^c(0)` of the product initial state for every
/// configured scan particle number.
pub fn initial_data_scan(scn: &Scenario) -> Result<Vec<ScanPoint>> {
    let solver = MaxwellSchrodinger::new(scn.modes.clone(), scn.potential.clone(), MsParams::default())?;
    let e_m = solver.energy(&solver.initial_state(&scn.phi0, &scn.alpha0)?).total;
    let tol = scn.config.tolerances.truncation;
    scn.config
        .scan_particle_numbers
        .par_iter()
        .map(|&n| {
            let space = scn.space(n)?;
            let h = assemble_pauli_fierz(&space, &HamiltonianSpec::new(scn.potential.clone()))?;
            let st = product_initial_state(&space, &scn.phi0, &scn.alpha0, tol)?;
            let d = initial_condition_values(&st, &scn.phi0, &scn.alpha0, &h, e_m, tol)?;
            Ok(ScanPoint {
                n,
                a_n: d.a_n,
                b_n: d.b_n,
                beta_c0: d.c_n,
            })
        })
        .collect()
}

fn at_time<'a>(rows: &'a [BetaReport], n: usize, t: f64) -> Option<&'a BetaReport> {
    rows.iter().find(|r| r.n == n && (r.t - t).abs() < 1e-9)
}

pub fn trend_verdicts(record: &RunRecord, times: &[f64]) -> Result<Vec<TrendVerdict>> {
    let mut ns: Vec<usize> = record.runs.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    times
        .iter()
        .map(|&t| {
            let rows = ns
                .iter()
                .map(|&n| {
                    at_time(&record.rows, n, t)
                        .ok_or_else(|| Error::Config(format!("no sample at t = {t} for N = {n}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let tr: Vec<f64> = rows.iter().map(|r| r.tr_dist_particle).collect();
            let beta: Vec<f64> = rows.iter().map(|r| r.beta).collect();
            let nf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
            Ok(TrendVerdict {
                t,
                particle_numbers: ns.clone(),
                non_increasing: tr.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK),
                tr_dist_particle_slope: log_log_slope(&nf, &tr).unwrap_or(f64::NAN),
                beta_slope: log_log_slope(&nf, &beta).unwrap_or(f64::NAN),
                tr_dist_particle: tr,
            })
        })
        .collect()
}

pub fn gronwall_fit(rows: &[BetaReport], c_prime: f64, slack: f64) -> GronwallFit {
    let base = |r: &BetaReport| {
        let b0 = rows
            .iter()
            .find(|q| q.n == r.n && q.t == 0.0)
            .map(|q| q.beta)
            .unwrap_or(0.0);
        b0 + c_prime / r.n as f64
    };
    let (mut sty, mut stt) = (0.0, 0.0);
    for r in rows.iter().filter(|r| r.t > 0.0) {
        let b = base(r);
        if b > 0.0 && r.beta > 0.0 {
            sty += r.t * (r.beta / b).ln();
            stt += r.t * r.t;
        }
    }
    let rate = if stt > 0.0 { (sty / stt).max(0.0) } else { 0.0 };
    let max_ratio = rows
        .iter()
        .map(|r| {
            let env = base(r) * (rate * r.t).exp();
            if env > 0.0 {
                r.beta / env
            } else if r.beta <= MONOTONE_SLACK {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    GronwallFit {
        c_prime,
        rate,
        max_ratio,
        slack,
        holds: max_ratio <= 1.0 + slack,
    }
}

pub fn sweep_n(scn: &Scenario, options: &RunOptions) -> Result<SweepRecord> {
    scn.config.validate_sweep()?;
    let run = run_comparison(scn, options)?;
    let scan = initial_data_scan(scn)?;
    let ns: Vec<f64> = scan.iter().map(|p| p.n as f64).collect();
    let bc: Vec<f64> = scan.iter().map(|p| p.beta_c0).collect();
    let summary = SweepSummary {
        config_hash: scn.hash.clone(),
        beta_c0_slope: log_log_slope(&ns, &bc),
        trends: trend_verdicts(&run, &scn.config.time.sweep_times)?,
        gronwall: gronwall_fit(&run.rows, scn.modes.commutator_constant(), scn.config.tolerances.envelope_slack),
        scan,
    };
    Ok(SweepRecord { run, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [2.0, 3.0, 5.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.3)).collect();
        assert!((log_log_slope(&x, &y).unwrap() + 1.3).abs() < 1e-12);
        assert!(log_log_slope(&[1.0], &[1.0]).is_none());
    }

    fn row(n: usize, t: f64, beta: f64) -> BetaReport {
        BetaReport {
            t,
            n,
            lambda: 1.0,
            beta_a: 0.0,
            beta_b: 0.0,
            beta_c: beta,
            beta,
            tr_dist_particle: 0.0,
            tr_dist_photon: 0.0,
            e_m: 0.0,
            e_many_per_n: 0.0,
            gauge_residual: 0.0,
            norm_phi: 1.0,
            norm_psi: 1.0,
            leakage: 0.0,
        }
    }

    #[test]
    fn exponential_growth_is_enveloped() {
        let rows: Vec<_> = [2, 4]
            .iter()
            .flat_map(|&n| (0..5).map(move |i| row(n, i as f64 * 0.25, (1.0 / n as f64) * (0.7 * i as f64 * 0.25).exp())))
            .collect();
        let fit = gronwall_fit(&rows, 0.0, 0.05);
        assert!((fit.rate - 0.7).abs() < 1e-12);
        assert!(fit.holds);
        let zero: Vec<_> = (0..3).map(|i| row(2, i as f64, 0.0)).collect();
        assert!(gronwall_fit(&zero, 0.0, 0.05).holds);
    }
}
