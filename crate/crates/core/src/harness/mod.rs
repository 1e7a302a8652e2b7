//! Experiment orchestration: configuration, quantum versus mean-field runs,
//! N sweeps, the self check, CSV/JSON output and checkpoints.

mod check;
mod checkpoint;
mod config;
mod run;
mod sweep;

pub use check::{random_composite_state, self_check, CheckOutcome, CheckReport, Fault};
pub use checkpoint::{Checkpoint, MAGIC, VERSION};
pub use config::{
    initial_wavefunction, ExperimentConfig, LatticeConfig, ModeAmplitude, PhiConfig, PhiPreset, PotentialConfig,
    PotentialKind, Scenario, TimeConfig, ToleranceConfig,
};
pub use run::{
    checkpoint_path, ms_solver, run_comparison, run_ms, run_qm, run_quantum, write_beta_csv, write_json, write_ms_csv,
    write_qm_csv, MsSample, MsSummary, QmRow, RunOptions, RunRecord, RunStats, MS_CSV_HEADER, QM_CSV_HEADER,
};
pub use sweep::{
    gronwall_fit, initial_data_scan, log_log_slope, sweep_n, trend_verdicts, GronwallFit, ScanPoint, SweepRecord,
    SweepSummary, TrendVerdict, MONOTONE_SLACK,
};
