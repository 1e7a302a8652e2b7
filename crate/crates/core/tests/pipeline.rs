//! End-to-end runs on small configurations: decoupled limit, determinism,
//! checkpoint resume and the self check.

use std::collections::BTreeMap;

use pauli_fierz::functionals::CSV_HEADER;
use pauli_fierz::harness::{
    checkpoint_path, run_comparison, run_ms, run_qm, self_check, write_beta_csv, write_ms_csv, write_qm_csv,
    Checkpoint, ExperimentConfig, Fault, PhiPreset, PotentialKind, RunOptions, Scenario, MS_CSV_HEADER,
    QM_CSV_HEADER,
};

fn small() -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        particle_numbers: vec![2, 3],
        max_photons: 4,
        ..ExperimentConfig::default()
    };
    cfg.time.final_time = 0.5;
    cfg.time.sample_interval = 0.125;
    cfg.time.sweep_times = vec![0.25, 0.5];
    cfg
}

fn decoupled(preset: PhiPreset) -> ExperimentConfig {
    let mut cfg = small();
    cfg.cutoff = 0.0;
    cfg.alpha0.clear();
    cfg.potential.kind = PotentialKind::Zero;
    cfg.phi0.preset = preset;
    cfg
}

fn first_line(path: &std::path::Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn decoupled_plane_wave_has_vanishing_beta() {
    let rec = run_comparison(&Scenario::new(decoupled(PhiPreset::PlaneWave)).unwrap(), &RunOptions::default()).unwrap();
    assert_eq!(rec.rows.len(), 2 * 5);
    for r in &rec.rows {
        assert!(r.beta < 1e-12, "{r:?}");
        assert!(r.tr_dist_particle < 1e-6, "{r:?}");
        assert_eq!(r.leakage, 0.0);
    }
}

#[test]
fn decoupled_packet_stays_a_product_state() {
    // without interaction the quantum state is phi_t^{(x)N}; only the energy variance remains
    let rec =
        run_comparison(&Scenario::new(decoupled(PhiPreset::GaussianPacket)).unwrap(), &RunOptions::default()).unwrap();
    for r in &rec.rows {
        assert!(r.beta_a < 1e-12 && r.beta_b == 0.0, "{r:?}");
        assert!(r.tr_dist_particle < 1e-6, "{r:?}");
    }
    for run in &rec.runs {
        assert!(rec.drift(run.n, |x| x.beta_c) < 1e-10);
    }
}

#[test]
fn csv_headers_are_exact_and_rows_validate() {
    let dir = tempfile::tempdir().unwrap();
    let scn = Scenario::new(small()).unwrap();
    let rec = run_comparison(&scn, &RunOptions::default()).unwrap();
    for r in &rec.rows {
        r.validate().unwrap();
    }
    let beta = dir.path().join("beta.csv");
    write_beta_csv(&beta, &rec.rows).unwrap();
    assert_eq!(first_line(&beta), CSV_HEADER);
    assert_eq!(
        CSV_HEADER,
        "t,N,Lambda,beta_a,beta_b,beta_c,beta,tr_dist_particle,tr_dist_photon,E_M,E_many_per_N,gauge_residual,norm_phi,norm_Psi,leakage"
    );
    assert_eq!(std::fs::read_to_string(&beta).unwrap().lines().count(), 1 + rec.rows.len());

    let (samples, _) = run_ms(&scn).unwrap();
    let ms = dir.path().join("ms.csv");
    write_ms_csv(&ms, &samples).unwrap();
    assert_eq!(first_line(&ms), MS_CSV_HEADER);

    let (rows, _) = run_qm(&scn, &RunOptions::default()).unwrap();
    let qm = dir.path().join("qm.csv");
    write_qm_csv(&qm, &rows).unwrap();
    assert_eq!(first_line(&qm), QM_CSV_HEADER);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let rec = run_comparison(&Scenario::new(small()).unwrap(), &RunOptions::default()).unwrap();
        let path = dir.path().join(format!("run{i}.csv"));
        write_beta_csv(&path, &rec.rows).unwrap();
        outputs.push((std::fs::read(&path).unwrap(), rec.config_hash));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn resumed_run_matches_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small();
    cfg.checkpoint_every = 2;
    let scn = Scenario::new(cfg).unwrap();
    let full = run_comparison(&scn, &RunOptions::default()).unwrap();

    // stop after the checkpoint at sample 2 by resuming from it
    let opts = RunOptions {
        checkpoint_dir: Some(dir.path().to_path_buf()),
        resume: BTreeMap::new(),
    };
    let mut saved = BTreeMap::new();
    for &n in &scn.config.particle_numbers {
        let path = checkpoint_path(dir.path(), &scn.config.name, n);
        pauli_fierz::harness::run_quantum(&scn, n, &opts, |i, _, _| {
            if i == 3 {
                saved.insert(n, Checkpoint::read(&path)?);
            }
            Ok(())
        })
        .unwrap();
    }
    assert!(saved.values().all(|c| c.sample_index == 2));

    let resumed = run_comparison(&scn, &RunOptions { checkpoint_dir: None, resume: saved }).unwrap();
    let tail: Vec<_> = full.rows.iter().filter(|r| r.t >= 0.25).cloned().collect();
    assert_eq!(resumed.rows, tail);
    for run in &resumed.runs {
        assert_eq!(run.resumed_from_sample, Some(2));
    }
}

#[test]
fn checkpoint_from_other_config_is_rejected() {
    let scn = Scenario::new(small()).unwrap();
    let ck = Checkpoint {
        config_hash: [7; 32],
        particles: 2,
        sample_index: 1,
        time: 0.125,
        amplitudes: vec![Default::default(); scn.space(2).unwrap().dim()],
    };
    let opts = RunOptions {
        checkpoint_dir: None,
        resume: BTreeMap::from([(2, ck)]),
    };
    assert!(run_comparison(&scn, &opts).is_err());
}

#[test]
fn self_check_passes_and_detects_each_fault() {
    let cfg = ExperimentConfig::default();
    let clean = self_check(&cfg, None).unwrap();
    assert!(clean.passed(), "{:?}", clean.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
    for (fault, check) in [
        (Fault::DropTransverseProjection, "gauge_transversality"),
        (Fault::UnsymmetrizedCoupling, "hamiltonian_hermitian"),
    ] {
        let report = self_check(&cfg, Some(fault)).unwrap();
        assert!(!report.passed());
        assert!(!report.get(check).unwrap().passed, "{fault:?} not detected by {check}");
    }
}
