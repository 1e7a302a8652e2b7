//! Periodic checkpoints and a resumed quantum run that reproduces the
//! uninterrupted one bit for bit.
//!
//! ```bash
//! cargo run --release --example checkpoint_resume
//! ```

use std::collections::BTreeMap;

use pauli_fierz::harness::{checkpoint_path, run_quantum, Checkpoint, ExperimentConfig, RunOptions, Scenario};
use pauli_fierz::{Result, C64};

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join(format!("pauli-fierz-ckpt-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let cfg = ExperimentConfig {
        name: "resume".into(),
        particle_numbers: vec![3],
        checkpoint_every: 2,
        ..ExperimentConfig::default()
    };
    let scn = Scenario::new(cfg)?;
    let n = 3;

    let path = checkpoint_path(&dir, &scn.config.name, n);
    let saved = dir.join("sample2.ckpt");
    let mut full: Vec<Vec<C64>> = Vec::new();
    let opts = RunOptions { checkpoint_dir: Some(dir.clone()), resume: BTreeMap::new() };
    run_quantum(&scn, n, &opts, |i, st, _| {
        // the checkpoint of sample 2 is on disk until sample 4 overwrites it
        if i == 3 {
            std::fs::copy(&path, &saved)?;
        }
        full.push(st.amplitudes.clone());
        Ok(())
    })?;

    let ck = Checkpoint::read(&saved)?;
    println!("{}: sample {} t = {} dim {} ({} bytes)", saved.display(), ck.sample_index, ck.time, ck.amplitudes.len(), ck.to_bytes().len());

    let start = ck.sample_index;
    let opts = RunOptions { checkpoint_dir: None, resume: BTreeMap::from([(n, ck)]) };
    let mut resumed = Vec::new();
    run_quantum(&scn, n, &opts, |i, st, _| {
        resumed.push((i, st.amplitudes.clone()));
        Ok(())
    })?;
    let identical = resumed.iter().all(|(i, a)| &full[*i] == a);
    println!("resumed at sample {start}: {} samples, bitwise identical to the full run: {identical}", resumed.len());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
