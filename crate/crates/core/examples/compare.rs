//! Quantum versus mean-field comparison for a few particle numbers, written
//! as the beta CSV.
//!
//! ```bash
//! cargo run --release --example compare -- /tmp/compare.csv
//! ```

use std::path::PathBuf;

use pauli_fierz::harness::{run_comparison, write_beta_csv, ExperimentConfig, RunOptions, Scenario};
use pauli_fierz::Result;

fn main() -> Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("compare.csv"));
    let cfg = ExperimentConfig {
        particle_numbers: vec![2, 3, 4],
        ..ExperimentConfig::default()
    };
    let record = run_comparison(&Scenario::new(cfg)?, &RunOptions::default())?;
    for r in &record.rows {
        println!(
            "N = {} t = {:.2}: beta_a {:.3e} beta_b {:.3e} beta_c {:.3e} tr_dist_particle {:.3e} leakage {:.1e}",
            r.n, r.t, r.beta_a, r.beta_b, r.beta_c, r.tr_dist_particle, r.leakage
        );
    }
    for run in &record.runs {
        println!("N = {}: drift of beta_c {:.1e}", run.n, record.drift(run.n, |x| x.beta_c));
    }
    write_beta_csv(&out, &record.rows)?;
    println!("wrote {} (config {})", out.display(), &record.config_hash[..12]);
    Ok(())
}
