//! Sweep in N: initial-data scan, trace-distance trends and the envelope fit.
//!
//! ```bash
//! cargo run --release --example sweep
//! ```

use pauli_fierz::harness::{sweep_n, ExperimentConfig, RunOptions, Scenario};
use pauli_fierz::Result;

fn main() -> Result<()> {
    let cfg = ExperimentConfig {
        particle_numbers: vec![2, 3, 4],
        scan_particle_numbers: (2..=6).collect(),
        ..ExperimentConfig::default()
    };
    let rec = sweep_n(&Scenario::new(cfg)?, &RunOptions::default())?;
    let s = &rec.summary;
    for p in &s.scan {
        println!("N = {}: beta^c(0) = {:.4}", p.n, p.beta_c0);
    }
    if let Some(slope) = s.beta_c0_slope {
        println!("log-log slope of beta^c(0) in N: {slope:.3}");
    }
    for t in &s.trends {
        println!("t = {}: tr_dist_particle {:?} non-increasing {}", t.t, t.tr_dist_particle, t.non_increasing);
    }
    let g = &s.gronwall;
    println!("envelope c' = {:.4} C = {:.4} max ratio {:.4} holds {}", g.c_prime, g.rate, g.max_ratio, g.holds);
    Ok(())
}
