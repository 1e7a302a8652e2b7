//! Maxwell-Schroedinger evolution of the default scenario and the halving
//! test for its time step.
//!
//! ```bash
//! cargo run --release --example maxwell_schrodinger
//! ```

use pauli_fierz::harness::{run_ms, ExperimentConfig, Scenario};
use pauli_fierz::Result;

fn main() -> Result<()> {
    let scn = Scenario::new(ExperimentConfig::default())?;
    let (samples, summary) = run_ms(&scn)?;
    for s in &samples {
        println!(
            "t = {:.2} E_M = {:.10} kinetic {:.6} interaction {:.6} field {:.6} gauge {:.1e}",
            s.state.time, s.energy.total, s.energy.kinetic, s.energy.interaction, s.energy.field, s.gauge_residual
        );
    }
    println!(
        "{} steps, relative energy drift {:.1e}, norm drift {:.1e}",
        summary.steps, summary.energy_relative_drift, summary.norm_drift
    );

    let mut finals = Vec::new();
    for dt in [0.02, 0.01, 0.005] {
        let mut cfg = ExperimentConfig::default();
        cfg.time.ms_dt = dt;
        cfg.time.final_time = 0.5;
        cfg.time.sample_interval = 0.5;
        cfg.time.sweep_times = vec![0.5];
        let (samples, _) = run_ms(&Scenario::new(cfg)?)?;
        finals.push(samples.last().expect("final sample").state.phi.clone());
    }
    let diff = |a: &[_], b: &[_]| -> f64 {
        a.iter().zip(b).map(|(x, y): (&pauli_fierz::C64, &pauli_fierz::C64)| (x - y).norm_sqr()).sum::<f64>().sqrt()
    };
    let e1 = diff(&finals[0], &finals[1]);
    let e2 = diff(&finals[1], &finals[2]);
    println!("successive differences {e1:.3e} {e2:.3e}, ratio {:.2} (4 for second order)", e1 / e2);
    Ok(())
}
