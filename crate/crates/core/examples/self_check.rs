//! The property suite, clean and with each injected fault.
//!
//! ```bash
//! cargo run --release --example self_check
//! ```

use pauli_fierz::harness::{self_check, ExperimentConfig, Fault};
use pauli_fierz::Result;

fn main() -> Result<()> {
    let cfg = ExperimentConfig::default();
    for fault in [None, Some(Fault::DropTransverseProjection), Some(Fault::UnsymmetrizedCoupling)] {
        let report = self_check(&cfg, fault)?;
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        println!(
            "fault {fault:?}: {} of {} checks pass, failing {failed:?}",
            report.checks.len() - failed.len(),
            report.checks.len()
        );
    }
    Ok(())
}
