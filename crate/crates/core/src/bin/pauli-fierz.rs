use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pauli_fierz::harness::{
    self, Checkpoint, ExperimentConfig, Fault, RunOptions, Scenario,
};
use pauli_fierz::{Error, Result};
use serde_json::json;

#[derive(Parser)]
#[command(name = "pauli-fierz", version, about = "Many-body Pauli-Fierz versus Maxwell-Schroedinger experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON configuration; omitted fields take their defaults.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, value_name = "INT")]
    threads: Option<usize>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the property suite at reduced sizes.
    Check {
        #[command(flatten)]
        common: Common,
        /// drop-transverse-projection | unsymmetrized-coupling
        #[arg(long, value_name = "FAULT")]
        inject_fault: Option<Fault>,
    },
    /// Evolve the Maxwell-Schroedinger system alone.
    MsEvolve {
        #[command(flatten)]
        common: Common,
    },
    /// Evolve the many-body state alone for every configured N.
    QmEvolve {
        #[command(flatten)]
        common: Common,
        /// Checkpoint to resume from (repeat for several N).
        #[arg(long, value_name = "PATH")]
        resume: Vec<PathBuf>,
    },
    /// Quantum versus mean-field comparison for every configured N.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "PATH")]
        resume: Vec<PathBuf>,
    },
    /// Comparison plus initial-data scan, trend verdicts and envelope fit.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn setup(common: &Common) -> Result<Option<Scenario>> {
    let cfg = load(common)?;
    if common.print_config {
        println!("{}", cfg.to_json_pretty());
        return Ok(None);
    }
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    std::fs::create_dir_all(&common.out)?;
    Scenario::new(cfg).map(Some)
}

fn options(scn: &Scenario, out: &Path, resume: &[PathBuf]) -> Result<RunOptions> {
    let mut map = BTreeMap::new();
    for p in resume {
        let ck = Checkpoint::read(p)?;
        map.insert(ck.particles, ck);
    }
    Ok(RunOptions {
        checkpoint_dir: (scn.config.checkpoint_every > 0).then(|| out.to_path_buf()),
        resume: map,
    })
}

fn file(out: &Path, scn: &Scenario, suffix: &str) -> PathBuf {
    out.join(format!("{}{suffix}", scn.config.name))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check { common, inject_fault } => {
            let Some(scn) = setup(&common)? else { return Ok(ExitCode::SUCCESS) };
            let report = harness::self_check(&scn.config, inject_fault)?;
            for c in &report.checks {
                println!(
                    "{} {:<24} value {:.3e} threshold {:.1e} ({:.2}s) {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.threshold,
                    c.seconds,
                    c.detail
                );
            }
            harness::write_json(&file(&common.out, &scn, ".check.json"), &report)?;
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(5) })
        }
        Command::MsEvolve { common } => {
            let Some(scn) = setup(&common)? else { return Ok(ExitCode::SUCCESS) };
            let (samples, summary) = harness::run_ms(&scn)?;
            harness::write_ms_csv(&file(&common.out, &scn, ".ms.csv"), &samples)?;
            let doc = json!({"command": "ms-evolve", "config_hash": scn.hash, "config": scn.config, "ms": summary});
            harness::write_json(&file(&common.out, &scn, ".summary.json"), &doc)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::QmEvolve { common, resume } => {
            let Some(scn) = setup(&common)? else { return Ok(ExitCode::SUCCESS) };
            let (rows, runs) = harness::run_qm(&scn, &options(&scn, &common.out, &resume)?)?;
            harness::write_qm_csv(&file(&common.out, &scn, ".qm.csv"), &rows)?;
            let doc = json!({"command": "qm-evolve", "config_hash": scn.hash, "config": scn.config, "runs": runs});
            harness::write_json(&file(&common.out, &scn, ".summary.json"), &doc)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { common, resume } => {
            let Some(scn) = setup(&common)? else { return Ok(ExitCode::SUCCESS) };
            let record = harness::run_comparison(&scn, &options(&scn, &common.out, &resume)?)?;
            harness::write_beta_csv(&file(&common.out, &scn, ".csv"), &record.rows)?;
            let drifts: Vec<_> = record
                .runs
                .iter()
                .map(|r| {
                    json!({
                        "N": r.n,
                        "beta_c_drift": record.drift(r.n, |x| x.beta_c),
                        "E_many_per_N_drift": record.drift(r.n, |x| x.e_many_per_n),
                    })
                })
                .collect();
            let doc = json!({
                "command": "compare",
                "config_hash": record.config_hash,
                "config": scn.config,
                "runs": record.runs,
                "drifts": drifts,
                "ms": record.ms,
                "wall_seconds": record.wall_seconds,
            });
            harness::write_json(&file(&common.out, &scn, ".summary.json"), &doc)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { common } => {
            let Some(scn) = setup(&common)? else { return Ok(ExitCode::SUCCESS) };
            let rec = harness::sweep_n(&scn, &options(&scn, &common.out, &[])?)?;
            harness::write_beta_csv(&file(&common.out, &scn, ".csv"), &rec.run.rows)?;
            let doc = json!({
                "command": "sweep",
                "config_hash": rec.run.config_hash,
                "config": scn.config,
                "runs": rec.run.runs,
                "ms": rec.run.ms,
                "sweep": rec.summary,
                "wall_seconds": rec.run.wall_seconds,
            });
            harness::write_json(&file(&common.out, &scn, ".summary.json"), &doc)?;
            let s = &rec.summary;
            if let Some(slope) = s.beta_c0_slope {
                println!("beta_c(0) slope in N: {slope:.4}");
            }
            for t in &s.trends {
                println!(
                    "t = {}: trace distance non-increasing in N: {}",
                    t.t,
                    if t.non_increasing { "yes" } else { "no" }
                );
            }
            println!(
                "envelope rate {:.4}, max beta/envelope {:.4}: {}",
                s.gronwall.rate,
                s.gronwall.max_ratio,
                if s.gronwall.holds { "holds" } else { "violated" }
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", json!({"error": e.code(), "message": e.to_string()}));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
