//! Runs one experiment through the harness with a reduced configuration and
//! writes its CSV and JSON outputs.
//!
//! ```bash
//! cargo run --release --example run_experiment -- e2 /tmp/sinai-out
//! ```

use sinai_ppp::harness::{self, ExperimentConfig, ExperimentId};

fn main() -> sinai_ppp::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let mut args = std::env::args().skip(1);
    let id: ExperimentId = args.next().as_deref().unwrap_or("e2").parse()?;
    let out = args.next().unwrap_or_else(|| "out".into());
    let config = ExperimentConfig {
        experiment: Some(id),
        eps_schedule: vec![0.02, 0.01],
        n_trajectories: 16,
        t_max: 1500.0,
        n_trials: 1000,
        output_dir: out.into(),
        ..ExperimentConfig::default()
    };
    let (result, files) = harness::run(&config, id)?;
    for r in &result.reports {
        println!("{:<5} {:<48} p = {:.4}", if r.passed { "pass" } else { "fail" }, r.test_name, r.p_value);
    }
    for c in &result.checks {
        println!("{:<5} {:<48} {:.5} vs {:.5}", if c.passed { "pass" } else { "fail" }, c.name, c.value, c.expected);
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
