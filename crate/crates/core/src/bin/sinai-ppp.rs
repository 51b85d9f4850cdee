use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{error, info};

use sinai_ppp::harness::{self, ExperimentConfig, ExperimentId};

#[derive(Parser)]
#[command(name = "sinai-ppp", version, about = "Rare-event point processes of a Sinai billiard")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Poissonity of entry times
    E1(Common),
    /// Entry mark law
    E2(Common),
    /// Committor and hazard counts
    E3(Common),
    /// Local time and entry rates
    E4(Common),
    /// Closest approach
    E5(Common),
    /// Line process
    E6(Common),
    /// Record process (synthetic)
    E7(Common),
    /// Hazard local time
    E8(Common),
    /// Check a config without simulating
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config; missing fields take defaults
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads, 0 for all cores
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated, strictly decreasing
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
}

impl Common {
    fn config(&self) -> sinai_ppp::Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.seed {
            c.master_seed = s;
        }
        if let Some(w) = self.workers {
            c.worker_count = w;
        }
        if let Some(o) = &self.out {
            c.output_dir = o.clone();
        }
        if let Some(e) = &self.eps {
            c.eps_schedule = e.clone();
        }
        Ok(c)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (id, common) = match &cli.command {
        Command::E1(c) => (Some(ExperimentId::E1), c),
        Command::E2(c) => (Some(ExperimentId::E2), c),
        Command::E3(c) => (Some(ExperimentId::E3), c),
        Command::E4(c) => (Some(ExperimentId::E4), c),
        Command::E5(c) => (Some(ExperimentId::E5), c),
        Command::E6(c) => (Some(ExperimentId::E6), c),
        Command::E7(c) => (Some(ExperimentId::E7), c),
        Command::E8(c) => (Some(ExperimentId::E8), c),
        Command::Validate(c) => (None, c),
    };
    let config = match common.config() {
        Ok(c) => c,
        Err(e) => {
            error!("{e}");
            return ExitCode::from(2);
        }
    };
    let Some(id) = id else {
        let d = harness::validate(&config);
        println!("{}", serde_json::to_string_pretty(&d).expect("diagnostics serialize"));
        return if d.ok { ExitCode::SUCCESS } else { ExitCode::FAILURE };
    };
    match harness::run(&config, id) {
        Ok((out, files)) => {
            for r in &out.reports {
                println!(
                    "{} {} stat={:.5} p={:.4} n={}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.test_name,
                    r.statistic,
                    r.p_value,
                    r.n
                );
            }
            for c in &out.checks {
                println!(
                    "{} {} value={:.6} expected={:.6} tol={:.6}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.expected,
                    c.tolerance
                );
            }
            for e in &out.errors {
                println!("ERROR {e}");
            }
            for f in &files {
                info!("wrote {}", f.display());
            }
            if out.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            error!("{e}");
            ExitCode::from(2)
        }
    }
}
