//! Hitting trials between two balls: how often the boundary ball is missed
//! before the first interior entry, and the law of the number of boundary
//! entries before it.
//!
//! ```bash
//! cargo run --release --example committor -- 0.005 2000
//! ```

use sinai_ppp::harness::{simulate_trials, ExperimentConfig};
use sinai_ppp::laws::geometric_pmf;
use sinai_ppp::process::{hazard_count, ScaledClock};
use sinai_ppp::targets::total_weight;

fn main() -> sinai_ppp::Result<()> {
    let mut args = std::env::args().skip(1);
    let eps: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.005);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(2000);
    let v = ExperimentConfig {
        eps_schedule: vec![eps],
        ..ExperimentConfig::default()
    }
    .validate()?;

    let h = v.h_eps(eps);
    let trials = simulate_trials(&v, eps, n, 60.0 / h)?;
    let clock = ScaledClock::new(h, 1.0 / eps)?;
    let counts: Vec<_> = trials
        .processes(&clock, |e, _| e.label)
        .iter()
        .map(hazard_count)
        .filter(|c| !c.truncated)
        .map(|c| c.value)
        .collect();

    // weight of target j is d_j r_j
    let w1 = v.targets[1].d() as f64 * v.targets[1].shape_radius();
    let p = w1 / total_weight(&v.targets);
    println!("{} complete trials out of {n}", counts.len());
    println!("{:>3} {:>9} {:>9}", "k", "observed", "geometric");
    for k in 0..6u64 {
        let f = counts.iter().filter(|&&c| c == k).count() as f64 / counts.len() as f64;
        println!("{k:>3} {f:>9.4} {:>9.4}", geometric_pmf(k, p));
    }
    Ok(())
}
