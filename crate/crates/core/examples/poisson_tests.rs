//! The goodness-of-fit toolkit on synthetic data: a Poisson process passes,
//! a clustered process does not.
//!
//! ```bash
//! cargo run --release --example poisson_tests
//! ```

use rand::Rng;

use sinai_ppp::laws::{sample_ppp, Uniform};
use sinai_ppp::process::{MarkedPoint, MarkedPointSet};
use sinai_ppp::rng::synthetic_rng;
use sinai_ppp::stats::{exp_interarrival_orbits, poisson_dispersion, window_counts, window_independence, TestReport};

fn show(label: &str, r: &TestReport) {
    println!("  {label:<22} stat {:>10.4}  p {:.4}  {}", r.statistic, r.p_value, if r.passed { "pass" } else { "reject" });
}

fn run(name: &str, orbits: &[MarkedPointSet<f64>], horizon: f64) -> sinai_ppp::Result<()> {
    println!("{name}");
    let times: Vec<Vec<f64>> = orbits.iter().map(|o| o.times()).collect();
    show("exponential gaps", &exp_interarrival_orbits(&times, 0.01)?);
    let all = |_: &f64| true;
    let counts: Vec<u64> = window_counts(orbits, horizon, 5.0, &[&all]).into_iter().flatten().flatten().collect();
    show("dispersion", &poisson_dispersion(&counts, 0.01)?);
    let low = |m: &f64| *m < 0.5;
    let high = |m: &f64| *m >= 0.5;
    show("window independence", &window_independence(orbits, horizon, 5.0, &[&low, &high], 0.01)?);
    Ok(())
}

fn main() -> sinai_ppp::Result<()> {
    let horizon = 500.0;
    let mut rng = synthetic_rng(3, 0);
    let poisson: Vec<_> = (0..8)
        .map(|_| sample_ppp(1.0, &Uniform::new(0.0, 1.0), horizon, &mut rng))
        .collect::<sinai_ppp::Result<_>>()?;
    run("Poisson process", &poisson, horizon)?;

    // each point of a rate-1/2 process spawns a second one shortly after
    let clustered: Vec<_> = (0..8)
        .map(|_| {
            let base = sample_ppp(0.5, &Uniform::new(0.0, 1.0), horizon, &mut rng)?;
            let mut pts = base.points().to_vec();
            for p in base.points() {
                pts.push(MarkedPoint { t: p.t + 0.1 * rng.random::<f64>(), mark: rng.random() });
            }
            Ok(MarkedPointSet::from_points(pts))
        })
        .collect::<sinai_ppp::Result<_>>()?;
    run("clustered process", &clustered, horizon)?;
    Ok(())
}
