//! Time spent inside an interior ball, divided by `eps`, against the chord
//! law `F(x) = 1 - sqrt(4 - (x/r)^2) / 2`.
//!
//! ```bash
//! cargo run --release --example chord_time
//! ```

use sinai_ppp::billiard::{sample_mu_seeded, Table};
use sinai_ppp::geometry::TorusPoint;
use sinai_ppp::laws::chord_time_cdf;
use sinai_ppp::stats::ks_one_sample;
use sinai_ppp::targets::{detect_entries, Target};

fn main() -> sinai_ppp::Result<()> {
    let table = Table::default_table();
    let r = 1.5;
    let eps = 0.01;
    let target = [Target::interior(0, TorusPoint::new(0.5, 0.0), r)?];
    let mut xs = Vec::new();
    for seed in 0..8 {
        let entries = detect_entries(&table, &target, eps, sample_mu_seeded(&table, seed), 3000.0)?;
        xs.extend(entries.iter().map(|e| e.duration / eps));
    }
    let report = ks_one_sample(&xs, |x| chord_time_cdf(x, r), 0.01)?;
    println!("{} entries, KS D = {:.5}, p = {:.4}", report.n, report.statistic, report.p_value);
    println!("{:>6} {:>9} {:>9}", "x", "empirical", "law");
    for i in 1..=6 {
        let x = 2.0 * r * i as f64 / 6.0;
        let f = xs.iter().filter(|&&d| d <= x).count() as f64 / xs.len() as f64;
        println!("{x:>6.3} {f:>9.4} {:>9.4}", chord_time_cdf(x, r));
    }
    Ok(())
}
