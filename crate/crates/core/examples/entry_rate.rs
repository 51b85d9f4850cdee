//! Entry rate per unit flow time against the crossing-flux value
//! `arc / (pi |Q|)` for a few radii.
//!
//! ```bash
//! cargo run --release --example entry_rate
//! ```

use sinai_ppp::billiard::Table;
use sinai_ppp::geometry::TorusPoint;
use sinai_ppp::targets::{crossing_flux_rate, entry_rate, Target};

fn main() -> sinai_ppp::Result<()> {
    let table = Table::default_table();
    let targets = [
        Target::interior(0, TorusPoint::new(0.5, 0.0), 1.0)?,
        Target::boundary(1, &table, 1, TorusPoint::new(0.5, 0.25), 1.0)?,
    ];
    println!("{:>6} {:>6} {:>10} {:>9} {:>10} {:>8}", "eps", "target", "rate", "se", "flux", "rate/eps");
    for eps in [0.02, 0.01, 0.005] {
        for t in &targets {
            let est = entry_rate(&table, t, eps, 16, 2000.0, 99)?;
            println!(
                "{eps:>6} {:>6} {:>10.6} {:>9.6} {:>10.6} {:>8.4}",
                t.label(),
                est.rate,
                est.std_err,
                crossing_flux_rate(&table, t, eps),
                est.rate / eps
            );
        }
    }
    Ok(())
}
