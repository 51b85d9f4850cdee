//! Streams entries of one orbit into an interior ball and a boundary ball,
//! with their marks.
//!
//! ```bash
//! cargo run --example ball_entries -- 0.01
//! ```

use sinai_ppp::billiard::{sample_mu_seeded, Table};
use sinai_ppp::geometry::TorusPoint;
use sinai_ppp::targets::{EntryStream, Target};

fn main() -> sinai_ppp::Result<()> {
    let eps: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.01);
    let table = Table::default_table();
    let targets = [
        Target::interior(0, TorusPoint::new(0.5, 0.0), 1.0)?,
        Target::boundary(1, &table, 1, TorusPoint::new(0.5, 0.25), 1.0)?,
    ];
    let p0 = sample_mu_seeded(&table, 7);

    println!("{:>10} {:>2} {:>8} {:>8} {:>8} {:>10} {:>10}", "t", "j", "p", "u", "phi_in", "duration", "closest");
    let mut stream = EntryStream::new(&table, &targets, eps, p0, 2000.0)?;
    let mut counts = [0usize; 2];
    for e in stream.by_ref() {
        let e = e?;
        counts[e.label] += 1;
        if counts[0] + counts[1] <= 15 {
            println!(
                "{:>10.4} {:>2} {:>8.4} {:>8.4} {:>8.4} {:>10.6} {:>10.6}",
                e.t,
                e.label,
                e.p_angle(),
                e.u_angle(),
                e.phi_in,
                e.duration,
                e.closest
            );
        }
    }
    println!("entries over flow time 2000: interior {}, boundary {}", counts[0], counts[1]);
    println!("tangential crossings discarded: {}", stream.tangential_discards());
    Ok(())
}
