//! Follows one orbit of the default Sinai table and prints its first
//! collisions, then checks the mean free path against `pi |Q| / |dQ|`.
//!
//! ```bash
//! cargo run --example billiard_orbit -- 42
//! ```

use std::f64::consts::PI;

use sinai_ppp::billiard::{horizon_certificate, sample_mu_seeded, BilliardFlow, Table, DEFAULT_PROBE_LEN, DEFAULT_SLOPE_BOUND};

fn main() -> sinai_ppp::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let table = Table::default_table();
    let cert = horizon_certificate(&table, DEFAULT_SLOPE_BOUND, DEFAULT_PROBE_LEN)?;
    println!(
        "area {:.6}  boundary {:.6}  free path bound {:.4}  ({} directions probed)",
        table.area_q(),
        table.boundary_length(),
        cert.free_path_bound,
        cert.directions_checked
    );

    let start = sample_mu_seeded(&table, seed);
    println!("start q = ({:.4}, {:.4})  angle {:.4}", start.q.x(), start.q.y(), start.v.angle());
    let mut flow = BilliardFlow::new(&table, start);
    println!("{:>4} {:>9} {:>4} {:>9} {:>9} {:>8}", "k", "t", "obs", "x", "y", "phi");
    for k in 0..12 {
        let (_, c) = flow.step()?;
        println!("{k:>4} {:>9.5} {:>4} {:>9.5} {:>9.5} {:>8.4}", c.t, c.obstacle_id, c.q.x(), c.q.y(), c.phi);
    }

    let n = 100_000;
    for _ in 0..n {
        flow.step()?;
    }
    let mean = flow.time() / flow.collisions() as f64;
    println!(
        "mean free path over {} collisions: {mean:.5} (closed form {:.5})",
        flow.collisions(),
        PI * table.area_q() / table.boundary_length()
    );
    Ok(())
}
