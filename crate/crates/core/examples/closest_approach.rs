//! Closest approach of each crossing to the ball center, in units of the
//! ball radius: uniform on [0, 1], and equal to |sin phi_in|.
//!
//! ```bash
//! cargo run --release --example closest_approach
//! ```

use sinai_ppp::billiard::{sample_mu_seeded, Table};
use sinai_ppp::geometry::TorusPoint;
use sinai_ppp::stats::{chi2_uniform, ks_one_sample};
use sinai_ppp::targets::{detect_entries, Target};

fn main() -> sinai_ppp::Result<()> {
    let table = Table::default_table();
    let eps = 0.01;
    let target = [Target::interior(0, TorusPoint::new(0.5, 0.0), 1.0)?];
    let mut ys = Vec::new();
    let mut worst: f64 = 0.0;
    for seed in 0..8 {
        for e in detect_entries(&table, &target, eps, sample_mu_seeded(&table, seed), 3000.0)? {
            let y = e.closest / eps;
            worst = worst.max((y - e.phi_in.sin().abs()).abs());
            ys.push(y);
        }
    }
    let ks = ks_one_sample(&ys, |y| y.clamp(0.0, 1.0), 0.01)?;
    let chi = chi2_uniform(&ys, 0.0, 1.0, 10, 0.01)?;
    println!("{} entries", ys.len());
    println!("KS vs U[0,1]:   D = {:.5}  p = {:.4}", ks.statistic, ks.p_value);
    println!("chi2, 10 bins:  X = {:.3}  p = {:.4}", chi.statistic, chi.p_value);
    println!("max |closest/eps - |sin phi_in||: {worst:.2e}");
    Ok(())
}
