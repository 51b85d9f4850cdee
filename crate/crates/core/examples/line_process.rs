//! Maps entries into an interior ball to chords of the unit disk and
//! compares per-window line counts with a simulated Poisson line process.
//!
//! ```bash
//! cargo run --release --example line_process
//! ```

use std::f64::consts::PI;

use sinai_ppp::billiard::{sample_mu_seeded, Table};
use sinai_ppp::geometry::TorusPoint;
use sinai_ppp::laws::sample_line_process;
use sinai_ppp::process::line_map;
use sinai_ppp::rng::oracle_rng;
use sinai_ppp::stats::{chi2_independence, ks_one_sample};
use sinai_ppp::targets::{detect_entries, Target};

fn main() -> sinai_ppp::Result<()> {
    let table = Table::default_table();
    let eps = 0.01;
    let t_max = 3000.0;
    let window = 25.0;
    let target = [Target::interior(0, TorusPoint::new(0.5, 0.0), 1.0)?];

    let mut lines = Vec::new();
    let mut counts = Vec::new();
    for seed in 0..8 {
        let entries = detect_entries(&table, &target, eps, sample_mu_seeded(&table, seed), t_max)?;
        let k = (t_max / window) as usize;
        let mut c = vec![0usize; k];
        for e in &entries {
            c[((e.t / window) as usize).min(k - 1)] += 1;
        }
        counts.extend(c);
        lines.extend(entries.iter().map(line_map));
    }

    let rs: Vec<f64> = lines.iter().map(|l| l.r).collect();
    let thetas: Vec<f64> = lines.iter().map(|l| l.theta).collect();
    let ks_r = ks_one_sample(&rs, |x| ((x + 1.0) / 2.0).clamp(0.0, 1.0), 0.01)?;
    let ks_t = ks_one_sample(&thetas, |x| (x / PI).clamp(0.0, 1.0), 0.01)?;
    let mut grid = vec![vec![0u64; 3]; 3];
    for l in &lines {
        grid[(((l.r + 1.0) * 1.5) as usize).min(2)][((l.theta / PI * 3.0) as usize).min(2)] += 1;
    }
    let ind = chi2_independence(&grid, 0.01)?;
    println!("{} chords", lines.len());
    println!("r ~ U(-1,1):      D = {:.5} p = {:.4}", ks_r.statistic, ks_r.p_value);
    println!("theta ~ U(0,pi):  D = {:.5} p = {:.4}", ks_t.statistic, ks_t.p_value);
    println!("r, theta indep.:  X = {:.3} p = {:.4}", ind.statistic, ind.p_value);

    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
    let sim = sample_line_process(mean / 2.0, 5000, &mut oracle_rng(3, 0))?;
    let sm = sim.iter().map(Vec::len).sum::<usize>() as f64 / sim.len() as f64;
    let sv = sim.iter().map(|s| (s.len() as f64 - sm).powi(2)).sum::<f64>() / (sim.len() - 1) as f64;
    println!("lines per window: mean {mean:.3} var {var:.3}; simulated line process mean {sm:.3} var {sv:.3}");
    Ok(())
}
