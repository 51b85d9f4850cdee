//! Lower records of a marked Poisson process: the l-th point is a record
//! with probability 1/l, and the number of records by time t follows the
//! limit law.
//!
//! ```bash
//! cargo run --release --example records
//! ```

use sinai_ppp::laws::{record_count_pmf, sample_ppp, Uniform};
use sinai_ppp::process::{records_extract, RecordDirection};
use sinai_ppp::rng::synthetic_rng;

fn main() -> sinai_ppp::Result<()> {
    let replicas = 5000;
    let t = 5.0;
    let k_max = 8;
    let mut hits = [0usize; 10];
    let mut reached = [0usize; 10];
    let mut by_count = vec![0usize; k_max + 1];
    for i in 0..replicas {
        let pp = sample_ppp(1.0, &Uniform::new(0.0, 1.0), 30.0, &mut synthetic_rng(5, i))?;
        let mut best = f64::INFINITY;
        for (l, p) in pp.points().iter().take(10).enumerate() {
            reached[l] += 1;
            if p.mark < best {
                best = p.mark;
                hits[l] += 1;
            }
        }
        let k = records_extract(&pp, RecordDirection::Min).iter().filter(|&&s| s <= t).count();
        by_count[k.min(k_max)] += 1;
    }
    println!("{:>3} {:>8} {:>8}", "l", "P(rec)", "1/l");
    for l in 0..10 {
        println!("{:>3} {:>8.4} {:>8.4}", l + 1, hits[l] as f64 / reached[l] as f64, 1.0 / (l + 1) as f64);
    }
    let law = record_count_pmf(t, k_max);
    println!("records by t = {t}:");
    for (k, (&n, p)) in by_count.iter().zip(&law).enumerate() {
        println!("{k:>3}{} {:>8.4} {:>8.4}", if k == k_max { "+" } else { " " }, n as f64 / replicas as f64, p);
    }
    Ok(())
}
