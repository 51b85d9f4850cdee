//! Goodness-of-fit and independence tests returning [`TestReport`]s.
//!
//! P-values are asymptotic, except [`exp_interarrival`] whose rate is fitted
//! and whose null law is therefore simulated once per sample size.

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};
use std::sync::{Arc, Mutex, OnceLock};

use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_lr, gamma_ur};

use crate::error::{Error, Result};
use crate::process::MarkedPointSet;
use crate::rng::stream_rng;

/// Replicas of the simulated null used by [`exp_interarrival`].
pub const EXP_NULL_REPLICAS: usize = 2000;
const EXP_NULL_SEED: u64 = 0x5eed_e4b0_11ce_0001;
const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub test_name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    pub passed: bool,
    pub alpha: f64,
}

impl TestReport {
    pub fn new(test_name: impl Into<String>, statistic: f64, p_value: f64, n: usize, alpha: f64) -> Self {
        let p_value = if p_value.is_nan() { 0.0 } else { p_value.clamp(0.0, 1.0) };
        Self {
            test_name: test_name.into(),
            statistic,
            p_value,
            n,
            passed: p_value > alpha,
            alpha,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.test_name = name.into();
        self
    }
}

/// Survival function of the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        let l2 = lambda * lambda;
        let s: f64 = (1..=20)
            .map(|k| {
                let a = (2 * k - 1) as f64;
                (-a * a * PI * PI / (8.0 * l2)).exp()
            })
            .sum();
        (1.0 - (2.0 * PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let k = k as f64;
                let sign = if k as u64 % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * k * k * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

fn ks_pvalue(d: f64, n_eff: f64) -> f64 {
    let s = n_eff.sqrt();
    kolmogorov_sf((s + 0.12 + 0.11 / s) * d)
}

/// `sup |F_n - F|` for a sample (sorted internally).
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64, alpha: f64) -> Result<TestReport> {
    need(10, sample.len())?;
    let d = ks_statistic(sample, cdf);
    Ok(TestReport::new("ks_one_sample", d, ks_pvalue(d, sample.len() as f64), sample.len(), alpha))
}

pub fn two_sample_ks(a: &[f64], b: &[f64], alpha: f64) -> Result<TestReport> {
    need(30, a.len().min(b.len()))?;
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let v = xa[i].min(xb[j]);
        while i < na && xa[i] <= v {
            i += 1;
        }
        while j < nb && xb[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let n_eff = (na * nb) as f64 / (na + nb) as f64;
    Ok(TestReport::new("two_sample_ks", d, ks_pvalue(d, n_eff), na + nb, alpha))
}

fn chi2_sf(stat: f64, df: f64) -> f64 {
    if stat <= 0.0 {
        1.0
    } else {
        gamma_ur(df / 2.0, stat / 2.0)
    }
}

fn chi2_cdf(stat: f64, df: f64) -> f64 {
    if stat <= 0.0 {
        0.0
    } else {
        gamma_lr(df / 2.0, stat / 2.0)
    }
}

/// Groups consecutive cells so that every group reaches `weight(group) >= min`;
/// a short remainder joins the last group. Returns the group boundaries.
fn merge_groups(weights: &[f64], min: f64) -> Vec<std::ops::Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if acc >= min {
            groups.push(start..i + 1);
            start = i + 1;
            acc = 0.0;
        }
    }
    if start < weights.len() {
        match groups.last_mut() {
            Some(last) => last.end = weights.len(),
            None => groups.push(start..weights.len()),
        }
    }
    groups
}

/// Counts of `values` in `0..k_max`, with every value `>= k_max` folded into
/// a final cell.
pub fn fold_tail(values: &[u64], k_max: usize) -> Vec<u64> {
    let mut counts = vec![0u64; k_max + 1];
    for &v in values {
        counts[(v as usize).min(k_max)] += 1;
    }
    counts
}

/// Pearson goodness of fit with adjacent cells merged to expected counts of
/// at least five.
pub fn chi2_gof(counts: &[u64], probs: &[f64], alpha: f64) -> Result<TestReport> {
    chi2_gof_ddof(counts, probs, 0, alpha)
}

/// As [`chi2_gof`], removing `ddof` degrees of freedom for fitted parameters.
pub fn chi2_gof_ddof(counts: &[u64], probs: &[f64], ddof: usize, alpha: f64) -> Result<TestReport> {
    if counts.len() != probs.len() {
        return Err(Error::InvalidParameter("counts and probabilities differ in length".into()));
    }
    let total_p: f64 = probs.iter().sum();
    if (total_p - 1.0).abs() > 1e-9 || probs.iter().any(|&p| p < 0.0) {
        return Err(Error::InvalidParameter(format!("probabilities sum to {total_p}")));
    }
    let n: u64 = counts.iter().sum();
    let expected: Vec<f64> = probs.iter().map(|p| p * n as f64).collect();
    let groups = merge_groups(&expected, MIN_EXPECTED);
    if groups.len() < ddof + 2 || groups.iter().any(|g| expected[g.clone()].iter().sum::<f64>() < MIN_EXPECTED) {
        return Err(Error::DegenerateCells(format!(
            "{} cells with expected count >= {MIN_EXPECTED} from n = {n}",
            groups.len()
        )));
    }
    let stat: f64 = groups
        .iter()
        .map(|g| {
            let o: u64 = counts[g.clone()].iter().sum();
            let e: f64 = expected[g.clone()].iter().sum();
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let df = (groups.len() - 1 - ddof) as f64;
    Ok(TestReport::new("chi2_gof", stat, chi2_sf(stat, df), n as usize, alpha))
}

/// Uniformity of `values` on `[lo, hi)` over `bins` equal cells.
pub fn chi2_uniform(values: &[f64], lo: f64, hi: f64, bins: usize, alpha: f64) -> Result<TestReport> {
    let mut counts = vec![0u64; bins];
    for &v in values {
        let k = (((v - lo) / (hi - lo)) * bins as f64).floor();
        counts[(k.max(0.0) as usize).min(bins - 1)] += 1;
    }
    chi2_gof(&counts, &vec![1.0 / bins as f64; bins], alpha).map(|r| r.named("chi2_uniform"))
}

/// Pearson test of independence on a contingency table.
pub fn chi2_independence(table: &[Vec<u64>], alpha: f64) -> Result<TestReport> {
    let rows: Vec<&Vec<u64>> = table.iter().filter(|r| r.iter().sum::<u64>() > 0).collect();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::InvalidParameter("ragged contingency table".into()));
    }
    let cols: Vec<usize> = (0..ncols).filter(|&c| rows.iter().map(|r| r[c]).sum::<u64>() > 0).collect();
    if rows.len() < 2 || cols.len() < 2 {
        return Err(Error::DegenerateCells("contingency table needs two non-empty rows and columns".into()));
    }
    let row_tot: Vec<f64> = rows.iter().map(|r| cols.iter().map(|&c| r[c]).sum::<u64>() as f64).collect();
    let col_tot: Vec<f64> = cols.iter().map(|&c| rows.iter().map(|r| r[c]).sum::<u64>() as f64).collect();
    let n: f64 = row_tot.iter().sum();
    let mut stat = 0.0;
    for (i, r) in rows.iter().enumerate() {
        for (k, &c) in cols.iter().enumerate() {
            let e = row_tot[i] * col_tot[k] / n;
            if e < MIN_EXPECTED {
                return Err(Error::DegenerateCells(format!("expected count {e:.2} below {MIN_EXPECTED}")));
            }
            stat += (r[c] as f64 - e).powi(2) / e;
        }
    }
    let df = ((rows.len() - 1) * (cols.len() - 1)) as f64;
    Ok(TestReport::new("chi2_independence", stat, chi2_sf(stat, df), n as usize, alpha))
}

/// Two-sample chi-square: do the category counts `a` and `b` share one law?
/// Adjacent categories are merged until both expected counts reach five.
pub fn chi2_homogeneity(a: &[u64], b: &[u64], alpha: f64) -> Result<TestReport> {
    let len = a.len().max(b.len());
    let at = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateCells("empty sample".into()));
    }
    let smaller = na.min(nb) / (na + nb);
    let weights: Vec<f64> = (0..len).map(|i| (at(a, i) + at(b, i)) as f64 * smaller).collect();
    let groups = merge_groups(&weights, MIN_EXPECTED);
    let table: Vec<Vec<u64>> = [a, b]
        .iter()
        .map(|v| groups.iter().map(|g| g.clone().map(|i| at(v, i)).sum()).collect())
        .collect();
    chi2_independence(&table, alpha).map(|r| r.named("chi2_homogeneity"))
}

/// Index-of-dispersion test: `sum (x - mean)^2 / mean` against chi-square
/// with `m - 1` degrees of freedom, two-sided.
pub fn poisson_dispersion(counts: &[u64], alpha: f64) -> Result<TestReport> {
    need(30, counts.len())?;
    let m = counts.len() as f64;
    let mean = counts.iter().sum::<u64>() as f64 / m;
    if mean == 0.0 {
        return Err(Error::ZeroMean);
    }
    let stat = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / mean;
    let df = m - 1.0;
    let p = 2.0 * chi2_cdf(stat, df).min(chi2_sf(stat, df));
    Ok(TestReport::new("poisson_dispersion", stat, p, counts.len(), alpha))
}

fn exp_ks(gaps: &mut [f64]) -> f64 {
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    gaps.sort_by(f64::total_cmp);
    let n = gaps.len() as f64;
    gaps.iter()
        .enumerate()
        .map(|(i, &g)| {
            let f = -(-g / mean).exp_m1();
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

fn exp_null(n: usize) -> Arc<Vec<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("null cache").get(&n) {
        return v.clone();
    }
    let mut stats: Vec<f64> = (0..EXP_NULL_REPLICAS)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(EXP_NULL_SEED ^ n as u64, b as u64);
            let mut gaps: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect();
            exp_ks(&mut gaps)
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    let stats = Arc::new(stats);
    cache.lock().expect("null cache").insert(n, stats.clone());
    stats
}

/// KS test of exponential gaps with the rate fitted by the mean gap. `orbits`
/// holds one increasing list of times per independent orbit; gaps are taken
/// between consecutive times within an orbit.
pub fn exp_interarrival_orbits(orbits: &[Vec<f64>], alpha: f64) -> Result<TestReport> {
    let mut gaps: Vec<f64> = orbits
        .iter()
        .flat_map(|ts| ts.windows(2).map(|w| w[1] - w[0]))
        .collect();
    need(30, gaps.len())?;
    if gaps.iter().any(|&g| g < 0.0) {
        return Err(Error::InvalidParameter("times must be increasing".into()));
    }
    let n = gaps.len();
    let d = exp_ks(&mut gaps);
    let null = exp_null(n);
    let exceed = null.len() - null.partition_point(|&x| x < d);
    let p = (1 + exceed) as f64 / (null.len() + 1) as f64;
    Ok(TestReport::new("exp_interarrival", d, p, n, alpha))
}

/// [`exp_interarrival_orbits`] for a single orbit.
pub fn exp_interarrival(times: &[f64], alpha: f64) -> Result<TestReport> {
    need(31, times.len())?;
    exp_interarrival_orbits(&[times.to_vec()], alpha)
}

pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

fn fisher_z_pvalue(r: f64, n: usize) -> (f64, f64) {
    let z = r.clamp(-1.0 + 1e-15, 1.0 - 1e-15).atanh() * ((n as f64) - 3.0).sqrt();
    (z, erfc(z.abs() / SQRT_2))
}

/// Counts per window `[k L, (k+1) L)` inside `[0, horizon)` for each orbit,
/// one series per mark class.
pub fn window_counts<M>(
    orbits: &[MarkedPointSet<M>],
    horizon: f64,
    window_len: f64,
    classes: &[&dyn Fn(&M) -> bool],
) -> Vec<Vec<Vec<u64>>> {
    let k = (horizon / window_len).floor() as usize;
    orbits
        .iter()
        .map(|pp| {
            let mut counts = vec![vec![0u64; k]; classes.len()];
            for p in pp.points() {
                let w = (p.t / window_len).floor();
                if w < 0.0 || w as usize >= k {
                    continue;
                }
                for (c, pred) in classes.iter().enumerate() {
                    if pred(&p.mark) {
                        counts[c][w as usize] += 1;
                    }
                }
            }
            counts
        })
        .collect()
}

/// Lag-one correlation of each class's window counts within an orbit, and
/// same-window correlation between every pair of classes. Fisher z
/// p-values, Bonferroni-combined; the statistic is the largest `|z|`.
pub fn window_independence<M>(
    orbits: &[MarkedPointSet<M>],
    horizon: f64,
    window_len: f64,
    classes: &[&dyn Fn(&M) -> bool],
    alpha: f64,
) -> Result<TestReport> {
    if !(window_len > 0.0 && horizon >= window_len) || classes.is_empty() {
        return Err(Error::InvalidParameter("need a positive window inside the horizon and a class".into()));
    }
    let counts = window_counts(orbits, horizon, window_len, classes);
    let per_orbit = (horizon / window_len).floor() as usize;
    let n_windows = per_orbit * orbits.len();
    need(30, n_windows)?;

    let mut pvals = Vec::new();
    let mut zmax: f64 = 0.0;
    let mut push = |x: Vec<f64>, y: Vec<f64>| -> Result<()> {
        let r = correlation(&x, &y);
        if !r.is_finite() {
            return Err(Error::DegenerateCells("a window-count series is constant".into()));
        }
        let (z, p) = fisher_z_pvalue(r, x.len());
        zmax = zmax.max(z.abs());
        pvals.push(p);
        Ok(())
    };
    for c in 0..classes.len() {
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for orbit in &counts {
            for w in orbit[c].windows(2) {
                x.push(w[0] as f64);
                y.push(w[1] as f64);
            }
        }
        need(30, x.len())?;
        push(x, y)?;
    }
    for a in 0..classes.len() {
        for b in (a + 1)..classes.len() {
            let x: Vec<f64> = counts.iter().flat_map(|o| o[a].iter().map(|&v| v as f64)).collect();
            let y: Vec<f64> = counts.iter().flat_map(|o| o[b].iter().map(|&v| v as f64)).collect();
            push(x, y)?;
        }
    }
    let k = pvals.len() as f64;
    let p = (pvals.iter().copied().fold(1.0, f64::min) * k).min(1.0);
    Ok(TestReport::new("window_independence", zmax, p, n_windows, alpha))
}

fn need(needed: usize, got: usize) -> Result<()> {
    if got < needed {
        Err(Error::TooFewSamples { needed, got })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::{sample_ppp, Exponential, RefLaw, Uniform};
    use crate::process::MarkedPoint;
    use crate::rng::synthetic_rng;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_distr::Poisson;

    #[test]
    fn ks_statistic_examples() {
        assert_abs_diff_eq!(ks_statistic(&[0.5], |x| x), 0.5);
        let n = 40;
        let q: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect();
        assert_abs_diff_eq!(ks_statistic(&q, |x| x), 0.5 / n as f64, epsilon = 1e-15);
        assert!(matches!(
            ks_one_sample(&[0.5], |x| x, 0.01),
            Err(Error::TooFewSamples { needed: 10, got: 1 })
        ));
    }

    #[test]
    fn kolmogorov_values() {
        assert_abs_diff_eq!(kolmogorov_sf(1.3581), 0.05, epsilon = 2e-4);
        assert_abs_diff_eq!(kolmogorov_sf(1.6276), 0.01, epsilon = 2e-5);
        assert_abs_diff_eq!(kolmogorov_sf(1.18 - 1e-12), kolmogorov_sf(1.18), epsilon = 1e-10);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
        let mut prev = 1.0;
        for i in 1..400 {
            let v = kolmogorov_sf(i as f64 * 0.01);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn two_sample_identical_and_shifted() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let r = two_sample_ks(&a, &a, 0.01).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        let b: Vec<f64> = a.iter().map(|x| x + 50.0).collect();
        let r = two_sample_ks(&a, &b, 0.01).unwrap();
        assert_abs_diff_eq!(r.statistic, 0.5);
        assert!(!r.passed);
        // ties across samples are stepped over together
        let c = vec![0.0; 40];
        let d: Vec<f64> = (0..40).map(|i| if i < 20 { 0.0 } else { 1.0 }).collect();
        assert_abs_diff_eq!(two_sample_ks(&c, &d, 0.01).unwrap().statistic, 0.5);
    }

    #[test]
    fn chi2_exact_fit_and_known_quantile() {
        let r = chi2_gof(&[10, 20, 30, 40], &[0.1, 0.2, 0.3, 0.4], 0.01).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        // (60 - 50)^2/50 * 2 = 4 on one degree of freedom
        let r = chi2_gof(&[60, 40], &[0.5, 0.5], 0.01).unwrap();
        assert_abs_diff_eq!(r.statistic, 4.0);
        assert_abs_diff_eq!(r.p_value, 0.0455003, epsilon = 1e-6);
    }

    #[test]
    fn chi2_merges_sparse_cells() {
        // expected 50, 30, 15, 4, 1: the last two fold into the third
        let r = chi2_gof(&[50, 30, 15, 4, 1], &[0.5, 0.3, 0.15, 0.04, 0.01], 0.01).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(matches!(chi2_gof(&[3, 1], &[0.5, 0.5], 0.01), Err(Error::DegenerateCells(_))));
        assert_eq!(fold_tail(&[0, 1, 1, 5, 9], 3), vec![1, 2, 0, 2]);
    }

    #[test]
    fn chi2_independence_detects_dependence() {
        let indep = vec![vec![100, 200], vec![50, 100]];
        assert_abs_diff_eq!(chi2_independence(&indep, 0.01).unwrap().statistic, 0.0, epsilon = 1e-12);
        let dep = vec![vec![200, 20], vec![20, 200]];
        assert!(!chi2_independence(&dep, 0.01).unwrap().passed);
        let same = chi2_homogeneity(&[50, 30, 20, 2, 1], &[100, 60, 40, 4, 2], 0.01).unwrap();
        assert!(same.statistic < 1e-9);
    }

    #[test]
    fn dispersion_edge_cases() {
        let flat = vec![3u64; 50];
        let r = poisson_dispersion(&flat, 0.01).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(!r.passed);
        assert!(matches!(poisson_dispersion(&[0; 40], 0.01), Err(Error::ZeroMean)));
        assert!(matches!(poisson_dispersion(&[1; 10], 0.01), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn dispersion_poisson_passes_doubled_fails() {
        let mut rng = synthetic_rng(1, 0);
        let pois = Poisson::new(4.0).unwrap();
        let counts: Vec<u64> = (0..500).map(|_| pois.sample(&mut rng) as u64).collect();
        assert!(poisson_dispersion(&counts, 0.01).unwrap().passed);
        let doubled: Vec<u64> = counts.iter().map(|c| 2 * c).collect();
        assert!(!poisson_dispersion(&doubled, 0.01).unwrap().passed);
    }

    #[test]
    fn exp_interarrival_accepts_poisson_rejects_lattice() {
        let mut rng = synthetic_rng(2, 0);
        let pp = sample_ppp(2.0, &Uniform::new(0.0, 1.0), 500.0, &mut rng).unwrap();
        let r = exp_interarrival(&pp.times(), 0.01).unwrap();
        assert!(r.passed, "{r:?}");
        let lattice: Vec<f64> = (0..1000).map(|i| i as f64 * 0.5 + 0.1 * (i % 3) as f64).collect();
        assert!(!exp_interarrival(&lattice, 0.01).unwrap().passed);
        assert!(matches!(exp_interarrival(&[1.0, 2.0], 0.01), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn exp_null_is_deterministic() {
        let a = exp_null(57);
        let b = exp_null(57);
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(a.len(), EXP_NULL_REPLICAS);
    }

    fn labelled_ppp(seed: u64, horizon: f64) -> MarkedPointSet<f64> {
        let mut rng = synthetic_rng(seed, 0);
        sample_ppp(3.0, &Uniform::new(0.0, 1.0), horizon, &mut rng).unwrap()
    }

    #[test]
    fn window_independence_passes_for_ppp() {
        let orbits: Vec<_> = (0..4).map(|s| labelled_ppp(10 + s, 200.0)).collect();
        let low = |m: &f64| *m < 0.5;
        let high = |m: &f64| *m >= 0.5;
        let r = window_independence(&orbits, 200.0, 1.0, &[&low, &high], 0.01).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.n, 800);
    }

    #[test]
    fn window_independence_detects_cloned_points() {
        // every point has a twin in the other class, so the class counts coincide
        let mut rng = synthetic_rng(4, 0);
        let mut pts = Vec::new();
        let exp = Exponential { rate: 2.0 };
        let mut t = 0.0;
        while t < 300.0 {
            t += exp.sample(&mut rng);
            pts.push(MarkedPoint { t, mark: 0.25 });
            pts.push(MarkedPoint { t: t + 1e-9, mark: 0.75 });
        }
        let pp = MarkedPointSet::from_points(pts);
        let low = |m: &f64| *m < 0.5;
        let high = |m: &f64| *m >= 0.5;
        assert!(!window_independence(&[pp], 300.0, 1.0, &[&low, &high], 0.01).unwrap().passed);
    }

    #[test]
    fn window_independence_detects_alternation() {
        let mut rng = synthetic_rng(6, 0);
        let mut pts = Vec::new();
        for k in 0..200 {
            let n = if k % 2 == 0 { 6 } else { 1 };
            for _ in 0..n {
                pts.push(MarkedPoint { t: k as f64 + rng.random::<f64>(), mark: 0.0 });
            }
        }
        let pp = MarkedPointSet::from_points(pts);
        let all = |_: &f64| true;
        assert!(!window_independence(&[pp], 200.0, 1.0, &[&all], 0.01).unwrap().passed);
    }

    #[test]
    fn report_invariants() {
        let r = TestReport::new("x", 1.0, 1.5, 10, 0.01);
        assert_eq!(r.p_value, 1.0);
        assert!(r.passed);
        let r = TestReport::new("x", 1.0, 0.01, 10, 0.01);
        assert!(!r.passed);
    }
}
