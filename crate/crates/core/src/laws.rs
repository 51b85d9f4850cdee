//! Reference distributions of the limit objects, with samplers.
//!
//! One-dimensional laws implement [`RefLaw`] and are sampled by inversion.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Exp, Poisson};

use crate::error::{Error, Result};
use crate::geometry::UnitVector;
use crate::process::{Line, MarkedPoint, MarkedPointSet};
use crate::targets::{total_weight, Target};

pub trait RefLaw: Send + Sync {
    fn name(&self) -> String;
    fn cdf(&self, x: f64) -> f64;
    fn quantile(&self, u: f64) -> f64;
    fn support(&self) -> (f64, f64);

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    pub lo: f64,
    pub hi: f64,
}

impl Uniform {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(hi > lo, "empty uniform support");
        Self { lo, hi }
    }
}

impl RefLaw for Uniform {
    fn name(&self) -> String {
        format!("uniform[{}, {}]", self.lo, self.hi)
    }

    fn cdf(&self, x: f64) -> f64 {
        ((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }

    fn quantile(&self, u: f64) -> f64 {
        self.lo + u * (self.hi - self.lo)
    }

    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// Incidence angle with density `cos(phi) / 2` on `[-pi/2, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CosineAngle;

impl RefLaw for CosineAngle {
    fn name(&self) -> String {
        "cosine-angle".into()
    }

    fn cdf(&self, x: f64) -> f64 {
        (0.5 * (1.0 + x.clamp(-FRAC_PI_2, FRAC_PI_2).sin())).clamp(0.0, 1.0)
    }

    fn quantile(&self, u: f64) -> f64 {
        (2.0 * u - 1.0).clamp(-1.0, 1.0).asin()
    }

    fn support(&self) -> (f64, f64) {
        (-FRAC_PI_2, FRAC_PI_2)
    }
}

/// Normalized crossing time `r * X`, where `X` has density
/// `y / (2 sqrt(4 - y^2))` on `[0, 2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordTime {
    pub r: f64,
}

impl RefLaw for ChordTime {
    fn name(&self) -> String {
        format!("chord-time(r = {})", self.r)
    }

    fn cdf(&self, x: f64) -> f64 {
        chord_time_cdf(x, self.r)
    }

    fn quantile(&self, u: f64) -> f64 {
        2.0 * self.r * (u * (2.0 - u)).max(0.0).sqrt()
    }

    fn support(&self) -> (f64, f64) {
        (0.0, 2.0 * self.r)
    }
}

/// Law with density `y / sqrt(1 - y^2)` on `[0, 1]`; the law of `cos(phi)`
/// for a [`CosineAngle`] angle.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HazardY;

impl RefLaw for HazardY {
    fn name(&self) -> String {
        "hazard-y".into()
    }

    fn cdf(&self, y: f64) -> f64 {
        hazard_y_cdf(y)
    }

    fn quantile(&self, u: f64) -> f64 {
        (u * (2.0 - u)).max(0.0).sqrt()
    }

    fn support(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    pub rate: f64,
}

impl RefLaw for Exponential {
    fn name(&self) -> String {
        format!("exp(rate = {})", self.rate)
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.rate * x).exp_m1()
        }
    }

    fn quantile(&self, u: f64) -> f64 {
        -(-u).ln_1p() / self.rate
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

/// The law of `factor * X` for `X` drawn from `law`.
pub struct Scaled<L> {
    pub factor: f64,
    pub law: L,
}

impl<L: RefLaw> RefLaw for Scaled<L> {
    fn name(&self) -> String {
        format!("{} x {}", self.factor, self.law.name())
    }

    fn cdf(&self, x: f64) -> f64 {
        self.law.cdf(x / self.factor)
    }

    fn quantile(&self, u: f64) -> f64 {
        self.factor * self.law.quantile(u)
    }

    fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.law.support();
        (self.factor * lo, self.factor * hi)
    }
}

/// `F(x) = 1 - sqrt(4 - (x/r)^2) / 2` on `[0, 2r]`.
pub fn chord_time_cdf(x: f64, r: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let y = x / r;
    if y >= 2.0 {
        return 1.0;
    }
    1.0 - 0.5 * ((2.0 - y) * (2.0 + y)).sqrt()
}

/// `F(y) = 1 - sqrt(1 - y^2)` on `[0, 1]`.
pub fn hazard_y_cdf(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    1.0 - ((1.0 - y) * (1.0 + y)).sqrt()
}

/// `p^k (1 - p)`.
pub fn geometric_pmf(k: u64, p: f64) -> f64 {
    p.powi(k as i32) * (1.0 - p)
}

/// Law of `Z_1 + ... + Z_N` with `N` Poisson(`t`) and independent
/// `Z_l ~ Bernoulli(1/l)`: the number of limit records up to time `t`.
/// Entry `k < k_max` is `P(K = k)`; the last entry is `P(K >= k_max)`.
pub fn record_count_pmf(t: f64, k_max: usize) -> Vec<f64> {
    let n_max = (t + 12.0 * t.sqrt() + 60.0).ceil() as usize;
    // law of Z_1 + ... + Z_n, updated one n at a time
    let mut partial = vec![1.0];
    let mut out = vec![0.0; k_max + 1];
    let mut log_pois = -t;
    for n in 0..=n_max {
        if n > 0 {
            log_pois += t.ln() - (n as f64).ln();
            let q = 1.0 / n as f64;
            let mut next = vec![0.0; partial.len() + 1];
            for (k, &v) in partial.iter().enumerate() {
                next[k] += v * (1.0 - q);
                next[k + 1] += v * q;
            }
            partial = next;
        }
        let w = log_pois.exp();
        for (k, &v) in partial.iter().enumerate() {
            out[k.min(k_max)] += w * v;
        }
    }
    out
}

/// Limit density of the entry mark `(j, p, u)` with respect to
/// `counting x dp x du` on `{labels} x S^1 x S^1`.
pub fn mark_density_entry(j: usize, p_angle: f64, u_angle: f64, targets: &[Target]) -> f64 {
    let Some(target) = targets.iter().find(|t| t.label() == j) else {
        return 0.0;
    };
    let d = total_weight(targets);
    let (p, u) = (UnitVector::from_angle(p_angle), UnitVector::from_angle(u_angle));
    let incidence = (-p.dot(u)).max(0.0);
    if !target.is_interior() && p.as_vec().dot(target.inward_normal()) < 0.0 {
        return 0.0;
    }
    target.shape_radius() / (2.0 * d * PI) * incidence
}

/// One draw `(label, p_angle, u_angle)` from [`mark_density_entry`] by
/// rejection from the uniform law on `S^1 x S^1` per label.
pub fn sample_entry_mark<R: Rng + ?Sized>(targets: &[Target], rng: &mut R) -> (usize, f64, f64) {
    let d = total_weight(targets);
    let mut pick = rng.random::<f64>() * d;
    let mut chosen = &targets[targets.len() - 1];
    for t in targets {
        let w = t.d() as f64 * t.shape_radius();
        if pick < w {
            chosen = t;
            break;
        }
        pick -= w;
    }
    let bound = chosen.shape_radius() / (2.0 * d * PI);
    loop {
        let p_angle = rng.random::<f64>() * TAU;
        let u_angle = rng.random::<f64>() * TAU;
        let dens = mark_density_entry(chosen.label(), p_angle, u_angle, targets);
        if rng.random::<f64>() * bound < dens {
            return (chosen.label(), p_angle, u_angle);
        }
    }
}

/// Homogeneous Poisson process on `[0, window]` with i.i.d. marks.
pub fn sample_ppp<R: Rng>(
    intensity: f64,
    mark_law: &dyn RefLaw,
    window: f64,
    rng: &mut R,
) -> Result<MarkedPointSet<f64>> {
    if !(intensity > 0.0 && intensity.is_finite()) || !(window > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "intensity {intensity} and window {window} must be positive"
        )));
    }
    let exp = Exp::new(intensity).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut points = Vec::new();
    let mut t = exp.sample(rng);
    while t <= window {
        points.push(MarkedPoint {
            t,
            mark: mark_law.sample(rng),
        });
        t += exp.sample(rng);
    }
    Ok(MarkedPointSet::from_points(points))
}

/// Record times of the limit process: arrivals of a rate-one Poisson process,
/// the `l`-th kept with probability `1/l`, up to `t_horizon`.
pub fn sample_record_limit<R: Rng + ?Sized>(t_horizon: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(t_horizon > 0.0) {
        return Err(Error::InvalidParameter(format!("horizon {t_horizon} must be positive")));
    }
    let exp = Exp::new(1.0).expect("unit rate");
    let mut out = Vec::new();
    let mut t = exp.sample(rng);
    let mut l = 1u64;
    while t <= t_horizon {
        if rng.random::<f64>() * (l as f64) < 1.0 {
            out.push(t);
        }
        l += 1;
        t += exp.sample(rng);
    }
    Ok(out)
}

/// Replicas of the Poisson line process in the unit disk with intensity
/// `(kappa / pi) dr dtheta` on `[-1, 1] x [0, pi)`.
pub fn sample_line_process<R: Rng + ?Sized>(kappa: f64, n_replicas: usize, rng: &mut R) -> Result<Vec<Vec<Line>>> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!("kappa {kappa} must be positive")));
    }
    let count = Poisson::new(2.0 * kappa).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok((0..n_replicas)
        .map(|_| {
            let n = count.sample(rng) as usize;
            (0..n)
                .map(|_| Line {
                    r: rng.random::<f64>() * 2.0 - 1.0,
                    theta: rng.random::<f64>() * PI,
                })
                .collect()
        })
        .collect())
}

/// Draws a geometric `M` with `P(M = k) = p^k (1 - p)`.
pub fn sample_geometric<R: Rng + ?Sized>(p: f64, rng: &mut R) -> u64 {
    let mut k = 0;
    while rng.random::<f64>() < p {
        k += 1;
    }
    k
}

/// `n` draws of `X_1 + ... + X_M` with `M` geometric and `X_i` i.i.d.
pub fn compound_local_time_sampler<R: Rng>(
    p: f64,
    m1: &dyn RefLaw,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} outside (0, 1)")));
    }
    Ok((0..n)
        .map(|_| {
            let m = sample_geometric(p, rng);
            (0..m).map(|_| m1.sample(rng)).sum()
        })
        .collect())
}
