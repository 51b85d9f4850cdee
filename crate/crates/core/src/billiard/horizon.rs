//! Finite-horizon certification.
//!
//! Two checks are combined. Every rational direction `(a, b)` up to a slope
//! bound must have all of its corridors blocked: the projections of the
//! obstacle lattice onto the normal of that direction, thickened by the
//! radii, must cover the whole circle of circumference `1 / |(a, b)|`.
//! Then a deterministic grid of free flights leaving every obstacle is traced
//! and the longest one, inflated by 10%, becomes the free-path bound.
//!
//! This is a certificate for low-slope corridors plus a probe, not a proof.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use super::flow::cast_ray;
use super::Table;
use crate::error::{Error, Result};
use crate::geometry::Vec2;

const PROBE_POSITIONS: usize = 360;
const PROBE_ANGLES: usize = 360;
const BOUND_INFLATION: f64 = 1.1;
const GAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HorizonCertificate {
    pub directions_checked: usize,
    pub probes: usize,
    pub max_probe_flight: f64,
    pub free_path_bound: f64,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Primitive directions `(a, b)`, one per line direction, with
/// `|a|, |b| <= slope_bound`.
fn primitive_directions(slope_bound: u32) -> Vec<(i64, i64)> {
    let s = slope_bound as i64;
    let mut dirs = Vec::new();
    for b in 0..=s {
        for a in -s..=s {
            if b == 0 && a <= 0 {
                continue;
            }
            if gcd(a.unsigned_abs() as u32, b as u32) == 1 {
                dirs.push((a, b));
            }
        }
    }
    dirs
}

/// Uncovered intervals of the normal coordinate for lines of direction
/// `(a, b)`, as `(start, end)` pairs in `[0, 1/|(a,b)|)`. Empty means every
/// line of that direction meets an obstacle.
pub fn corridor_gaps(table: &Table, a: i64, b: i64) -> Vec<(f64, f64)> {
    let h = ((a * a + b * b) as f64).sqrt();
    let period = 1.0 / h;
    let normal = Vec2::new(-b as f64, a as f64) * period;
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for o in table.obstacles() {
        if 2.0 * o.radius >= period {
            return Vec::new();
        }
        let s = o.center.as_vec().dot(normal).rem_euclid(period);
        intervals.push((s - o.radius, s + o.radius));
    }
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));

    // sweep once around the circle starting from the first interval
    let start = intervals[0].0;
    let mut reach = intervals[0].1;
    let mut gaps = Vec::new();
    for &(lo, hi) in &intervals[1..] {
        if lo > reach + GAP_TOL {
            gaps.push((reach, lo));
        }
        reach = reach.max(hi);
    }
    let wrap = start + period;
    if wrap > reach + GAP_TOL {
        gaps.push((reach, wrap));
    }
    gaps.into_iter()
        .map(|(lo, hi)| (lo.rem_euclid(period), hi.rem_euclid(period)))
        .collect()
}

/// Runs both checks and returns the full certificate.
pub fn horizon_certificate(table: &Table, slope_bound: u32, probe_len: f64) -> Result<HorizonCertificate> {
    if slope_bound < 1 {
        return Err(Error::InvalidParameter("slope_bound must be at least 1".into()));
    }
    if !(probe_len > 0.0) {
        return Err(Error::InvalidParameter("probe_len must be positive".into()));
    }
    let dirs = primitive_directions(slope_bound);
    for &(a, b) in &dirs {
        let gaps = corridor_gaps(table, a, b);
        if let Some(&(lo, hi)) = gaps.first() {
            return Err(Error::InfiniteHorizonSuspected(format!(
                "direction ({a}, {b}) has an open corridor at normal offsets ({lo:.6}, {hi:.6})"
            )));
        }
    }

    let short = probe_len.min(1.0);
    let mut max_flight: f64 = 0.0;
    let mut probes = 0;
    for o in table.obstacles() {
        let c = o.center.as_vec();
        for k in 0..PROBE_POSITIONS {
            let alpha = (k as f64 + 0.5) * TAU / PROBE_POSITIONS as f64;
            let n = Vec2::new(alpha.cos(), alpha.sin());
            let origin = c + n * o.radius;
            for m in 0..PROBE_ANGLES {
                let phi = -FRAC_PI_2 + (m as f64 + 0.5) * PI / PROBE_ANGLES as f64;
                let dir = n.rotate(phi);
                probes += 1;
                let hit = cast_ray(table.obstacles(), origin, dir, short)
                    .or_else(|| cast_ray(table.obstacles(), origin, dir, probe_len));
                match hit {
                    Some(h) => max_flight = max_flight.max(h.dist),
                    None => {
                        return Err(Error::InfiniteHorizonSuspected(format!(
                            "probe from ({:.4}, {:.4}) at angle {:.4} flew farther than {probe_len}",
                            origin.x,
                            origin.y,
                            dir.y.atan2(dir.x)
                        )))
                    }
                }
            }
        }
    }
    Ok(HorizonCertificate {
        directions_checked: dirs.len(),
        probes,
        max_probe_flight: max_flight,
        free_path_bound: max_flight * BOUND_INFLATION,
    })
}

/// Certifies finite horizon and returns an upper bound on free flights.
pub fn check_finite_horizon(table: &Table, slope_bound: u32, probe_len: f64) -> Result<f64> {
    horizon_certificate(table, slope_bound, probe_len).map(|c| c.free_path_bound)
}
