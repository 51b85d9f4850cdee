//! Sinai billiard on the unit torus with circular obstacles.
//!
//! The flow moves at unit speed in `Q = T^2 \ (union of disks)` and reflects
//! specularly on obstacle boundaries. Everything here is exact up to double
//! precision: free flights are closed-form ray/circle intersections.

mod flow;
mod horizon;
mod sampling;

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub use flow::{
    flow_segments, flow_to, next_collision, BilliardFlow, CollisionEvent, PhasePoint, Segment,
    GRAZING_TOL,
};
pub use horizon::{check_finite_horizon, corridor_gaps, horizon_certificate, HorizonCertificate};
pub use sampling::{sample_mu, sample_mu_seeded, sample_mu_with_attempts};

use crate::error::{Error, Result};
use crate::geometry::TorusPoint;

/// Slope bound used when certifying a table at construction.
pub const DEFAULT_SLOPE_BOUND: u32 = 6;
/// Probe length used when certifying a table at construction.
pub const DEFAULT_PROBE_LEN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub center: TorusPoint,
    pub radius: f64,
}

impl Obstacle {
    pub fn new(x: f64, y: f64, radius: f64) -> Self {
        Self {
            center: TorusPoint::new(x, y),
            radius,
        }
    }
}

/// An immutable billiard table. `Q` is the torus minus the open obstacle disks.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    obstacles: Vec<Obstacle>,
    area_q: f64,
    boundary_length: f64,
    free_path_bound: f64,
    max_radius: f64,
}

impl Table {
    /// Validates the obstacle geometry and certifies finite horizon with
    /// [`check_finite_horizon`] at the default slope bound and probe length.
    pub fn new(obstacles: Vec<Obstacle>) -> Result<Self> {
        let uncertified = Self::with_free_path_bound(obstacles, DEFAULT_PROBE_LEN)?;
        let bound = check_finite_horizon(&uncertified, DEFAULT_SLOPE_BOUND, DEFAULT_PROBE_LEN)?;
        Ok(Self {
            free_path_bound: bound,
            ..uncertified
        })
    }

    /// Validates the geometry only and trusts the caller-provided bound on
    /// free flights. Flights longer than `bound` are reported as
    /// [`Error::HorizonViolated`].
    pub fn with_free_path_bound(obstacles: Vec<Obstacle>, bound: f64) -> Result<Self> {
        if obstacles.is_empty() {
            return Err(Error::InvalidTable("no obstacles".into()));
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::InvalidTable(format!("free-path bound {bound} must be positive")));
        }
        for (i, o) in obstacles.iter().enumerate() {
            if !(o.radius > 0.0 && o.radius < 0.5) {
                return Err(Error::InvalidTable(format!(
                    "obstacle {i}: radius {} outside (0, 0.5)",
                    o.radius
                )));
            }
        }
        for i in 0..obstacles.len() {
            for j in (i + 1)..obstacles.len() {
                let (a, b) = (obstacles[i], obstacles[j]);
                let d = a.center.distance(b.center);
                if d <= a.radius + b.radius {
                    return Err(Error::InvalidTable(format!(
                        "obstacles {i} and {j} are not disjoint (distance {d}, radii {} + {})",
                        a.radius, b.radius
                    )));
                }
            }
        }
        let area_q = 1.0 - obstacles.iter().map(|o| PI * o.radius * o.radius).sum::<f64>();
        if area_q <= 0.0 {
            return Err(Error::InvalidTable("obstacles cover the torus".into()));
        }
        let boundary_length = obstacles.iter().map(|o| 2.0 * PI * o.radius).sum();
        let max_radius = obstacles.iter().map(|o| o.radius).fold(0.0, f64::max);
        Ok(Self {
            obstacles,
            area_q,
            boundary_length,
            free_path_bound: bound,
            max_radius,
        })
    }

    /// Disk of radius 0.45 at the origin and disk of radius 0.25 at
    /// `(0.5, 0.5)`. Certified once and cached.
    pub fn default_table() -> Table {
        static DEFAULT: OnceLock<Table> = OnceLock::new();
        DEFAULT
            .get_or_init(|| {
                Table::new(default_obstacles()).expect("default table is a valid finite-horizon table")
            })
            .clone()
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn obstacle(&self, id: usize) -> Option<&Obstacle> {
        self.obstacles.get(id)
    }

    /// Lebesgue area of `Q`.
    pub fn area_q(&self) -> f64 {
        self.area_q
    }

    /// Total length of `dQ`.
    pub fn boundary_length(&self) -> f64 {
        self.boundary_length
    }

    pub fn free_path_bound(&self) -> f64 {
        self.free_path_bound
    }

    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    /// Mean free path under the collision-map measure, `pi * Area(Q) / |dQ|`.
    pub fn mean_free_path(&self) -> f64 {
        PI * self.area_q / self.boundary_length
    }

    /// True when `q` lies in `Q` (outside every open obstacle).
    pub fn is_free(&self, q: TorusPoint) -> bool {
        self.obstacles
            .iter()
            .all(|o| o.center.distance(q) >= o.radius)
    }

    /// Signed distance from `q` to the nearest obstacle boundary
    /// (negative inside an obstacle).
    pub fn boundary_distance(&self, q: TorusPoint) -> f64 {
        self.obstacles
            .iter()
            .map(|o| o.center.distance(q) - o.radius)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn default_obstacles() -> Vec<Obstacle> {
    vec![Obstacle::new(0.0, 0.0, 0.45), Obstacle::new(0.5, 0.5, 0.25)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn area_and_boundary_match_closed_form() {
        let t = Table::default_table();
        assert_relative_eq!(t.area_q(), 1.0 - PI * (0.45f64.powi(2) + 0.25f64.powi(2)), epsilon = 1e-15);
        assert_relative_eq!(t.boundary_length(), 2.0 * PI * 0.7, epsilon = 1e-14);
    }

    #[test]
    fn rejects_overlapping_obstacles() {
        let err = Table::with_free_path_bound(
            vec![Obstacle::new(0.0, 0.0, 0.45), Obstacle::new(0.5, 0.5, 0.3)],
            1.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidTable(_)));
    }

    #[test]
    fn overlap_is_measured_across_the_torus_seam() {
        let err = Table::with_free_path_bound(
            vec![Obstacle::new(0.05, 0.5, 0.1), Obstacle::new(0.9, 0.5, 0.1)],
            1.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidTable(_)));
    }

    #[test]
    fn rejects_bad_radius() {
        assert!(Table::with_free_path_bound(vec![Obstacle::new(0.0, 0.0, 0.5)], 1.0).is_err());
        assert!(Table::with_free_path_bound(vec![Obstacle::new(0.0, 0.0, 0.0)], 1.0).is_err());
    }

    #[test]
    fn free_membership() {
        let t = Table::default_table();
        assert!(t.is_free(TorusPoint::new(0.5, 0.0)));
        assert!(!t.is_free(TorusPoint::new(0.99, 0.99)));
        assert!(!t.is_free(TorusPoint::new(0.5, 0.5)));
        assert_relative_eq!(t.boundary_distance(TorusPoint::new(0.5, 0.0)), 0.05, epsilon = 1e-12);
    }
}
