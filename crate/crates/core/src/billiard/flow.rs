use std::f64::consts::TAU;

use super::{Obstacle, Table};
use crate::error::{Error, Result};
use crate::geometry::{TorusPoint, UnitVector, Vec2};

/// Collisions with `cos(phi)` below this value are treated as grazing.
pub const GRAZING_TOL: f64 = 1e-9;

/// Position in `Q` together with a unit velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub q: TorusPoint,
    pub v: UnitVector,
}

impl PhasePoint {
    pub fn new(q: TorusPoint, v: UnitVector) -> Self {
        Self { q, v }
    }

    pub fn reversed(self) -> Self {
        Self {
            q: self.q,
            v: self.v.neg(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionEvent {
    /// Flow time of the collision.
    pub t: f64,
    pub obstacle_id: usize,
    pub q: TorusPoint,
    /// Arc-length coordinate on the obstacle boundary, counter-clockwise from
    /// the rightmost point.
    pub r_abscissa: f64,
    /// Signed angle from the normal pointing into `Q` to the outgoing velocity.
    pub phi: f64,
    pub v_out: UnitVector,
}

/// A straight piece of trajectory starting at `start` at flow time `t_start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: PhasePoint,
    pub t_start: f64,
    pub duration: f64,
}

impl Segment {
    pub fn t_end(&self) -> f64 {
        self.t_start + self.duration
    }

    /// End point in the plane lifted around the start position.
    pub fn lifted_end(&self) -> Vec2 {
        self.start.q.as_vec() + self.start.v.as_vec() * self.duration
    }
}

pub(crate) struct RayHit {
    pub dist: f64,
    pub obstacle_id: usize,
    pub center: Vec2,
}

/// Smallest positive intersection of the ray `origin + s*dir`, `0 < s <= max_len`,
/// with any lifted copy of any obstacle. `origin` must lie outside all obstacles.
pub(crate) fn cast_ray(obstacles: &[Obstacle], origin: Vec2, dir: Vec2, max_len: f64) -> Option<RayHit> {
    let mut best: Option<RayHit> = None;
    let mut limit = max_len;
    for (id, o) in obstacles.iter().enumerate() {
        let reach = max_len + o.radius;
        let c0 = o.center.as_vec();
        let ix_lo = (origin.x - reach - c0.x).floor() as i64;
        let ix_hi = (origin.x + reach - c0.x).ceil() as i64;
        let iy_lo = (origin.y - reach - c0.y).floor() as i64;
        let iy_hi = (origin.y + reach - c0.y).ceil() as i64;
        let r2 = o.radius * o.radius;
        for ix in ix_lo..=ix_hi {
            for iy in iy_lo..=iy_hi {
                let c = Vec2::new(c0.x + ix as f64, c0.y + iy as f64);
                let f = origin - c;
                let b = f.dot(dir);
                if b >= 0.0 {
                    // moving away from (or tangent to) this copy
                    continue;
                }
                let cc = f.norm_sq() - r2;
                let disc = b * b - cc;
                if disc <= 0.0 {
                    continue;
                }
                // far root without cancellation, near root from Vieta
                let far = -b + disc.sqrt();
                let near = cc / far;
                if near > 0.0 && near <= limit {
                    limit = near;
                    best = Some(RayHit {
                        dist: near,
                        obstacle_id: id,
                        center: c,
                    });
                }
            }
        }
    }
    best
}

/// Free flight from `p` to the next obstacle and the resulting collision.
/// The returned event carries `t = dt`.
pub fn next_collision(table: &Table, p: &PhasePoint) -> Result<(f64, CollisionEvent)> {
    let origin = p.q.as_vec();
    let dir = p.v.as_vec();
    let bound = table.free_path_bound();
    let hit = cast_ray(table.obstacles(), origin, dir, bound).ok_or(Error::HorizonViolated {
        x: p.q.x(),
        y: p.q.y(),
        length: f64::INFINITY,
        bound,
    })?;
    let o = &table.obstacles()[hit.obstacle_id];
    let contact = origin + dir * hit.dist;
    let normal = UnitVector::from_vec(contact - hit.center).expect("contact lies on a circle of positive radius");
    let cos_in = normal.dot(p.v);
    let cos_phi = -cos_in;
    if cos_phi < GRAZING_TOL {
        return Err(Error::GrazingCollision {
            obstacle: hit.obstacle_id,
            cos_phi,
        });
    }
    let n = normal.as_vec();
    let v_out = UnitVector::from_vec(dir - n * (2.0 * cos_in)).expect("reflection of a unit vector is nonzero");
    // snap the contact point onto the circle to stop drift
    let on_circle = hit.center + n * o.radius;
    let phi = normal.signed_angle_to(v_out);
    let r_abscissa = o.radius * normal.angle();
    debug_assert!(r_abscissa < TAU * o.radius + 1e-12);
    Ok((
        hit.dist,
        CollisionEvent {
            t: hit.dist,
            obstacle_id: hit.obstacle_id,
            q: TorusPoint::from_vec(on_circle),
            r_abscissa,
            phi,
            v_out,
        },
    ))
}

/// Stateful billiard flow, stepping from collision to collision.
#[derive(Debug, Clone)]
pub struct BilliardFlow<'a> {
    table: &'a Table,
    state: PhasePoint,
    time: f64,
    collisions: u64,
}

impl<'a> BilliardFlow<'a> {
    pub fn new(table: &'a Table, start: PhasePoint) -> Self {
        Self {
            table,
            state: start,
            time: 0.0,
            collisions: 0,
        }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn state(&self) -> PhasePoint {
        self.state
    }

    pub fn collisions(&self) -> u64 {
        self.collisions
    }

    /// Flies to the next collision and reflects. Returns the flown segment and
    /// the collision at its end.
    pub fn step(&mut self) -> Result<(Segment, CollisionEvent)> {
        let (dt, mut event) = next_collision(self.table, &self.state)?;
        let segment = Segment {
            start: self.state,
            t_start: self.time,
            duration: dt,
        };
        self.time += dt;
        self.collisions += 1;
        event.t = self.time;
        self.state = PhasePoint::new(event.q, event.v_out);
        Ok((segment, event))
    }
}

/// Straight segments of the flow from `p0` over `[0, t_max]`. The last segment
/// is cut at `t_max`.
pub fn flow_segments(table: &Table, p0: PhasePoint, t_max: f64) -> Result<Vec<Segment>> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidParameter(format!("t_max = {t_max} must be positive")));
    }
    let mut flow = BilliardFlow::new(table, p0);
    let mut segments = Vec::new();
    loop {
        let (mut seg, _) = flow.step()?;
        if seg.t_end() >= t_max {
            seg.duration = t_max - seg.t_start;
            segments.push(seg);
            return Ok(segments);
        }
        segments.push(seg);
    }
}

/// Phase point reached from `p0` after flow time `t`.
pub fn flow_to(table: &Table, p0: PhasePoint, t: f64) -> Result<PhasePoint> {
    if t == 0.0 {
        return Ok(p0);
    }
    let segments = flow_segments(table, p0, t)?;
    let last = segments.last().expect("at least one segment");
    Ok(PhasePoint::new(TorusPoint::from_vec(last.lifted_end()), last.start.v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::billiard::{sample_mu, Obstacle};
    use crate::rng::stream_rng;
    use approx::assert_abs_diff_eq;

    fn single_disk() -> Table {
        Table::with_free_path_bound(vec![Obstacle::new(0.5, 0.5, 0.25)], 2.0).unwrap()
    }

    fn pp(x: f64, y: f64, ux: f64, uy: f64) -> PhasePoint {
        PhasePoint::new(TorusPoint::new(x, y), UnitVector::new(ux, uy).unwrap())
    }

    #[test]
    fn normal_incidence_from_below() {
        let (dt, ev) = next_collision(&single_disk(), &pp(0.5, 0.0, 0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(dt, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(ev.q.x(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(ev.q.y(), 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(ev.phi, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ev.v_out.ux(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev.v_out.uy(), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn wraps_around_the_torus() {
        let (dt, ev) = next_collision(&single_disk(), &pp(0.5, 0.0, 0.0, -1.0)).unwrap();
        assert_abs_diff_eq!(dt, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(ev.q.y(), 0.75, epsilon = 1e-14);
    }

    #[test]
    fn horizon_violation_is_reported() {
        let err = next_collision(&single_disk(), &pp(0.5, 0.0, 1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::HorizonViolated { .. }));
    }

    #[test]
    fn exact_tangency_is_not_a_collision() {
        // x = 0.25 touches the disk's left-most point and meets nothing else
        let err = next_collision(&single_disk(), &pp(0.25, 0.0, 0.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::HorizonViolated { .. }));
    }

    /// Independent oracle: solve |o + s d - c|^2 = r^2 directly over a wide
    /// block of lifted copies and keep the smallest positive root.
    fn brute_force_hit(table: &Table, o: Vec2, d: Vec2) -> (f64, Vec2) {
        let mut best = (f64::INFINITY, Vec2::ZERO);
        for ob in table.obstacles() {
            for ix in -4..=4 {
                for iy in -4..=4 {
                    let c = ob.center.as_vec() + Vec2::new(ix as f64, iy as f64);
                    let a = 1.0;
                    let b = 2.0 * (o - c).dot(d);
                    let cq = (o - c).norm_sq() - ob.radius * ob.radius;
                    let disc = b * b - 4.0 * a * cq;
                    if disc < 0.0 {
                        continue;
                    }
                    for s in [(-b - disc.sqrt()) / 2.0, (-b + disc.sqrt()) / 2.0] {
                        if s > 1e-12 && s < best.0 {
                            best = (s, o + d * s);
                        }
                    }
                }
            }
        }
        best
    }

    #[test]
    fn default_table_matches_closed_form_quadratic() {
        let table = Table::default_table();
        let p = pp(0.5, 0.0, 1.0, 0.0);
        let (dt, ev) = next_collision(&table, &p).unwrap();
        let (s, hit) = brute_force_hit(&table, p.q.as_vec(), p.v.as_vec());
        assert!(dt > 0.0 && dt <= table.free_path_bound());
        assert_abs_diff_eq!(dt, s, epsilon = 1e-10);
        let q = TorusPoint::from_vec(hit);
        assert!(ev.q.distance(q) < 1e-10);
    }

    #[test]
    fn random_rays_match_oracle() {
        let table = Table::default_table();
        let mut rng = stream_rng(7, 0);
        for _ in 0..2000 {
            let p = sample_mu(&table, &mut rng);
            let (dt, ev) = next_collision(&table, &p).unwrap();
            let (s, hit) = brute_force_hit(&table, p.q.as_vec(), p.v.as_vec());
            assert_abs_diff_eq!(dt, s, epsilon = 1e-10);
            assert!(ev.q.distance(TorusPoint::from_vec(hit)) < 1e-10);
            assert!(ev.phi.abs() < std::f64::consts::FRAC_PI_2);
        }
    }

    #[test]
    fn one_segment_when_horizon_shorter_than_first_flight() {
        let segs = flow_segments(&single_disk(), pp(0.5, 0.0, 0.0, 1.0), 0.1).unwrap();
        assert_eq!(segs.len(), 1);
        assert_abs_diff_eq!(segs[0].duration, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn normal_reflection_reverses_velocity() {
        let segs = flow_segments(&single_disk(), pp(0.5, 0.0, 0.0, 1.0), 0.3).unwrap();
        assert_eq!(segs.len(), 2);
        assert_abs_diff_eq!(segs[1].start.v.uy(), -1.0, epsilon = 1e-14);
        let total: f64 = segs.iter().map(|s| s.duration).sum();
        assert_abs_diff_eq!(total, 0.3, epsilon = 1e-14);
    }

    #[test]
    fn segment_durations_sum_to_horizon() {
        let table = Table::default_table();
        let mut rng = stream_rng(11, 0);
        let p0 = sample_mu(&table, &mut rng);
        let segs = flow_segments(&table, p0, 57.3).unwrap();
        let total: f64 = segs.iter().map(|s| s.duration).sum();
        assert_abs_diff_eq!(total, 57.3, epsilon = 1e-9);
        for w in segs.windows(2) {
            assert_abs_diff_eq!(w[0].t_end(), w[1].t_start, epsilon = 1e-12);
            let end = TorusPoint::from_vec(w[0].lifted_end());
            assert!(end.distance(w[1].start.q) < 1e-12);
        }
    }

    #[test]
    fn flow_rejects_nonpositive_horizon() {
        let table = Table::default_table();
        assert!(flow_segments(&table, pp(0.5, 0.0, 1.0, 0.0), 0.0).is_err());
    }
}
