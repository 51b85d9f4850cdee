//! Shrinking target balls and the marks of each visit.
//!
//! A target is a ball `B(q_j, r_j * eps)` in position space. Each inward
//! crossing of its boundary by the flow is an entry; the visit lasts until the
//! flow leaves the ball, reflections on `dQ` included.

use std::collections::VecDeque;
use std::f64::consts::PI;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::billiard::{sample_mu, BilliardFlow, PhasePoint, Segment, Table};
use crate::error::{Error, Result};
use crate::geometry::{TorusPoint, UnitVector, Vec2};
use crate::rng::trajectory_rng;

/// Entries whose `cos(phi_in)` falls below this are tangential and dropped.
pub const TANGENTIAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetKind {
    Interior,
    Boundary { obstacle_id: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    label: usize,
    center: TorusPoint,
    shape_radius: f64,
    kind: TargetKind,
    inward_normal: Vec2,
}

impl Target {
    pub fn interior(label: usize, center: TorusPoint, shape_radius: f64) -> Result<Self> {
        if !(shape_radius > 0.0 && shape_radius.is_finite()) {
            return Err(Error::InvalidTarget(format!("target {label}: radius must be positive")));
        }
        Ok(Self {
            label,
            center,
            shape_radius,
            kind: TargetKind::Interior,
            inward_normal: Vec2::ZERO,
        })
    }

    /// A target centred on the boundary of obstacle `obstacle_id`. `center`
    /// must lie on that circle to within 1e-12.
    pub fn boundary(
        label: usize,
        table: &Table,
        obstacle_id: usize,
        center: TorusPoint,
        shape_radius: f64,
    ) -> Result<Self> {
        let o = table
            .obstacle(obstacle_id)
            .ok_or_else(|| Error::InvalidTarget(format!("target {label}: no obstacle {obstacle_id}")))?;
        if !(shape_radius > 0.0 && shape_radius.is_finite()) {
            return Err(Error::InvalidTarget(format!("target {label}: radius must be positive")));
        }
        let offset = o.center.displacement_to(center);
        if (offset.norm() - o.radius).abs() > 1e-12 {
            return Err(Error::InvalidTarget(format!(
                "target {label}: centre is {} away from obstacle {obstacle_id}'s boundary",
                (offset.norm() - o.radius).abs()
            )));
        }
        Ok(Self {
            label,
            center,
            shape_radius,
            kind: TargetKind::Boundary { obstacle_id },
            inward_normal: offset * (1.0 / offset.norm()),
        })
    }

    /// Boundary target at polar angle `angle` on obstacle `obstacle_id`.
    pub fn boundary_at_angle(
        label: usize,
        table: &Table,
        obstacle_id: usize,
        angle: f64,
        shape_radius: f64,
    ) -> Result<Self> {
        let o = table
            .obstacle(obstacle_id)
            .ok_or_else(|| Error::InvalidTarget(format!("target {label}: no obstacle {obstacle_id}")))?;
        if !(shape_radius > 0.0 && shape_radius.is_finite()) {
            return Err(Error::InvalidTarget(format!("target {label}: radius must be positive")));
        }
        let normal = Vec2::new(angle.cos(), angle.sin());
        Ok(Self {
            label,
            center: TorusPoint::from_vec(o.center.as_vec() + normal * o.radius),
            shape_radius,
            kind: TargetKind::Boundary { obstacle_id },
            inward_normal: normal,
        })
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn center(&self) -> TorusPoint {
        self.center
    }

    pub fn shape_radius(&self) -> f64 {
        self.shape_radius
    }

    pub fn kind(&self) -> TargetKind {
        self.kind
    }

    /// Unit normal into `Q` for boundary targets, zero for interior ones.
    pub fn inward_normal(&self) -> Vec2 {
        self.inward_normal
    }

    /// 2 for interior targets, 1 for targets centred on `dQ`.
    pub fn d(&self) -> u32 {
        match self.kind {
            TargetKind::Interior => 2,
            TargetKind::Boundary { .. } => 1,
        }
    }

    pub fn is_interior(&self) -> bool {
        self.kind == TargetKind::Interior
    }

    /// Ball radius at scale `eps`.
    pub fn radius_at(&self, eps: f64) -> f64 {
        self.shape_radius * eps
    }
}

/// `d = sum_j d_j r_j`.
pub fn total_weight(targets: &[Target]) -> f64 {
    targets.iter().map(|t| t.d() as f64 * t.shape_radius).sum()
}

/// Checks that every ball at scale `eps_max` stays clear of foreign obstacles
/// (and of all obstacles for interior targets) and that balls are disjoint.
pub fn validate_targets(table: &Table, targets: &[Target], eps_max: f64) -> Result<()> {
    if !(eps_max > 0.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps_max} must be positive")));
    }
    for (i, t) in targets.iter().enumerate() {
        if targets[..i].iter().any(|o| o.label == t.label) {
            return Err(Error::InvalidTarget(format!("duplicate label {}", t.label)));
        }
        let rad = t.radius_at(eps_max);
        for (oid, o) in table.obstacles().iter().enumerate() {
            if t.kind == (TargetKind::Boundary { obstacle_id: oid }) {
                continue;
            }
            let clearance = o.center.distance(t.center) - o.radius;
            if clearance <= rad {
                return Err(Error::InvalidTarget(format!(
                    "target {}: ball of radius {rad} meets obstacle {oid} (clearance {clearance})",
                    t.label
                )));
            }
        }
    }
    for i in 0..targets.len() {
        for j in (i + 1)..targets.len() {
            let (a, b) = (&targets[i], &targets[j]);
            if a.center.distance(b.center) <= a.radius_at(eps_max) + b.radius_at(eps_max) {
                return Err(Error::OverlappingTargets(a.label, b.label));
            }
        }
    }
    Ok(())
}

/// Length of `dB(q_j, r_j eps)` lying in `Q`.
pub fn entrance_arc_length(table: &Table, target: &Target, eps: f64) -> f64 {
    let rad = target.radius_at(eps);
    match target.kind {
        TargetKind::Interior => 2.0 * PI * rad,
        TargetKind::Boundary { obstacle_id } => {
            let rho = table.obstacles()[obstacle_id].radius;
            // points of the small circle outside the obstacle satisfy
            // <n, e> > -rad / (2 rho)
            rad * (PI + 2.0 * (rad / (2.0 * rho)).asin())
        }
    }
}

/// Stationary rate of inward crossings per unit flow time. Under the
/// invariant measure the flux through a curve of length `l` in `Q` is
/// `l / (pi * Area(Q))`.
pub fn crossing_flux_rate(table: &Table, target: &Target, eps: f64) -> f64 {
    entrance_arc_length(table, target, eps) / (PI * table.area_q())
}

/// One visit of the flow to a target ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryEvent {
    /// Flow time of the entry.
    pub t: f64,
    pub label: usize,
    /// Entry point relative to the centre, divided by the ball radius.
    pub p: UnitVector,
    /// Velocity at entry.
    pub u: UnitVector,
    /// Flow time spent in the ball during this visit.
    pub duration: f64,
    /// Minimal distance to the centre during this visit.
    pub closest: f64,
    /// Signed angle from `-p` to `u`, in `(-pi/2, pi/2)`.
    pub phi_in: f64,
}

impl EntryEvent {
    pub fn p_angle(&self) -> f64 {
        self.p.angle()
    }

    pub fn u_angle(&self) -> f64 {
        self.u.angle()
    }
}

#[derive(Debug, Clone, Copy)]
struct OpenVisit {
    t: f64,
    p: UnitVector,
    u: UnitVector,
    phi_in: f64,
    duration: f64,
    closest: f64,
}

impl OpenVisit {
    fn finish(self, label: usize) -> EntryEvent {
        EntryEvent {
            t: self.t,
            label,
            p: self.p,
            u: self.u,
            duration: self.duration,
            closest: self.closest,
            phi_in: self.phi_in,
        }
    }
}

/// Lazily simulates the flow and yields entry events in time order. Entries
/// are detected up to `t_max`; the flow is continued past `t_max` until every
/// open visit has ended.
pub struct EntryStream<'a> {
    flow: BilliardFlow<'a>,
    targets: &'a [Target],
    radii: Vec<f64>,
    t_max: f64,
    open: Vec<Option<OpenVisit>>,
    ready: VecDeque<EntryEvent>,
    done: bool,
    tangential: u64,
}

impl<'a> EntryStream<'a> {
    pub fn new(table: &'a Table, targets: &'a [Target], eps: f64, p0: PhasePoint, t_max: f64) -> Result<Self> {
        validate_targets(table, targets, eps)?;
        if !(t_max > 0.0) {
            return Err(Error::InvalidParameter(format!("t_max = {t_max} must be positive")));
        }
        Ok(Self {
            flow: BilliardFlow::new(table, p0),
            targets,
            radii: targets.iter().map(|t| t.radius_at(eps)).collect(),
            t_max,
            open: vec![None; targets.len()],
            ready: VecDeque::new(),
            done: false,
            tangential: 0,
        })
    }

    /// Number of entries dropped as tangential.
    pub fn tangential_discards(&self) -> u64 {
        self.tangential
    }

    pub fn flow_time(&self) -> f64 {
        self.flow.time()
    }

    fn process(&mut self, seg: &Segment) {
        let origin = seg.start.q.as_vec();
        let dir = seg.start.v.as_vec();
        let len = seg.duration;
        let end = origin + dir * len;
        let mut closed = Vec::new();
        for (j, target) in self.targets.iter().enumerate() {
            let rad = self.radii[j];
            let c0 = target.center.as_vec();
            let r2 = rad * rad;
            let mut touched = false;
            let ix_lo = (origin.x.min(end.x) - rad - c0.x).floor() as i64;
            let ix_hi = (origin.x.max(end.x) + rad - c0.x).ceil() as i64;
            let iy_lo = (origin.y.min(end.y) - rad - c0.y).floor() as i64;
            let iy_hi = (origin.y.max(end.y) + rad - c0.y).ceil() as i64;
            for ix in ix_lo..=ix_hi {
                for iy in iy_lo..=iy_hi {
                    let c = Vec2::new(c0.x + ix as f64, c0.y + iy as f64);
                    let f = origin - c;
                    let b = f.dot(dir);
                    let cc = f.norm_sq() - r2;
                    let disc = b * b - cc;
                    if disc <= 0.0 {
                        continue;
                    }
                    let sq = disc.sqrt();
                    let (s1, s2) = if b < 0.0 {
                        let far = -b + sq;
                        (cc / far, far)
                    } else {
                        let near = -b - sq;
                        (near, cc / near)
                    };
                    let lo = s1.max(0.0);
                    let hi = s2.min(len);
                    if lo >= hi {
                        continue;
                    }
                    touched = true;
                    if s1 >= 0.0 {
                        if let Some(v) = self.open[j].take() {
                            closed.push(v.finish(target.label));
                        }
                        let t_entry = seg.t_start + s1;
                        let cos_in = sq / rad;
                        if t_entry >= self.t_max {
                            continue;
                        }
                        if cos_in < TANGENTIAL_TOL {
                            self.tangential += 1;
                            continue;
                        }
                        let p = UnitVector::from_vec(f + dir * s1).expect("entry point lies on the ball boundary");
                        let u = seg.start.v;
                        self.open[j] = Some(OpenVisit {
                            t: t_entry,
                            p,
                            u,
                            phi_in: p.neg().signed_angle_to(u),
                            duration: 0.0,
                            closest: f64::INFINITY,
                        });
                    }
                    if let Some(v) = self.open[j].as_mut() {
                        v.duration += hi - lo;
                        let s_star = (-b).clamp(lo, hi);
                        v.closest = v.closest.min((f + dir * s_star).norm());
                        if s2 <= len {
                            closed.push(self.open[j].take().unwrap().finish(target.label));
                        }
                    }
                }
            }
            if !touched {
                if let Some(v) = self.open[j].take() {
                    closed.push(v.finish(target.label));
                }
            }
        }
        closed.sort_by(|a, b| a.t.total_cmp(&b.t));
        self.ready.extend(closed);
    }
}

impl Iterator for EntryStream<'_> {
    type Item = Result<EntryEvent>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(e) = self.ready.pop_front() {
                return Some(Ok(e));
            }
            if self.done {
                return None;
            }
            if self.flow.time() >= self.t_max && self.open.iter().all(Option::is_none) {
                self.done = true;
                return None;
            }
            match self.flow.step() {
                Ok((seg, _)) => self.process(&seg),
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

/// All entries of the flow from `p0` into the target balls at scale `eps`
/// with entry time below `t_max`, ordered by time.
pub fn detect_entries(
    table: &Table,
    targets: &[Target],
    eps: f64,
    p0: PhasePoint,
    t_max: f64,
) -> Result<Vec<EntryEvent>> {
    EntryStream::new(table, targets, eps, p0, t_max)?.collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    /// Entries per unit flow time.
    pub rate: f64,
    pub std_err: f64,
    pub entries: u64,
    pub trajectories: usize,
    pub discarded: usize,
}

/// Monte Carlo entry rate over `n_samples` independent trajectories of flow
/// length `t_max`, started from the invariant measure. Trajectory `i` uses
/// stream `i` of `seed`.
pub fn entry_rate(
    table: &Table,
    target: &Target,
    eps: f64,
    n_samples: usize,
    t_max: f64,
    seed: u64,
) -> Result<RateEstimate> {
    if n_samples < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: n_samples,
        });
    }
    let targets = [*target];
    validate_targets(table, &targets, eps)?;
    let counts: Vec<Option<u64>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(seed, i as u64);
            let p0 = sample_mu(table, &mut rng);
            match detect_entries(table, &targets, eps, p0, t_max) {
                Ok(ev) => Some(ev.len() as u64),
                Err(e) => {
                    warn!("entry_rate: trajectory {i} discarded: {e}");
                    None
                }
            }
        })
        .collect();
    let kept: Vec<f64> = counts.iter().flatten().map(|&c| c as f64 / t_max).collect();
    let n = kept.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let mean = kept.iter().sum::<f64>() / n as f64;
    let var = kept.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    Ok(RateEstimate {
        rate: mean,
        std_err: (var / n as f64).sqrt(),
        entries: counts.iter().flatten().sum(),
        trajectories: n,
        discarded: n_samples - n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::billiard::Obstacle;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_3;

    fn open_table() -> Table {
        // a tiny obstacle far away keeps the middle of the cell free
        Table::with_free_path_bound(vec![Obstacle::new(0.0, 0.5, 0.05)], 50.0).unwrap()
    }

    fn start(x: f64, y: f64, angle: f64) -> PhasePoint {
        PhasePoint::new(TorusPoint::new(x, y), UnitVector::from_angle(angle))
    }

    #[test]
    fn diametral_crossing() {
        let table = open_table();
        let target = Target::interior(0, TorusPoint::new(0.5, 0.5), 1.0).unwrap();
        let eps = 0.01;
        let ev = detect_entries(&table, &[target], eps, start(0.3, 0.5, 0.0), 0.3).unwrap();
        assert_eq!(ev.len(), 1);
        let e = ev[0];
        assert_abs_diff_eq!(e.t, 0.2 - eps, epsilon = 1e-12);
        assert_abs_diff_eq!(e.duration, 2.0 * eps, epsilon = 1e-12);
        assert_abs_diff_eq!(e.closest, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.phi_in, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn oblique_crossing_at_sixty_degrees() {
        let table = open_table();
        let target = Target::interior(3, TorusPoint::new(0.5, 0.5), 2.0).unwrap();
        let eps = 0.01;
        let rad = 0.02;
        // enter at angle position pi + pi/3 ... build the chord from geometry:
        // entry point s = centre + rad * (-cos a, -sin a) rotated so that the
        // angle between -p and u is pi/3
        let p = UnitVector::from_angle(PI);
        let u = p.neg().rotate(FRAC_PI_3);
        let entry = Vec2::new(0.5, 0.5) + p.as_vec() * rad;
        let from = entry - u.as_vec() * 0.1;
        let ev = detect_entries(
            &table,
            &[target],
            eps,
            PhasePoint::new(TorusPoint::from_vec(from), u),
            0.5,
        )
        .unwrap();
        assert_eq!(ev.len(), 1);
        let e = ev[0];
        assert_eq!(e.label, 3);
        assert_abs_diff_eq!(e.phi_in, FRAC_PI_3, epsilon = 1e-9);
        assert_abs_diff_eq!(e.duration, 2.0 * rad * FRAC_PI_3.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(e.closest, rad * FRAC_PI_3.sin(), epsilon = 1e-12);
        assert_abs_diff_eq!(e.p.angle(), PI, epsilon = 1e-9);
    }

    #[test]
    fn missing_the_ball_gives_no_entry() {
        let table = open_table();
        let target = Target::interior(0, TorusPoint::new(0.5, 0.5), 1.0).unwrap();
        let ev = detect_entries(&table, &[target], 0.01, start(0.3, 0.52, 0.0), 0.4).unwrap();
        assert!(ev.is_empty());
    }

    #[test]
    fn starting_inside_is_not_an_entry() {
        let table = open_table();
        let target = Target::interior(0, TorusPoint::new(0.5, 0.5), 1.0).unwrap();
        let ev = detect_entries(&table, &[target], 0.01, start(0.5, 0.5, 0.0), 0.4).unwrap();
        assert!(ev.is_empty());
    }

    #[test]
    fn visit_straddling_horizon_is_completed() {
        let table = open_table();
        let target = Target::interior(0, TorusPoint::new(0.5, 0.5), 1.0).unwrap();
        let ev = detect_entries(&table, &[target], 0.01, start(0.3, 0.5, 0.0), 0.195).unwrap();
        assert_eq!(ev.len(), 1);
        assert_abs_diff_eq!(ev[0].duration, 0.02, epsilon = 1e-12);
    }

    #[test]
    fn overlapping_targets_rejected() {
        let table = open_table();
        let a = Target::interior(0, TorusPoint::new(0.5, 0.5), 1.0).unwrap();
        let b = Target::interior(1, TorusPoint::new(0.515, 0.5), 1.0).unwrap();
        let err = detect_entries(&table, &[a, b], 0.01, start(0.3, 0.2, 0.0), 1.0).unwrap_err();
        assert_eq!(err, Error::OverlappingTargets(0, 1));
    }

    #[test]
    fn interior_target_touching_obstacle_rejected() {
        let table = Table::default_table();
        let t = Target::interior(0, TorusPoint::new(0.5, 0.0), 1.0).unwrap();
        assert!(validate_targets(&table, &[t], 0.02).is_ok());
        assert!(validate_targets(&table, &[t], 0.06).is_err());
    }

    #[test]
    fn boundary_target_geometry() {
        let table = Table::default_table();
        let t = Target::boundary(1, &table, 1, TorusPoint::new(0.5, 0.25), 1.0).unwrap();
        assert_eq!(t.d(), 1);
        assert_abs_diff_eq!(t.inward_normal().x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.inward_normal().y, -1.0, epsilon = 1e-15);
        assert!(Target::boundary(1, &table, 1, TorusPoint::new(0.5, 0.2501), 1.0).is_err());
        let by_angle = Target::boundary_at_angle(1, &table, 1, -std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        assert!(by_angle.center().distance(t.center()) < 1e-15);
    }

    #[test]
    fn boundary_entry_reflects_inside_ball() {
        let table = Table::default_table();
        let target = Target::boundary(0, &table, 1, TorusPoint::new(0.5, 0.25), 1.0).unwrap();
        let eps = 0.01;
        // straight up into the bottom of the small disk, hitting it normally
        let ev = detect_entries(&table, &[target], eps, start(0.5, 0.1, std::f64::consts::FRAC_PI_2), 0.3).unwrap();
        assert_eq!(ev.len(), 1);
        let e = ev[0];
        assert_abs_diff_eq!(e.duration, 2.0 * eps, epsilon = 1e-12);
        assert_abs_diff_eq!(e.closest, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.p.uy(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn flux_rate_for_interior_target() {
        let table = Table::default_table();
        let t = Target::interior(0, TorusPoint::new(0.5, 0.0), 1.0).unwrap();
        assert_abs_diff_eq!(crossing_flux_rate(&table, &t, 0.01), 2.0 * 0.01 / table.area_q(), epsilon = 1e-15);
    }
}
