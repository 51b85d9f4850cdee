//! Finite marked point sets and the functionals applied to them.
//!
//! A [`MarkedPointSet`] is one realization of a point process on
//! `[0, inf) x V`: a time-sorted list of `(t, mark)` with distinct times.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::UnitVector;
use crate::targets::EntryEvent;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkedPoint<M> {
    pub t: f64,
    pub mark: M,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkedPointSet<M> {
    points: Vec<MarkedPoint<M>>,
    ties_perturbed: usize,
}

impl<M> MarkedPointSet<M> {
    pub fn empty() -> Self {
        Self {
            points: Vec::new(),
            ties_perturbed: 0,
        }
    }

    /// Sorts by time (stably) and separates equal times by moving each later
    /// copy to the next representable float. The number of moved points is
    /// kept in [`ties_perturbed`](Self::ties_perturbed).
    pub fn from_points(mut points: Vec<MarkedPoint<M>>) -> Self {
        points.sort_by(|a, b| a.t.total_cmp(&b.t));
        let mut ties = 0;
        for i in 1..points.len() {
            if points[i].t <= points[i - 1].t {
                points[i].t = points[i - 1].t.next_up();
                ties += 1;
            }
        }
        Self {
            points,
            ties_perturbed: ties,
        }
    }

    pub fn points(&self) -> &[MarkedPoint<M>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ties_perturbed(&self) -> usize {
        self.ties_perturbed
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn marks(&self) -> impl Iterator<Item = &M> {
        self.points.iter().map(|p| &p.mark)
    }
}

/// Time and duration normalizations `h_eps` and `a_eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledClock {
    pub h_eps: f64,
    pub a_eps: f64,
}

impl ScaledClock {
    pub fn new(h_eps: f64, a_eps: f64) -> Result<Self> {
        if !(h_eps > 0.0 && h_eps.is_finite() && a_eps > 0.0 && a_eps.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "clock normalizations must be positive (h = {h_eps}, a = {a_eps})"
            )));
        }
        Ok(Self { h_eps, a_eps })
    }
}

/// Maps entries to points `(t * h_eps, select(entry, clock))`.
pub fn build_process<M, F>(entries: &[EntryEvent], clock: &ScaledClock, select: F) -> MarkedPointSet<M>
where
    F: Fn(&EntryEvent, &ScaledClock) -> M,
{
    MarkedPointSet::from_points(
        entries
            .iter()
            .map(|e| MarkedPoint {
                t: e.t * clock.h_eps,
                mark: select(e, clock),
            })
            .collect(),
    )
}

/// Local-time process: label and scaled duration `a_eps * D` of each visit.
pub fn local_time_process(entries: &[EntryEvent], clock: &ScaledClock) -> MarkedPointSet<(usize, f64)> {
    build_process(entries, clock, |e, c| (e.label, e.duration * c.a_eps))
}

/// Result of a hazard functional; `truncated` means no 0-labelled point was
/// observed, so the value only covers the observed window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hazard<T> {
    pub value: T,
    pub truncated: bool,
}

fn first_zero_time<M>(pp: &MarkedPointSet<M>, label: impl Fn(&M) -> usize) -> Option<f64> {
    pp.points.iter().find(|p| label(&p.mark) == 0).map(|p| p.t)
}

/// Number of 1-labelled points strictly before the first 0-labelled point.
pub fn hazard_count(pp: &MarkedPointSet<usize>) -> Hazard<u64> {
    let tau0 = first_zero_time(pp, |&m| m);
    let value = pp
        .points
        .iter()
        .filter(|p| p.mark == 1 && tau0.is_none_or(|t0| p.t < t0))
        .count() as u64;
    Hazard {
        value,
        truncated: tau0.is_none(),
    }
}

/// Total scaled duration of 1-labelled visits strictly before the first
/// 0-labelled point.
pub fn hazard_local_time(pp: &MarkedPointSet<(usize, f64)>) -> Hazard<f64> {
    let tau0 = first_zero_time(pp, |m| m.0);
    let value = pp
        .points
        .iter()
        .filter(|p| p.mark.0 == 1 && tau0.is_none_or(|t0| p.t < t0))
        .map(|p| p.mark.1)
        .sum();
    Hazard {
        value,
        truncated: tau0.is_none(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RecordDirection {
    /// Record when the mark is below every earlier mark.
    Min,
    /// Record when the mark is above every earlier mark.
    Max,
}

/// Times of records. The first point is always a record; equal marks never
/// make a record.
pub fn records_extract(pp: &MarkedPointSet<f64>, direction: RecordDirection) -> Vec<f64> {
    let mut best: Option<f64> = None;
    let mut times = Vec::new();
    for p in &pp.points {
        let is_record = match (best, direction) {
            (None, _) => true,
            (Some(b), RecordDirection::Min) => p.mark < b,
            (Some(b), RecordDirection::Max) => p.mark > b,
        };
        if is_record {
            best = Some(p.mark);
            times.push(p.t);
        }
    }
    times
}

/// A chord of the unit disk in normal form: the points `x` with
/// `x . (cos theta, sin theta) = r`, `theta` in `[0, pi)`, `r` in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Line {
    pub r: f64,
    pub theta: f64,
}

impl Line {
    pub fn normal(&self) -> UnitVector {
        UnitVector::from_angle(self.theta)
    }
}

/// Chord through `s` on the unit circle whose inward direction makes the
/// signed angle `phi` with the inward normal `-s`.
pub fn line_from_chord(s: UnitVector, phi: f64) -> Line {
    let dir = s.neg().rotate(phi);
    let n = dir.as_vec().perp();
    let mut theta = n.y.atan2(n.x);
    let mut r = s.as_vec().dot(n);
    if theta < 0.0 {
        theta += PI;
        r = -r;
    }
    if theta >= PI {
        theta -= PI;
        r = -r;
    }
    Line {
        r: r.clamp(-1.0, 1.0),
        theta,
    }
}

/// Line spanned by the entry chord of a visit to an interior target.
pub fn line_map(entry: &EntryEvent) -> Line {
    line_from_chord(entry.p, entry.phi_in)
}

/// Number of points in `[t0, t1)` whose mark satisfies `pred`.
pub fn count_in_window<M>(pp: &MarkedPointSet<M>, t0: f64, t1: f64, pred: impl Fn(&M) -> bool) -> usize {
    debug_assert!(t0 < t1);
    let lo = pp.points.partition_point(|p| p.t < t0);
    let hi = pp.points.partition_point(|p| p.t < t1);
    pp.points[lo..hi].iter().filter(|p| pred(&p.mark)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn labelled(points: &[(f64, usize)]) -> MarkedPointSet<usize> {
        MarkedPointSet::from_points(points.iter().map(|&(t, mark)| MarkedPoint { t, mark }).collect())
    }

    fn real(points: &[(f64, f64)]) -> MarkedPointSet<f64> {
        MarkedPointSet::from_points(points.iter().map(|&(t, mark)| MarkedPoint { t, mark }).collect())
    }

    fn entry(t: f64, duration: f64) -> EntryEvent {
        EntryEvent {
            t,
            label: 0,
            p: UnitVector::from_angle(0.0),
            u: UnitVector::from_angle(PI),
            duration,
            closest: 0.0,
            phi_in: 0.0,
        }
    }

    #[test]
    fn build_from_nothing() {
        let clock = ScaledClock::new(0.1, 1.0).unwrap();
        let pp = build_process(&[], &clock, |e, _| e.label);
        assert!(pp.is_empty());
    }

    #[test]
    fn build_scales_time() {
        let clock = ScaledClock::new(0.1, 1.0).unwrap();
        let pp = build_process(&[entry(10.0, 0.02)], &clock, |e, _| e.label);
        assert_eq!(pp.len(), 1);
        assert_abs_diff_eq!(pp.points()[0].t, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn local_time_marks_are_scaled_durations() {
        let clock = ScaledClock::new(0.1, 100.0).unwrap();
        let pp = local_time_process(&[entry(10.0, 0.02)], &clock);
        assert_abs_diff_eq!(pp.points()[0].mark.1, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn clock_must_be_positive() {
        assert!(ScaledClock::new(0.0, 1.0).is_err());
        assert!(ScaledClock::new(1.0, -1.0).is_err());
    }

    #[test]
    fn ties_are_separated_and_counted() {
        let pp = labelled(&[(1.0, 0), (1.0, 1), (0.5, 1)]);
        assert_eq!(pp.ties_perturbed(), 1);
        let t = pp.times();
        assert!(t[0] < t[1] && t[1] < t[2]);
        assert_eq!(pp.points()[1].mark, 0);
    }

    #[test]
    fn hazard_count_examples() {
        let h = hazard_count(&labelled(&[(0.3, 1), (0.5, 1), (0.9, 0), (1.2, 1)]));
        assert_eq!(h, Hazard { value: 2, truncated: false });
        assert_eq!(hazard_count(&labelled(&[(0.1, 0)])).value, 0);
        let h = hazard_count(&labelled(&[(0.1, 1), (0.2, 1)]));
        assert_eq!(h, Hazard { value: 2, truncated: true });
    }

    #[test]
    fn hazard_local_time_examples() {
        let pp = MarkedPointSet::from_points(vec![
            MarkedPoint { t: 0.2, mark: (1, 0.4) },
            MarkedPoint { t: 0.5, mark: (0, 0.7) },
        ]);
        assert_abs_diff_eq!(hazard_local_time(&pp).value, 0.4);
        let pp = MarkedPointSet::from_points(vec![MarkedPoint { t: 0.5, mark: (0, 0.7) }, MarkedPoint { t: 0.8, mark: (1, 0.3) }]);
        assert_eq!(hazard_local_time(&pp).value, 0.0);
    }

    #[test]
    fn records_examples() {
        let pp = real(&[(1.0, 0.9), (2.0, 0.5), (3.0, 0.7)]);
        assert_eq!(records_extract(&pp, RecordDirection::Min), vec![1.0, 2.0]);
        assert_eq!(records_extract(&pp, RecordDirection::Max), vec![1.0]);
        let decreasing = real(&[(1.0, 0.9), (2.0, 0.5), (3.0, 0.1)]);
        assert_eq!(records_extract(&decreasing, RecordDirection::Min).len(), 3);
        assert!(records_extract(&MarkedPointSet::empty(), RecordDirection::Min).is_empty());
    }

    #[test]
    fn line_map_diameters() {
        let l = line_from_chord(UnitVector::from_angle(0.0), 0.0);
        assert_abs_diff_eq!(l.r, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l.theta, PI / 2.0, epsilon = 1e-15);
        let l = line_from_chord(UnitVector::from_angle(PI / 2.0), 0.0);
        assert_abs_diff_eq!(l.r, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l.theta, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn line_map_oblique_chord_matches_perpendicular_foot() {
        // chord entering at s = (1, 0) at 45 degrees from the inward normal
        let s = UnitVector::from_angle(0.0);
        let l = line_from_chord(s, FRAC_PI_4);
        assert_abs_diff_eq!(l.r.abs(), FRAC_PI_4.sin(), epsilon = 1e-12);
        // foot of the perpendicular from the centre: s - <s, d> d
        let d = crate::geometry::Vec2::new(-FRAC_PI_4.cos(), -FRAC_PI_4.sin());
        let foot = s.as_vec() - d * s.as_vec().dot(d);
        let n = l.normal().as_vec();
        assert_abs_diff_eq!(foot.x, l.r * n.x, epsilon = 1e-12);
        assert_abs_diff_eq!(foot.y, l.r * n.y, epsilon = 1e-12);
    }

    #[test]
    fn window_counts() {
        let pp = labelled(&[(0.1, 0), (0.4, 1), (0.7, 1), (1.5, 0)]);
        assert_eq!(count_in_window(&MarkedPointSet::<usize>::empty(), 0.0, 1.0, |_| true), 0);
        assert_eq!(count_in_window(&pp, 0.0, 2.0, |_| true), 4);
        assert_eq!(count_in_window(&pp, 0.0, 2.0, |&m| m == 1), 2);
        assert_eq!(count_in_window(&pp, 0.4, 0.7, |_| true), 1);
    }

    fn brute_records(points: &[(f64, f64)]) -> Vec<f64> {
        let mut out = Vec::new();
        for &(ti, vi) in points {
            if points.iter().all(|&(tj, vj)| !(tj < ti) || vj > vi) {
                out.push(ti);
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    fn brute_hazard(points: &[(f64, usize)]) -> (u64, bool) {
        let tau0 = points.iter().filter(|p| p.1 == 0).map(|p| p.0).fold(f64::INFINITY, f64::min);
        let n = points.iter().filter(|p| p.1 == 1 && p.0 < tau0).count() as u64;
        (n, tau0.is_infinite())
    }

    proptest! {
        #[test]
        fn records_match_brute_force(
            raw in prop::collection::vec((0.0f64..100.0, 0.0f64..1.0), 0..200)
        ) {
            // distinct times and marks, as the functional requires
            let mut pts: Vec<(f64, f64)> = raw
                .iter()
                .enumerate()
                .map(|(i, &(t, v))| (t + i as f64 * 1e-9, v + i as f64 * 1e-12))
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let pp = real(&pts);
            prop_assert_eq!(pp.ties_perturbed(), 0);
            prop_assert_eq!(records_extract(&pp, RecordDirection::Min), brute_records(&pts));
        }

        #[test]
        fn hazard_matches_brute_force(
            raw in prop::collection::vec((0.0f64..10.0, 0usize..2), 0..100)
        ) {
            let pts: Vec<(f64, usize)> = raw.iter().enumerate().map(|(i, &(t, m))| (t + i as f64 * 1e-9, m)).collect();
            let pp = labelled(&pts);
            let h = hazard_count(&pp);
            prop_assert_eq!((h.value, h.truncated), brute_hazard(&pts));
        }

        #[test]
        fn build_process_preserves_points(times in prop::collection::vec(0.0f64..1e4, 0..300), h in 1e-4f64..10.0) {
            let entries: Vec<EntryEvent> = times.iter().map(|&t| entry(t, 0.01)).collect();
            let clock = ScaledClock::new(h, 1.0).unwrap();
            let pp = build_process(&entries, &clock, |e, _| e.t);
            prop_assert_eq!(pp.len(), entries.len());
            let mut src: Vec<f64> = times.clone();
            src.sort_by(f64::total_cmp);
            let mut got: Vec<f64> = pp.marks().copied().collect();
            got.sort_by(f64::total_cmp);
            prop_assert_eq!(src, got);
            for w in pp.points().windows(2) {
                prop_assert!(w[0].t < w[1].t);
            }
        }

        #[test]
        fn line_map_invariants(s_angle in 0.0f64..std::f64::consts::TAU, phi in (-FRAC_PI_2 + 1e-4)..(FRAC_PI_2 - 1e-4)) {
            let s = UnitVector::from_angle(s_angle);
            let l = line_from_chord(s, phi);
            prop_assert!((l.r.abs() - phi.sin().abs()).abs() < 1e-12);
            prop_assert!((0.0..PI).contains(&l.theta));
            // the chord passes through s
            prop_assert!((s.as_vec().dot(l.normal().as_vec()) - l.r).abs() < 1e-10);
        }

        #[test]
        fn window_counts_are_additive(times in prop::collection::vec(0.0f64..10.0, 0..200), cut in 0.01f64..9.99) {
            let pp = real(&times.iter().map(|&t| (t, 0.0)).collect::<Vec<_>>());
            let total = count_in_window(&pp, 0.0, 10.0, |_| true);
            let a = count_in_window(&pp, 0.0, cut, |_| true);
            let b = count_in_window(&pp, cut, 10.0, |_| true);
            prop_assert_eq!(a + b, total);
        }
    }
}
