use std::f64::consts::TAU;

use rand::Rng;

use super::{PhasePoint, Table};
use crate::geometry::{TorusPoint, UnitVector};
use crate::rng::stream_rng;

/// Draws from the normalized Lebesgue measure on `Q x S^1` and reports how
/// many position proposals were needed.
pub fn sample_mu_with_attempts<R: Rng + ?Sized>(table: &Table, rng: &mut R) -> (PhasePoint, u64) {
    let mut attempts = 0;
    let q = loop {
        attempts += 1;
        let q = TorusPoint::new(rng.random::<f64>(), rng.random::<f64>());
        if table.is_free(q) {
            break q;
        }
    };
    let v = UnitVector::from_angle(rng.random::<f64>() * TAU);
    (PhasePoint::new(q, v), attempts)
}

/// Position uniform on `Q` by rejection, direction uniform on the circle.
pub fn sample_mu<R: Rng + ?Sized>(table: &Table, rng: &mut R) -> PhasePoint {
    sample_mu_with_attempts(table, rng).0
}

pub fn sample_mu_seeded(table: &Table, seed: u64) -> PhasePoint {
    sample_mu(table, &mut stream_rng(seed, 0))
}
