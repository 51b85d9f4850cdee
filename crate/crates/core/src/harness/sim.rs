use log::warn;
use rayon::prelude::*;

use super::config::Validated;
use crate::billiard::sample_mu;
use crate::error::{Error, Result};
use crate::process::{build_process, MarkedPointSet, ScaledClock};
use crate::rng::{trajectory_rng, trial_rng};
use crate::targets::{EntryEvent, EntryStream, RateEstimate, Target};

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub traj_id: usize,
    pub entries: Vec<EntryEvent>,
    pub tangential: u64,
}

/// Entries of `n` independent trajectories of flow length `t_max` at one `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryBatch {
    pub eps: f64,
    pub t_max: f64,
    pub orbits: Vec<Orbit>,
    pub discarded: Vec<usize>,
}

impl EntryBatch {
    pub fn entries(&self, label: usize) -> impl Iterator<Item = &EntryEvent> {
        self.orbits
            .iter()
            .flat_map(|o| o.entries.iter())
            .filter(move |e| e.label == label)
    }

    pub fn count(&self, label: usize) -> usize {
        self.entries(label).count()
    }

    /// One point set per orbit, times scaled by `clock`, restricted to
    /// `label` when given.
    pub fn processes(&self, label: Option<usize>, clock: &ScaledClock) -> Vec<MarkedPointSet<EntryEvent>> {
        self.orbits
            .iter()
            .map(|o| {
                let picked: Vec<EntryEvent> = o
                    .entries
                    .iter()
                    .filter(|e| label.is_none_or(|j| e.label == j))
                    .cloned()
                    .collect();
                build_process(&picked, clock, |e, _| *e)
            })
            .collect()
    }

    /// Entries of `label` per unit flow time, with the standard error across
    /// trajectories.
    pub fn rate(&self, label: usize) -> Result<RateEstimate> {
        let per: Vec<f64> = self
            .orbits
            .iter()
            .map(|o| o.entries.iter().filter(|e| e.label == label).count() as f64 / self.t_max)
            .collect();
        let n = per.len();
        if n < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: n });
        }
        let mean = per.iter().sum::<f64>() / n as f64;
        let var = per.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        Ok(RateEstimate {
            rate: mean,
            std_err: (var / n as f64).sqrt(),
            entries: self.count(label) as u64,
            trajectories: n,
            discarded: self.discarded.len(),
        })
    }
}

pub fn simulate_batch(v: &Validated, eps: f64, n: usize, t_max: f64) -> EntryBatch {
    let results: Vec<std::result::Result<Orbit, usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(v.config.master_seed, i as u64);
            let p0 = sample_mu(&v.table, &mut rng);
            let run = || -> Result<Orbit> {
                let mut stream = EntryStream::new(&v.table, &v.targets, eps, p0, t_max)?;
                let entries = stream.by_ref().collect::<Result<Vec<_>>>()?;
                Ok(Orbit {
                    traj_id: i,
                    entries,
                    tangential: stream.tangential_discards(),
                })
            };
            run().map_err(|e| {
                warn!("eps = {eps}: trajectory {i} discarded: {e}");
                i
            })
        })
        .collect();
    let mut orbits = Vec::new();
    let mut discarded = Vec::new();
    for r in results {
        match r {
            Ok(o) => orbits.push(o),
            Err(i) => discarded.push(i),
        }
    }
    EntryBatch {
        eps,
        t_max,
        orbits,
        discarded,
    }
}

/// A trajectory followed until it has entered both of the first two targets,
/// or until its horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub traj_id: usize,
    pub entries: Vec<EntryEvent>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialBatch {
    pub eps: f64,
    pub horizon: f64,
    pub trials: Vec<Trial>,
    pub discarded: Vec<usize>,
}

impl TrialBatch {
    pub fn processes<M>(&self, clock: &ScaledClock, mark: impl Fn(&EntryEvent, &ScaledClock) -> M + Copy) -> Vec<MarkedPointSet<M>> {
        self.trials.iter().map(|t| build_process(&t.entries, clock, mark)).collect()
    }
}

pub fn simulate_trials(v: &Validated, eps: f64, n: usize, horizon: f64) -> Result<TrialBatch> {
    if v.targets.len() < 2 {
        return Err(Error::Config("hitting trials need at least two targets".into()));
    }
    let pair: [Target; 2] = [v.targets[0], v.targets[1]];
    let results: Vec<std::result::Result<Trial, usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(v.config.master_seed, i as u64);
            let p0 = sample_mu(&v.table, &mut rng);
            let run = || -> Result<Trial> {
                let mut seen = [false; 2];
                let mut entries = Vec::new();
                for e in EntryStream::new(&v.table, &pair, eps, p0, horizon)? {
                    let e = e?;
                    seen[e.label] = true;
                    entries.push(e);
                    if seen[0] && seen[1] {
                        break;
                    }
                }
                Ok(Trial { traj_id: i, entries })
            };
            run().map_err(|e| {
                warn!("eps = {eps}: trial {i} discarded: {e}");
                i
            })
        })
        .collect();
    let mut trials = Vec::new();
    let mut discarded = Vec::new();
    for r in results {
        match r {
            Ok(t) => trials.push(t),
            Err(i) => discarded.push(i),
        }
    }
    Ok(TrialBatch {
        eps,
        horizon,
        trials,
        discarded,
    })
}
