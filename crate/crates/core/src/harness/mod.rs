//! Experiment orchestration: configuration, seeded parallel simulation, the
//! eight experiments and their CSV/JSON outputs.
//!
//! A [`Runner`] owns a validated config and a thread pool and caches the
//! simulated batches, so several experiments over the same config share
//! one simulation per `eps`.

mod config;
mod experiments;
mod output;
mod sim;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use serde::Serialize;

pub use config::{default_targets, ExperimentConfig, ExperimentId, TableSpec, TargetSpec, Validated};
pub use output::{Check, CountRow, EntryRow, ExperimentOutput, Metric, RecordRow};
pub use sim::{simulate_batch, simulate_trials, EntryBatch, Orbit, Trial, TrialBatch};

use crate::billiard::horizon_certificate;
use crate::billiard::{DEFAULT_PROBE_LEN, DEFAULT_SLOPE_BOUND};
use crate::error::{Error, Result};
use crate::targets::crossing_flux_rate;

type Cache<T> = Mutex<HashMap<u64, Arc<T>>>;

pub struct Runner {
    validated: Validated,
    pool: rayon::ThreadPool,
    batches: Cache<EntryBatch>,
    long_orbits: Cache<EntryBatch>,
    trials: Cache<TrialBatch>,
}

impl Runner {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        let validated = config.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.worker_count)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Ok(Self {
            validated,
            pool,
            batches: Mutex::new(HashMap::new()),
            long_orbits: Mutex::new(HashMap::new()),
            trials: Mutex::new(HashMap::new()),
        })
    }

    pub fn validated(&self) -> &Validated {
        &self.validated
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.validated.config
    }

    fn guard(&self, eps: f64, total_flow: f64) -> Result<()> {
        let v = &self.validated;
        for t in &v.targets {
            let expected = crossing_flux_rate(&v.table, t, eps) * total_flow;
            if expected < v.config.min_events as f64 {
                return Err(Error::Config(format!(
                    "eps = {eps}: about {expected:.0} entries expected into target {} over flow time {total_flow}, \
                     below min_events = {}; raise n_trajectories or t_max",
                    t.label(),
                    v.config.min_events
                )));
            }
        }
        Ok(())
    }

    fn cached<T>(&self, cache: &Cache<T>, eps: f64, make: impl FnOnce() -> Result<T>) -> Result<Arc<T>> {
        let key = eps.to_bits();
        if let Some(b) = cache.lock().expect("cache").get(&key) {
            return Ok(b.clone());
        }
        let b = Arc::new(make()?);
        cache.lock().expect("cache").insert(key, b.clone());
        Ok(b)
    }

    /// `n_trajectories` independent trajectories of flow length `t_max`.
    pub fn batch(&self, eps: f64) -> Result<Arc<EntryBatch>> {
        let c = self.config();
        self.guard(eps, c.n_trajectories as f64 * c.t_max)?;
        self.cached(&self.batches, eps, || {
            Ok(self.pool.install(|| simulate_batch(&self.validated, eps, c.n_trajectories, c.t_max)))
        })
    }

    /// One orbit of flow length `n_trajectories * t_max`.
    pub fn long_orbit(&self, eps: f64) -> Result<Arc<EntryBatch>> {
        let c = self.config();
        let total = c.n_trajectories as f64 * c.t_max;
        self.guard(eps, total)?;
        self.cached(&self.long_orbits, eps, || Ok(simulate_batch(&self.validated, eps, 1, total)))
    }

    /// `n_trials` hitting trials of scaled length `trial_horizon`.
    pub fn trials(&self, eps: f64) -> Result<Arc<TrialBatch>> {
        let c = self.config();
        if (c.n_trials as u64) < c.min_events {
            return Err(Error::Config(format!(
                "n_trials = {} is below min_events = {}",
                c.n_trials, c.min_events
            )));
        }
        let horizon = c.trial_horizon / self.validated.h_eps(eps);
        self.cached(&self.trials, eps, || {
            self.pool.install(|| simulate_trials(&self.validated, eps, c.n_trials, horizon))
        })
    }

    pub fn run(&self, id: ExperimentId) -> Result<ExperimentOutput> {
        self.pool.install(|| experiments::run(self, id))
    }
}

/// Runs one experiment and writes its outputs into `<output_dir>/<id>/`.
pub fn run(config: &ExperimentConfig, id: ExperimentId) -> Result<(ExperimentOutput, Vec<PathBuf>)> {
    let runner = Runner::new(config)?;
    let out = runner.run(id)?;
    let dir = config.output_dir.join(id.to_string().to_lowercase());
    let files = out.write(&dir)?;
    Ok((out, files))
}

#[derive(Debug, Clone, Serialize)]
pub struct TargetDiagnostics {
    pub label: usize,
    pub kind: String,
    pub d: u32,
    pub shape_radius: f64,
    pub clearance_at_eps_max: f64,
    /// Expected entries over all trajectories, one per `eps`.
    pub expected_entries: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub ok: bool,
    pub problems: Vec<String>,
    pub area_q: Option<f64>,
    pub boundary_length: Option<f64>,
    pub mean_free_path: Option<f64>,
    pub free_path_bound: Option<f64>,
    pub directions_checked: Option<usize>,
    pub max_probe_flight: Option<f64>,
    pub targets: Vec<TargetDiagnostics>,
}

/// Checks a config without running anything: table geometry and horizon
/// certificate, target margins, schedule, and the minimum-events guard.
pub fn validate(config: &ExperimentConfig) -> Diagnostics {
    let mut d = Diagnostics {
        ok: false,
        problems: Vec::new(),
        area_q: None,
        boundary_length: None,
        mean_free_path: None,
        free_path_bound: None,
        directions_checked: None,
        max_probe_flight: None,
        targets: Vec::new(),
    };
    let v = match config.validate() {
        Ok(v) => v,
        Err(e) => {
            d.problems.push(e.to_string());
            return d;
        }
    };
    d.area_q = Some(v.table.area_q());
    d.boundary_length = Some(v.table.boundary_length());
    d.mean_free_path = Some(v.table.mean_free_path());
    d.free_path_bound = Some(v.table.free_path_bound());
    if let Ok(cert) = horizon_certificate(&v.table, DEFAULT_SLOPE_BOUND, DEFAULT_PROBE_LEN) {
        d.directions_checked = Some(cert.directions_checked);
        d.max_probe_flight = Some(cert.max_probe_flight);
    }
    let eps_max = v.eps_max();
    for (j, t) in v.targets.iter().enumerate() {
        let clearance = v
            .table
            .obstacles()
            .iter()
            .enumerate()
            .filter(|(i, _)| !matches!(t.kind(), crate::targets::TargetKind::Boundary { obstacle_id } if obstacle_id == *i))
            .map(|(_, o)| o.center.distance(t.center()) - o.radius - t.radius_at(eps_max))
            .fold(f64::INFINITY, f64::min);
        let expected: Vec<f64> = config.eps_schedule.iter().map(|&e| v.expected_entries(j, e)).collect();
        for (&e, &n) in config.eps_schedule.iter().zip(&expected) {
            if n < config.min_events as f64 {
                d.problems.push(format!(
                    "eps = {e}: about {n:.0} entries expected into target {j}, below min_events = {}",
                    config.min_events
                ));
            }
        }
        d.targets.push(TargetDiagnostics {
            label: j,
            kind: if t.is_interior() { "interior".into() } else { "boundary".into() },
            d: t.d(),
            shape_radius: t.shape_radius(),
            clearance_at_eps_max: clearance,
            expected_entries: expected,
        });
    }
    if (config.n_trials as u64) < config.min_events {
        d.problems.push(format!("n_trials = {} is below min_events = {}", config.n_trials, config.min_events));
    }
    d.ok = d.problems.is_empty();
    d
}
