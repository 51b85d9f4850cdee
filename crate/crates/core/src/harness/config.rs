use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::billiard::{default_obstacles, Obstacle, Table};
use crate::error::{Error, Result};
use crate::geometry::TorusPoint;
use crate::targets::{crossing_flux_rate, total_weight, validate_targets, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExperimentId {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
    E8,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 8] = [
        ExperimentId::E1,
        ExperimentId::E2,
        ExperimentId::E3,
        ExperimentId::E4,
        ExperimentId::E5,
        ExperimentId::E6,
        ExperimentId::E7,
        ExperimentId::E8,
    ];

    pub fn title(self) -> &'static str {
        match self {
            ExperimentId::E1 => "poissonity",
            ExperimentId::E2 => "mark_law",
            ExperimentId::E3 => "committor",
            ExperimentId::E4 => "local_time",
            ExperimentId::E5 => "closest_approach",
            ExperimentId::E6 => "line_process",
            ExperimentId::E7 => "records",
            ExperimentId::E8 => "hazard_local_time",
        }
    }

    /// Experiments that run independent hitting trials instead of fixed-length
    /// trajectories.
    pub fn uses_trials(self) -> bool {
        matches!(self, ExperimentId::E3 | ExperimentId::E8)
    }

    pub fn uses_billiard(self) -> bool {
        self != ExperimentId::E7
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub obstacles: Vec<Obstacle>,
}

impl Default for TableSpec {
    fn default() -> Self {
        Self {
            obstacles: default_obstacles(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    Interior {
        center: TorusPoint,
        shape_radius: f64,
    },
    Boundary {
        obstacle_id: usize,
        center: TorusPoint,
        shape_radius: f64,
    },
}

impl TargetSpec {
    fn build(&self, label: usize, table: &Table) -> Result<Target> {
        match *self {
            TargetSpec::Interior { center, shape_radius } => Target::interior(label, center, shape_radius),
            TargetSpec::Boundary {
                obstacle_id,
                center,
                shape_radius,
            } => Target::boundary(label, table, obstacle_id, center, shape_radius),
        }
    }
}

/// Default targets: an interior ball at `(0.5, 0)` and a boundary ball at the
/// bottom of the small disk, both with shape radius 1.
pub fn default_targets() -> Vec<TargetSpec> {
    vec![
        TargetSpec::Interior {
            center: TorusPoint::new(0.5, 0.0),
            shape_radius: 1.0,
        },
        TargetSpec::Boundary {
            obstacle_id: 1,
            center: TorusPoint::new(0.5, 0.25),
            shape_radius: 1.0,
        },
    ]
}

/// Everything an experiment run depends on. Loaded from JSON; every field
/// has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentId>,
    pub table: TableSpec,
    /// Target `i` gets label `i`.
    pub targets: Vec<TargetSpec>,
    pub eps_schedule: Vec<f64>,
    pub n_trajectories: usize,
    /// Flow length of each trajectory.
    pub t_max: f64,
    /// Simulate one orbit of length `n_trajectories * t_max` in E1.
    pub long_orbit: bool,
    pub master_seed: u64,
    pub alpha: f64,
    pub output_dir: PathBuf,
    /// Threads for simulation; 0 uses all cores.
    pub worker_count: usize,
    pub min_events: u64,
    /// Window length for count tests, in the scaled clock.
    pub window: f64,
    pub n_trials: usize,
    /// Length of each hitting trial, in the scaled clock.
    pub trial_horizon: f64,
    /// Line-process windows have flow length `line_window / eps`.
    pub line_window: f64,
    pub oracle_samples: usize,
    pub record_replicas: usize,
    pub record_intensity: f64,
    pub record_horizon: f64,
    pub record_count_time: f64,
    pub max_record_rank: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            table: TableSpec::default(),
            targets: default_targets(),
            eps_schedule: vec![0.02, 0.01, 0.005],
            n_trajectories: 64,
            t_max: 3000.0,
            long_orbit: false,
            master_seed: 20240607,
            alpha: 0.01,
            output_dir: PathBuf::from("out"),
            worker_count: 0,
            min_events: 500,
            window: 10.0,
            n_trials: 5000,
            trial_horizon: 60.0,
            line_window: 0.25,
            oracle_samples: 20_000,
            record_replicas: 10_000,
            record_intensity: 1.0,
            record_horizon: 40.0,
            record_count_time: 5.0,
            max_record_rank: 20,
        }
    }
}

/// A config whose table, targets and schedule have been checked.
#[derive(Debug, Clone)]
pub struct Validated {
    pub config: ExperimentConfig,
    pub table: Table,
    pub targets: Vec<Target>,
}

impl Validated {
    pub fn eps_max(&self) -> f64 {
        self.config.eps_schedule.iter().copied().fold(0.0, f64::max)
    }

    /// Theorem clock `h_eps = d pi eps / Area(Q)` over all configured targets.
    pub fn h_eps(&self, eps: f64) -> f64 {
        total_weight(&self.targets) * std::f64::consts::PI * eps / self.table.area_q()
    }

    /// Expected number of entries into target `j` over all trajectories.
    pub fn expected_entries(&self, j: usize, eps: f64) -> f64 {
        crossing_flux_rate(&self.table, &self.targets[j], eps) * self.config.n_trajectories as f64 * self.config.t_max
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks the schedule, builds and certifies the table, builds the targets
    /// and checks their margins at the largest `eps`.
    pub fn validate(&self) -> Result<Validated> {
        if self.eps_schedule.is_empty() {
            return Err(Error::Config("eps_schedule is empty".into()));
        }
        if self.eps_schedule.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::Config("eps values must lie in (0, 1)".into()));
        }
        if self.eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("eps_schedule must be strictly decreasing".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha = {} outside (0, 1)", self.alpha)));
        }
        let positive = [
            ("t_max", self.t_max),
            ("window", self.window),
            ("trial_horizon", self.trial_horizon),
            ("line_window", self.line_window),
            ("record_intensity", self.record_intensity),
            ("record_horizon", self.record_horizon),
            ("record_count_time", self.record_count_time),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} = {v} must be positive")));
            }
        }
        if self.n_trajectories < 2 || self.n_trials < 2 || self.oracle_samples < 30 || self.record_replicas < 30 {
            return Err(Error::Config("sample counts are too small".into()));
        }
        if self.targets.is_empty() {
            return Err(Error::Config("no targets".into()));
        }
        let table = Table::new(self.table.obstacles.clone())?;
        let targets = self
            .targets
            .iter()
            .enumerate()
            .map(|(i, t)| t.build(i, &table))
            .collect::<Result<Vec<_>>>()?;
        let eps_max = self.eps_schedule[0];
        validate_targets(&table, &targets, eps_max)?;
        Ok(Validated {
            config: self.clone(),
            table,
            targets,
        })
    }
}
