//! Experiment configuration: a TOML file whose sections mirror the model
//! (`anthro`, `boundary`, `box`, `rl`, `task`, `compare`).
//!
//! ```toml
//! [anthro]
//! height = 1.80          # any omitted segment follows from height
//! # file = "worker.toml" # or read `key = value` lines from a separate file
//!
//! [boundary]
//! step = 0.02
//!
//! [rl]
//! runs = 10
//! budget_steps = 2000000
//! ```
//!
//! Dotted keys (`rl.alpha = 0.2`) at the top level are equivalent.

use std::fs;
use std::path::{Path, PathBuf};

use handover_core::optimizer::{Boundary, BoxSpec, Environment, Hyperparams, TemperatureSchedule};
use handover_core::reba::TaskAdjustments;
use handover_core::skeleton::{Anthropometry, PartialAnthropometry};
use handover_core::Vec3;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const DEFAULT_STEP: f64 = 0.02;
pub const DEFAULT_RUNS: usize = 10;
pub const DEFAULT_BUDGET_STEPS: u64 = 2_000_000;

/// Five start points outside the worker's reach, in meters.
pub const TABLE_STARTS: [[f64; 3]; 5] = [
    [0.028, 1.122, 1.354],
    [0.263, 1.122, 1.354],
    [-0.423, 1.122, 1.354],
    [0.028, 0.472, 0.6],
    [0.028, 2.292, 1.354],
];

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawAnthro {
    file: Option<PathBuf>,
    height: Option<f64>,
    shoulder_width: Option<f64>,
    upper_arm: Option<f64>,
    forearm: Option<f64>,
    hand: Option<f64>,
    trunk: Option<f64>,
    neck: Option<f64>,
    hip_height: Option<f64>,
    knee_height: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawBoundary {
    step: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawBox {
    handle_separation: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawRl {
    alpha: Option<f64>,
    gamma: Option<f64>,
    tau0: Option<f64>,
    tau_step: Option<f64>,
    tau_min: Option<f64>,
    tau_max: Option<f64>,
    score_threshold: Option<u8>,
    symmetry_weight: Option<f64>,
    restart_every: Option<u64>,
    trace_stride: Option<u64>,
    runs: Option<usize>,
    seeds: Option<Vec<u64>>,
    budget_steps: Option<u64>,
    budget_seconds: Option<f64>,
    start: Option<[f64; 3]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawCompare {
    starts: Option<Vec<[f64; 3]>>,
}

/// When a training run stops. With both limits set, whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetSpec {
    pub steps: Option<u64>,
    pub seconds: Option<f64>,
}

impl BudgetSpec {
    pub fn validate(&self) -> Result<()> {
        match (self.steps, self.seconds) {
            (None, None) => Err(HarnessError::config(
                "rl.budget_steps",
                "set budget_steps, budget_seconds or both",
            )),
            (Some(0), _) => Err(HarnessError::config("rl.budget_steps", "must be positive")),
            (_, Some(s)) if !(s.is_finite() && s > 0.0) => {
                Err(HarnessError::config("rl.budget_seconds", "must be finite and positive"))
            }
            _ => Ok(()),
        }
    }
}

/// Fully resolved and validated experiment settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub anthro: Anthropometry,
    pub step: f64,
    pub box_spec: BoxSpec,
    pub hyper: Hyperparams,
    pub adjustments: TaskAdjustments,
    pub seeds: Vec<u64>,
    pub budget: BudgetSpec,
    /// Training start in meters, snapped to the nearest cell.
    pub start: Option<Vec3>,
    pub compare_starts: Vec<Vec3>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::from_toml_str("", Path::new(".")).expect("defaults are valid")
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed_base: Option<u64>,
    pub budget_seconds: Option<f64>,
    pub budget_steps: Option<u64>,
    pub step: Option<f64>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

fn config_error(section: &str, e: impl std::fmt::Display) -> HarnessError {
    let msg = e.to_string();
    let msg = msg.trim();
    // serde names the offending key in "unknown field `x`" messages.
    let field = msg
        .split('`')
        .nth(1)
        .map(|f| format!("{section}.{f}"))
        .unwrap_or_else(|| section.to_string());
    HarnessError::config(field, msg.lines().last().unwrap_or(msg))
}

/// Deserializes one `[section]` of the file, defaulting when absent.
fn section<T: serde::de::DeserializeOwned + Default>(table: &toml::Table, name: &str) -> Result<T> {
    match table.get(name) {
        None => Ok(T::default()),
        Some(value) => value.clone().try_into().map_err(|e| config_error(name, e)),
    }
}

const SECTIONS: [&str; 6] = ["anthro", "boundary", "box", "rl", "task", "compare"];

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, dir)
    }

    /// Parses a config; relative `anthro.file` paths resolve against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e| config_error("config", e))?;
        if let Some(key) = table.keys().find(|k| !SECTIONS.contains(&k.as_str())) {
            return Err(HarnessError::config(key.as_str(), "unknown section"));
        }
        let raw_anthro: RawAnthro = section(&table, "anthro")?;
        let raw_boundary: RawBoundary = section(&table, "boundary")?;
        let raw_box: RawBox = section(&table, "box")?;
        let rl: RawRl = section(&table, "rl")?;
        let adjustments: TaskAdjustments = section(&table, "task")?;
        let raw_compare: RawCompare = section(&table, "compare")?;

        let anthro = resolve_anthro(&raw_anthro, base_dir)?;
        let step = raw_boundary.step.unwrap_or(DEFAULT_STEP);
        let box_spec = BoxSpec::new(
            raw_box
                .handle_separation
                .unwrap_or(BoxSpec::DEFAULT_HANDLE_SEPARATION),
        )?;

        let defaults = Hyperparams::default();
        let tau0 = rl.tau0.unwrap_or(defaults.tau0);
        let base_schedule = TemperatureSchedule::for_initial(tau0);
        let hyper = Hyperparams {
            alpha: rl.alpha.unwrap_or(defaults.alpha),
            gamma: rl.gamma.unwrap_or(defaults.gamma),
            tau0,
            schedule: TemperatureSchedule {
                step: rl.tau_step.unwrap_or(base_schedule.step),
                threshold: rl.score_threshold.unwrap_or(base_schedule.threshold),
                min: rl.tau_min.unwrap_or(base_schedule.min),
                max: rl.tau_max.unwrap_or(base_schedule.max),
            },
            symmetry_weight: rl.symmetry_weight.unwrap_or(defaults.symmetry_weight),
            restart_every: rl.restart_every,
            trace_stride: rl.trace_stride.unwrap_or(defaults.trace_stride),
        };

        let seeds = match (&rl.seeds, rl.runs) {
            (Some(seeds), Some(runs)) if seeds.len() != runs => {
                return Err(HarnessError::config(
                    "rl.seeds",
                    format!("{} seeds listed but rl.runs = {runs}", seeds.len()),
                ))
            }
            (Some(seeds), _) => seeds.clone(),
            (None, runs) => (0..runs.unwrap_or(DEFAULT_RUNS) as u64).collect(),
        };

        let budget = match (rl.budget_steps, rl.budget_seconds) {
            (None, None) => BudgetSpec {
                steps: Some(DEFAULT_BUDGET_STEPS),
                seconds: None,
            },
            (steps, seconds) => BudgetSpec { steps, seconds },
        };

        let compare_starts = raw_compare
            .starts
            .unwrap_or_else(|| TABLE_STARTS.to_vec())
            .into_iter()
            .map(|[x, y, z]| Vec3::new(x, y, z))
            .collect();

        let cfg = ExperimentConfig {
            anthro,
            step,
            box_spec,
            hyper,
            adjustments,
            seeds,
            budget,
            start: rl.start.map(|[x, y, z]| Vec3::new(x, y, z)),
            compare_starts,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_overrides(mut self, o: &Overrides) -> Result<Self> {
        if let Some(base) = o.seed_base {
            let n = self.seeds.len() as u64;
            self.seeds = (base..base + n).collect();
        }
        if o.budget_seconds.is_some() || o.budget_steps.is_some() {
            self.budget = BudgetSpec {
                steps: o.budget_steps,
                seconds: o.budget_seconds,
            };
        }
        if let Some(step) = o.step {
            self.step = step;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.anthro.validate()?;
        self.adjustments.validate()?;
        self.hyper.validate()?;
        self.budget.validate()?;
        if self.seeds.is_empty() {
            return Err(HarnessError::config("rl.runs", "at least one seed is required"));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(HarnessError::config("rl.seeds", "seeds must be distinct"));
        }
        let boundary = self.boundary()?;
        if let Some(p) = self.start {
            if !(p.is_finite() && boundary.contains_point(p)) {
                return Err(HarnessError::config("rl.start", "must lie inside the boundary"));
            }
        }
        if self.compare_starts.iter().any(|p| !p.is_finite()) {
            return Err(HarnessError::config("compare.starts", "coordinates must be finite"));
        }
        Ok(())
    }

    pub fn boundary(&self) -> Result<Boundary> {
        Ok(Boundary::from_anthropometry(&self.anthro, self.step)?)
    }

    pub fn environment(&self) -> Result<Environment> {
        Ok(Environment::new(
            self.anthro,
            self.boundary()?,
            self.box_spec,
            self.adjustments,
        )?)
    }
}

fn resolve_anthro(raw: &RawAnthro, base_dir: &Path) -> Result<Anthropometry> {
    let mut partial = match &raw.file {
        Some(file) => {
            let path = base_dir.join(file);
            let table: toml::Table = read(&path)?.parse().map_err(|e| config_error("anthro.file", e))?;
            toml::Value::Table(table)
                .try_into::<PartialAnthropometry>()
                .map_err(|e| config_error("anthro", e))?
        }
        None => PartialAnthropometry::default(),
    };
    // Keys set inline win over the referenced file.
    let inline = [
        (&mut partial.height, raw.height),
        (&mut partial.shoulder_width, raw.shoulder_width),
        (&mut partial.upper_arm, raw.upper_arm),
        (&mut partial.forearm, raw.forearm),
        (&mut partial.hand, raw.hand),
        (&mut partial.trunk, raw.trunk),
        (&mut partial.neck, raw.neck),
        (&mut partial.hip_height, raw.hip_height),
        (&mut partial.knee_height, raw.knee_height),
    ];
    for (slot, value) in inline {
        if value.is_some() {
            *slot = value;
        }
    }
    Ok(partial.resolve()?)
}
