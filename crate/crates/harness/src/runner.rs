//! Parallel sweeps and multi-seed training.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use handover_core::optimizer::{
    train, Budget, Environment, Hyperparams, LazyScores, QState, RunRecord, SweptScores,
};
use handover_core::oracle::{score_cells, SweepReport};
use handover_core::ModelError;

use crate::config::BudgetSpec;

/// Step and/or wall-clock limit for one run.
#[derive(Debug, Clone, Copy)]
pub struct RunBudget {
    steps: Option<u64>,
    deadline: Option<Instant>,
}

impl RunBudget {
    /// The clock starts now.
    pub fn start(spec: &BudgetSpec) -> Self {
        Self {
            steps: spec.steps,
            deadline: spec
                .seconds
                .map(|s| Instant::now() + Duration::from_secs_f64(s)),
        }
    }
}

impl Budget for RunBudget {
    fn exhausted(&mut self, steps: u64) -> bool {
        if self.steps.is_some_and(|max| steps >= max) {
            return true;
        }
        // Reading the clock every step would dominate short steps.
        steps.is_multiple_of(256) && self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn validate(&self) -> Result<(), ModelError> {
        match self.steps {
            Some(0) => Err(ModelError::InvalidConfig {
                field: "rl.budget_steps",
                reason: "must be positive",
            }),
            None if self.deadline.is_none() => Err(ModelError::InvalidConfig {
                field: "rl.budget_steps",
                reason: "no step or time limit set",
            }),
            _ => Ok(()),
        }
    }
}

pub fn default_workers() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

/// Scores every cell using `workers` threads over contiguous index ranges.
/// The result does not depend on the worker count.
pub fn parallel_sweep(env: &Environment, workers: usize) -> Result<(SweepReport, Vec<u8>), ModelError> {
    let started = Instant::now();
    let n = env.boundary().cell_count();
    let workers = workers.clamp(1, n.max(1));
    let chunk = n.div_ceil(workers);
    let mut scores = Vec::with_capacity(n);
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let range = (w * chunk).min(n)..((w + 1) * chunk).min(n);
                scope.spawn(move || score_cells(env, range))
            })
            .collect();
        for h in handles {
            scores.extend(h.join().expect("sweep worker panicked"));
        }
    });
    let report = SweepReport::from_scores(env, &scores, started.elapsed().as_secs_f64())?;
    Ok((report, scores))
}

/// Where a run reads postural scores from.
#[derive(Debug, Clone, Copy)]
pub enum ScoreSource<'a> {
    /// Evaluate cells on first visit.
    Lazy,
    /// Look up a completed sweep.
    Swept(&'a [u8]),
}

/// One run per seed, up to `workers` at a time; records come back in seed order.
pub fn train_seeds(
    env: &Environment,
    hyper: &Hyperparams,
    budget: &BudgetSpec,
    seeds: &[u64],
    start: Option<QState>,
    source: ScoreSource<'_>,
    workers: usize,
) -> Result<Vec<RunRecord>, ModelError> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<RunRecord, ModelError>>>> =
        Mutex::new(vec![None; seeds.len()]);
    let one = |seed: u64| {
        let mut budget = RunBudget::start(budget);
        match source {
            ScoreSource::Lazy => {
                let mut scores = LazyScores::new(env);
                train(env, &mut scores, hyper, &mut budget, seed, start)
            }
            ScoreSource::Swept(s) => {
                let mut scores = SweptScores::new(env.boundary(), s)?;
                train(env, &mut scores, hyper, &mut budget, seed, start)
            }
        }
    };
    thread::scope(|scope| {
        for _ in 0..workers.clamp(1, seeds.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&seed) = seeds.get(i) else { break };
                let record = one(seed);
                results.lock().expect("result slot poisoned")[i] = Some(record);
            });
        }
    });
    results
        .into_inner()
        .expect("result slot poisoned")
        .into_iter()
        .map(|r| r.expect("every seed ran"))
        .collect()
}
