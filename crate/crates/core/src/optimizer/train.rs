use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::boundary::QState;
use super::environment::{Environment, PosturalSource};
use super::learning::{adapt_temperature, apply_action, q_update, reward, softmax_select, Hyperparams, QTable};
use crate::error::ModelError;
use crate::geometry::Vec3;

/// Decides when a training run stops.
pub trait Budget {
    /// Called before every step with the number of steps already taken.
    fn exhausted(&mut self, steps: u64) -> bool;

    fn validate(&self) -> Result<(), ModelError> {
        Ok(())
    }
}

/// Stops after a fixed number of steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepBudget(pub u64);

impl Budget for StepBudget {
    fn exhausted(&mut self, steps: u64) -> bool {
        steps >= self.0
    }

    fn validate(&self) -> Result<(), ModelError> {
        if self.0 == 0 {
            return Err(ModelError::InvalidConfig {
                field: "rl.budget_steps",
                reason: "must be positive",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScorePoint {
    pub step: u64,
    pub postural: u8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TauPoint {
    pub step: u64,
    pub tau: f64,
}

/// Outcome of one training run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunRecord {
    pub seed: u64,
    pub fingerprint: u64,
    pub start: QState,
    pub steps: u64,
    pub best_postural: u8,
    pub best_cell: QState,
    /// Best handover midpoint in meters.
    pub best_position: Vec3,
    pub best_step: u64,
    pub final_tau: f64,
    pub visited_states: usize,
    /// Visited score sampled every `trace_stride` steps plus every improvement.
    pub score_trace: Vec<ScorePoint>,
    /// Best-so-far score at each improvement.
    pub best_trace: Vec<ScorePoint>,
    pub tau_trace: Vec<TauPoint>,
}

/// Single continuing Boltzmann walk over the grid, starting at `start` (the
/// grid center when `None`), until the budget runs out.
pub fn train<S, B>(
    env: &Environment,
    scores: &mut S,
    hyper: &Hyperparams,
    budget: &mut B,
    seed: u64,
    start: Option<QState>,
) -> Result<RunRecord, ModelError>
where
    S: PosturalSource + ?Sized,
    B: Budget + ?Sized,
{
    hyper.validate()?;
    budget.validate()?;
    let boundary = env.boundary();
    let start = start.unwrap_or_else(|| boundary.center());
    if !boundary.contains(start) {
        return Err(ModelError::InvalidConfig {
            field: "rl.start",
            reason: "start cell lies outside the boundary",
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = QTable::new();
    let mut tau = hyper.tau0;
    let mut state = start;
    let mut prev = scores.postural(state);
    let mut best = (prev, state, 0u64);

    let first = ScorePoint { step: 0, postural: prev };
    let mut score_trace = alloc::vec![first];
    let mut best_trace = alloc::vec![first];
    let mut tau_trace = alloc::vec![TauPoint { step: 0, tau }];

    let mut steps = 0u64;
    while !budget.exhausted(steps) {
        steps += 1;
        if hyper.restart_every.is_some_and(|n| steps.is_multiple_of(n)) {
            let idx = rng.random_range(0..boundary.cell_count());
            state = boundary.state_at(idx);
            prev = scores.postural(state);
        }

        let action = softmax_select(&table.get(state), tau, &mut rng);
        let next = apply_action(state, action, boundary);
        let postural = scores.postural(next);
        let r = reward(postural, hyper.symmetry_weight * env.symmetry(next));
        q_update(&mut table, state, action, r, next, hyper.alpha, hyper.gamma);
        tau = adapt_temperature(tau, prev, postural, &hyper.schedule);

        let improved = postural < best.0;
        if improved {
            best = (postural, next, steps);
            best_trace.push(ScorePoint { step: steps, postural });
        }
        if improved || steps.is_multiple_of(hyper.trace_stride) {
            score_trace.push(ScorePoint { step: steps, postural });
            tau_trace.push(TauPoint { step: steps, tau });
        }
        prev = postural;
        state = next;
    }

    let (best_postural, best_cell, best_step) = best;
    Ok(RunRecord {
        seed,
        fingerprint: env.fingerprint(),
        start,
        steps,
        best_postural,
        best_cell,
        best_position: boundary.position(best_cell),
        best_step,
        final_tau: tau,
        visited_states: table.len(),
        score_trace,
        best_trace,
        tau_trace,
    })
}
