//! Tabular Q-learning over the discretized handover-point grid.

mod boundary;
mod environment;
mod learning;
mod train;

pub use boundary::{Boundary, BoxSpec, QState, FINE_STEP};
pub use environment::{Environment, Evaluation, LazyScores, PosturalSource, SweptScores};
pub use learning::{
    adapt_temperature, apply_action, q_update, reward, softmax_probabilities, softmax_select,
    symmetry_score, ActionValues, Hyperparams, QTable, TemperatureSchedule, ACTION_COUNT,
};
pub use train::{train, Budget, RunRecord, ScorePoint, StepBudget, TauPoint};
