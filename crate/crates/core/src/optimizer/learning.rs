//! Tabular Q-learning kernel: moves, Boltzmann selection, reward and update.

use alloc::collections::BTreeMap;

use rand::Rng;

use super::boundary::{Boundary, QState};
use crate::error::ModelError;
use crate::ik::HandTargets;

pub const ACTION_COUNT: usize = 6;

pub type ActionValues = [f64; ACTION_COUNT];

/// Moves one cell along a single axis: 0 → +x, 1 → -x, 2 → +y, 3 → -y,
/// 4 → +z, 5 → -z. Moves that would leave the grid keep the current cell.
pub fn apply_action(state: QState, action: usize, boundary: &Boundary) -> QState {
    let [nx, ny, nz] = boundary.dims();
    let QState { i, j, k } = state;
    let next = match action {
        0 if i + 1 < nx => QState::new(i + 1, j, k),
        1 if i > 0 => QState::new(i - 1, j, k),
        2 if j + 1 < ny => QState::new(i, j + 1, k),
        3 if j > 0 => QState::new(i, j - 1, k),
        4 if k + 1 < nz => QState::new(i, j, k + 1),
        5 if k > 0 => QState::new(i, j, k - 1),
        _ => state,
    };
    debug_assert!(action < ACTION_COUNT);
    next
}

/// Sparse action-value table; unvisited states read as all zeros.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QTable {
    values: BTreeMap<QState, ActionValues>,
}

impl QTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, s: QState) -> ActionValues {
        self.values.get(&s).copied().unwrap_or([0.0; ACTION_COUNT])
    }

    pub fn value(&self, s: QState, a: usize) -> f64 {
        self.get(s)[a]
    }

    pub fn set(&mut self, s: QState, a: usize, v: f64) {
        self.values.entry(s).or_insert([0.0; ACTION_COUNT])[a] = v;
    }

    pub fn max_value(&self, s: QState) -> f64 {
        self.get(s).into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Number of states with an allocated row.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `Q(s,a) ← (1 − α) Q(s,a) + α (r + γ max_a' Q(s',a'))`.
pub fn q_update(
    table: &mut QTable,
    s: QState,
    a: usize,
    reward: f64,
    s_next: QState,
    alpha: f64,
    gamma: f64,
) {
    let target = reward + gamma * table.max_value(s_next);
    let current = table.value(s, a);
    table.set(s, a, (1.0 - alpha) * current + alpha * target);
}

/// Boltzmann probabilities `exp(Q_i/τ) / Σ exp(Q_k/τ)`, max-shifted.
pub fn softmax_probabilities(q: &ActionValues, tau: f64) -> ActionValues {
    let max = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut p = [0.0; ACTION_COUNT];
    let mut total = 0.0;
    for (pi, qi) in p.iter_mut().zip(q) {
        *pi = libm::exp((qi - max) / tau);
        total += *pi;
    }
    for pi in &mut p {
        *pi /= total;
    }
    p
}

/// Samples an action from the Boltzmann distribution at temperature `tau`.
pub fn softmax_select<R: Rng + ?Sized>(q: &ActionValues, tau: f64, rng: &mut R) -> usize {
    let p = softmax_probabilities(q, tau);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (a, pa) in p.iter().enumerate() {
        acc += pa;
        if u < acc {
            return a;
        }
    }
    // Rounding left `acc` just under 1: take the last action with mass.
    p.iter().rposition(|pa| *pa > 0.0).unwrap_or(ACTION_COUNT - 1)
}

/// Lateral symmetry of the grasp midpoint about the body: 0 when centered,
/// -1 when offset by half a shoulder width, linear in between and beyond.
pub fn symmetry_score(targets: &HandTargets, body_center_x: f64, half_shoulder_width: f64) -> f64 {
    -(targets.midpoint().x - body_center_x).abs() / half_shoulder_width
}

/// `r = 1/E² + S` for postural score `E ≥ 2`.
pub fn reward(postural: u8, symmetry: f64) -> f64 {
    debug_assert!(postural >= 2);
    let e = f64::from(postural);
    1.0 / (e * e) + symmetry
}

/// Step-wise temperature schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TemperatureSchedule {
    pub step: f64,
    pub threshold: u8,
    pub min: f64,
    pub max: f64,
}

impl TemperatureSchedule {
    pub const DEFAULT_STEP: f64 = 0.1;
    pub const DEFAULT_THRESHOLD: u8 = 5;
    pub const DEFAULT_MIN: f64 = 0.05;

    /// Default schedule for an initial temperature: the ceiling is twice `tau0`.
    pub fn for_initial(tau0: f64) -> Self {
        Self {
            step: Self::DEFAULT_STEP,
            threshold: Self::DEFAULT_THRESHOLD,
            min: Self::DEFAULT_MIN,
            max: 2.0 * tau0,
        }
    }
}

/// Cools by one step when the score improves below the threshold, heats by
/// one step when it worsens, and otherwise holds.
pub fn adapt_temperature(tau: f64, prev: u8, new: u8, schedule: &TemperatureSchedule) -> f64 {
    if new < prev && new < schedule.threshold {
        (tau - schedule.step).max(schedule.min)
    } else if new > prev {
        (tau + schedule.step).min(schedule.max)
    } else {
        tau
    }
}

/// Learning hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Hyperparams {
    pub alpha: f64,
    pub gamma: f64,
    pub tau0: f64,
    pub schedule: TemperatureSchedule,
    /// Multiplier on the symmetry term of the reward.
    pub symmetry_weight: f64,
    /// Jump to a uniformly random cell every this many steps.
    pub restart_every: Option<u64>,
    /// Record the visited score and temperature every this many steps.
    pub trace_stride: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            gamma: 0.9,
            tau0: 1.0,
            schedule: TemperatureSchedule::for_initial(1.0),
            symmetry_weight: 1.0,
            restart_every: None,
            trace_stride: 1000,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |field, reason| Err(ModelError::InvalidConfig { field, reason });
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad("rl.alpha", "must lie in (0, 1]");
        }
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return bad("rl.gamma", "must lie in [0, 1)");
        }
        if !(self.tau0.is_finite() && self.tau0 > 0.0) {
            return bad("rl.tau0", "must be positive");
        }
        let s = &self.schedule;
        if !(s.step.is_finite() && s.step > 0.0) {
            return bad("rl.tau_step", "must be positive");
        }
        if !(s.min > 0.0 && s.min <= self.tau0 && self.tau0 <= s.max && s.max.is_finite()) {
            return bad("rl.tau_min", "need 0 < tau_min <= tau0 <= tau_max");
        }
        if !self.symmetry_weight.is_finite() {
            return bad("rl.symmetry_weight", "must be finite");
        }
        if self.restart_every == Some(0) {
            return bad("rl.restart_every", "must be positive when set");
        }
        if self.trace_stride == 0 {
            return bad("rl.trace_stride", "must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    fn grid() -> Boundary {
        Boundary::new(Vec3::ZERO, Vec3::new(0.2, 0.2, 0.2), 0.01).unwrap()
    }

    #[test]
    fn action_table() {
        let b = grid();
        let s = QState::new(10, 10, 10);
        assert_eq!(apply_action(s, 0, &b), QState::new(11, 10, 10));
        assert_eq!(apply_action(s, 1, &b), QState::new(9, 10, 10));
        assert_eq!(apply_action(s, 2, &b), QState::new(10, 11, 10));
        assert_eq!(apply_action(s, 3, &b), QState::new(10, 9, 10));
        assert_eq!(apply_action(s, 4, &b), QState::new(10, 10, 11));
        assert_eq!(apply_action(s, 5, &b), QState::new(10, 10, 9));
    }

    #[test]
    fn action_clamps_at_edges() {
        let b = grid();
        let top = QState::new(20, 0, 20);
        assert_eq!(apply_action(top, 0, &b), top);
        assert_eq!(apply_action(top, 3, &b), top);
        assert_eq!(apply_action(top, 4, &b), top);
    }

    #[test]
    fn softmax_known_values() {
        let p = softmax_probabilities(&[0.0; 6], 0.7);
        assert!(p.iter().all(|pi| (pi - 1.0 / 6.0).abs() < 1e-15));
        let p = softmax_probabilities(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0);
        let e = core::f64::consts::E;
        assert!((p[0] - e / (e + 5.0)).abs() < 1e-15);
        assert!((p[0] - 0.3521).abs() < 1e-4);
        let p = softmax_probabilities(&[0.3, 0.1, 0.0, 0.0, 0.2, 0.0], 1e-4);
        assert!((p[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reward_values() {
        assert_eq!(reward(4, 0.0), 0.0625);
        assert!((reward(7, 0.0) - 0.020408).abs() < 1e-6);
        assert!(reward(4, -0.3) > reward(7, -0.3));
    }

    #[test]
    fn update_examples() {
        let mut t = QTable::new();
        let (s, n) = (QState::new(1, 1, 1), QState::new(2, 1, 1));
        q_update(&mut t, s, 3, 1.0, n, 0.5, 0.9);
        assert_eq!(t.value(s, 3), 0.5);

        let mut t = QTable::new();
        t.set(s, 0, 0.25);
        q_update(&mut t, s, 0, 1.0, n, 0.0, 0.9);
        assert_eq!(t.value(s, 0), 0.25);

        q_update(&mut t, s, 0, 0.7, n, 1.0, 0.0);
        assert_eq!(t.value(s, 0), 0.7);
    }

    #[test]
    fn temperature_rule() {
        let sch = TemperatureSchedule::for_initial(1.0);
        assert!((adapt_temperature(1.0, 5, 4, &sch) - 0.9).abs() < 1e-15);
        assert!((adapt_temperature(1.0, 4, 6, &sch) - 1.1).abs() < 1e-15);
        assert_eq!(adapt_temperature(1.0, 6, 6, &sch), 1.0);
        // Improvement above the threshold does not cool.
        assert_eq!(adapt_temperature(1.0, 8, 7, &sch), 1.0);
        assert_eq!(adapt_temperature(0.05, 5, 4, &sch), 0.05);
        assert_eq!(adapt_temperature(2.0, 4, 9, &sch), 2.0);
    }

    #[test]
    fn symmetry_values() {
        let t = |mx: f64| HandTargets {
            left: Vec3::new(mx - 0.2, 1.0, 0.3),
            right: Vec3::new(mx + 0.2, 1.0, 0.3),
        };
        assert_eq!(symmetry_score(&t(0.0), 0.0, 0.25), 0.0);
        assert!((symmetry_score(&t(0.25), 0.0, 0.25) + 1.0).abs() < 1e-12);
        assert!(symmetry_score(&t(0.1), 0.0, 0.25) > symmetry_score(&t(-0.15), 0.0, 0.25));
    }

    #[test]
    fn hyperparam_validation() {
        assert!(Hyperparams::default().validate().is_ok());
        let h = Hyperparams { alpha: 0.0, ..Default::default() };
        assert!(h.validate().is_err());
        let h = Hyperparams { gamma: 1.0, ..Default::default() };
        assert!(h.validate().is_err());
        let h = Hyperparams { trace_stride: 0, ..Default::default() };
        assert!(h.validate().is_err());
    }
}
