use alloc::vec;
use alloc::vec::Vec;

use super::boundary::{Boundary, BoxSpec, QState};
use super::learning::symmetry_score;
use crate::error::ModelError;
use crate::geometry::Vec3;
use crate::ik::{HandTargets, ReachSolution, ReachSolver};
use crate::reba::{score_pose, RebaBreakdown, TaskAdjustments};
use crate::skeleton::Anthropometry;

/// Everything needed to score a handover point.
#[derive(Debug, Clone)]
pub struct Environment {
    anthro: Anthropometry,
    boundary: Boundary,
    box_spec: BoxSpec,
    adjustments: TaskAdjustments,
    solver: ReachSolver,
}

/// Posture and scores at one handover point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub midpoint: Vec3,
    pub targets: HandTargets,
    pub reach: ReachSolution,
    pub reba: RebaBreakdown,
}

impl Environment {
    pub fn new(
        anthro: Anthropometry,
        boundary: Boundary,
        box_spec: BoxSpec,
        adjustments: TaskAdjustments,
    ) -> Result<Self, ModelError> {
        anthro.validate()?;
        adjustments.validate()?;
        BoxSpec::new(box_spec.handle_separation)?;
        Ok(Self {
            solver: ReachSolver::new(&anthro),
            anthro,
            boundary,
            box_spec,
            adjustments,
        })
    }

    pub fn anthropometry(&self) -> &Anthropometry {
        &self.anthro
    }

    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    pub fn box_spec(&self) -> &BoxSpec {
        &self.box_spec
    }

    pub fn adjustments(&self) -> &TaskAdjustments {
        &self.adjustments
    }

    pub fn evaluate_point(&self, midpoint: Vec3) -> Evaluation {
        let targets = self.box_spec.targets(midpoint);
        let reach = self.solver.solve(&targets);
        let reba = score_pose(&reach.pose, &self.adjustments);
        Evaluation {
            midpoint,
            targets,
            reach,
            reba,
        }
    }

    pub fn evaluate(&self, s: QState) -> Evaluation {
        self.evaluate_point(self.boundary.position(s))
    }

    pub fn postural(&self, s: QState) -> u8 {
        self.evaluate(s).reba.postural
    }

    /// Symmetry of the grasp midpoint at `s` about the body's sagittal plane.
    pub fn symmetry(&self, s: QState) -> f64 {
        let targets = self.box_spec.targets(self.boundary.position(s));
        symmetry_score(&targets, 0.0, self.anthro.shoulder_width * 0.5)
    }

    /// FNV-1a digest of every input that influences a score.
    pub fn fingerprint(&self) -> u64 {
        let a = &self.anthro;
        let b = &self.boundary;
        let floats = [
            a.height,
            a.shoulder_width,
            a.upper_arm,
            a.forearm,
            a.hand,
            a.trunk,
            a.neck,
            a.hip_height,
            a.knee_height,
            b.min.x,
            b.min.y,
            b.min.z,
            b.max.x,
            b.max.y,
            b.max.z,
            b.step,
            self.box_spec.handle_separation,
        ];
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |bytes: &[u8]| {
            for byte in bytes {
                h ^= u64::from(*byte);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for f in floats {
            feed(&f.to_bits().to_le_bytes());
        }
        let t = &self.adjustments;
        feed(&[t.load, t.coupling, t.activity]);
        h
    }
}

/// Postural score lookup used by the learner.
pub trait PosturalSource {
    fn postural(&mut self, s: QState) -> u8;
}

/// Scores computed on demand and memoized per cell.
#[derive(Debug, Clone)]
pub struct LazyScores<'a> {
    env: &'a Environment,
    memo: Vec<u8>,
}

impl<'a> LazyScores<'a> {
    pub fn new(env: &'a Environment) -> Self {
        Self {
            env,
            memo: vec![0; env.boundary().cell_count()],
        }
    }
}

impl PosturalSource for LazyScores<'_> {
    fn postural(&mut self, s: QState) -> u8 {
        let idx = self.env.boundary().linear_index(s);
        if self.memo[idx] == 0 {
            self.memo[idx] = self.env.postural(s);
        }
        self.memo[idx]
    }
}

/// Scores from a completed sweep, indexed by linear cell index.
#[derive(Debug, Clone, Copy)]
pub struct SweptScores<'a> {
    boundary: &'a Boundary,
    scores: &'a [u8],
}

impl<'a> SweptScores<'a> {
    pub fn new(boundary: &'a Boundary, scores: &'a [u8]) -> Result<Self, ModelError> {
        if scores.len() != boundary.cell_count() {
            return Err(ModelError::InvalidConfig {
                field: "scores",
                reason: "length differs from the boundary cell count",
            });
        }
        Ok(Self { boundary, scores })
    }
}

impl PosturalSource for SweptScores<'_> {
    fn postural(&mut self, s: QState) -> u8 {
        self.scores[self.boundary.linear_index(s)]
    }
}
