//! Rapid Entire Body Assessment.
//!
//! Joint angles are banded into component scores, combined through the three
//! worksheet lookup tables, and adjusted for load, coupling and activity. The
//! postural score is `score_a + score_b`: the same quantities that feed
//! Table C, but without Table C's plateaus.
//!
//! Bands are half-open and lower-inclusive: an angle exactly on a band edge
//! scores the higher band (trunk flexion of exactly 20° scores 3).

use crate::error::ModelError;
use crate::geometry::{asin_deg, cos_deg, sin_deg};
use crate::skeleton::{ArmPose, Pose, Side};

/// Tolerance under which a trunk angle counts as exactly upright.
pub const UPRIGHT_TOLERANCE: f64 = 1e-9;
/// Lateral elevation of the upper arm at which it counts as abducted.
pub const ABDUCTION_THRESHOLD: f64 = 20.0;

/// Table A, indexed `[neck - 1][trunk - 1][legs - 1]`.
const TABLE_A: [[[u8; 4]; 5]; 3] = [
    [
        [1, 2, 3, 4],
        [2, 3, 4, 5],
        [2, 4, 5, 6],
        [3, 5, 6, 7],
        [4, 6, 7, 8],
    ],
    [
        [1, 2, 3, 4],
        [3, 4, 5, 6],
        [4, 5, 6, 7],
        [5, 6, 7, 8],
        [6, 7, 8, 9],
    ],
    [
        [3, 3, 5, 6],
        [4, 5, 6, 7],
        [5, 6, 7, 8],
        [6, 7, 8, 9],
        [7, 8, 9, 9],
    ],
];

/// Table B, indexed `[upper_arm - 1][lower_arm - 1][wrist - 1]`.
const TABLE_B: [[[u8; 3]; 2]; 6] = [
    [[1, 2, 2], [1, 2, 3]],
    [[1, 2, 3], [2, 3, 4]],
    [[3, 4, 5], [4, 5, 5]],
    [[4, 5, 5], [5, 6, 7]],
    [[6, 7, 8], [7, 8, 8]],
    [[7, 8, 8], [8, 9, 9]],
];

/// Table C, indexed `[score_a - 1][score_b - 1]`.
const TABLE_C: [[u8; 12]; 12] = [
    [1, 1, 1, 2, 3, 3, 4, 5, 6, 7, 7, 7],
    [1, 2, 2, 3, 4, 4, 5, 6, 6, 7, 7, 8],
    [2, 3, 3, 3, 4, 5, 6, 7, 7, 8, 8, 8],
    [3, 4, 4, 4, 5, 6, 7, 8, 8, 9, 9, 9],
    [4, 4, 4, 5, 6, 7, 8, 8, 9, 9, 9, 9],
    [6, 6, 6, 7, 8, 8, 9, 9, 10, 10, 10, 10],
    [7, 7, 7, 8, 9, 9, 9, 10, 10, 11, 11, 11],
    [8, 8, 8, 9, 10, 10, 10, 10, 10, 11, 11, 11],
    [9, 9, 9, 10, 10, 10, 11, 11, 11, 12, 12, 12],
    [10, 10, 10, 11, 11, 11, 11, 12, 12, 12, 12, 12],
    [11, 11, 11, 11, 12, 12, 12, 12, 12, 12, 12, 12],
    [12, 12, 12, 12, 12, 12, 12, 12, 12, 12, 12, 12],
];

fn in_range(v: u8, max: u8) -> Option<usize> {
    (1..=max).contains(&v).then(|| usize::from(v - 1))
}

/// Neck, trunk and legs into 1..=9. `None` when an index is out of range.
pub fn table_a(neck: u8, trunk: u8, legs: u8) -> Option<u8> {
    Some(TABLE_A[in_range(neck, 3)?][in_range(trunk, 5)?][in_range(legs, 4)?])
}

/// Upper arm, lower arm and wrist into 1..=9. `None` when an index is out of range.
pub fn table_b(upper_arm: u8, lower_arm: u8, wrist: u8) -> Option<u8> {
    Some(TABLE_B[in_range(upper_arm, 6)?][in_range(lower_arm, 2)?][in_range(wrist, 3)?])
}

/// Score A and score B into 1..=12. `None` when an index is out of range.
pub fn table_c(score_a: u8, score_b: u8) -> Option<u8> {
    Some(TABLE_C[in_range(score_a, 12)?][in_range(score_b, 12)?])
}

/// Trunk: 1 upright, 2 within 20° either way, 3 for 20–60° flexion or
/// 20°+ extension, 4 beyond 60° flexion; +1 when twisted or side bent.
pub fn band_trunk(flexion: f64, twisted_or_side: bool) -> u8 {
    let base = if flexion.abs() <= UPRIGHT_TOLERANCE {
        1
    } else if flexion > 0.0 {
        match flexion {
            f if f < 20.0 => 2,
            f if f < 60.0 => 3,
            _ => 4,
        }
    } else if -flexion < 20.0 {
        2
    } else {
        3
    };
    (base + u8::from(twisted_or_side)).min(5)
}

/// Neck: 1 for 0–20° flexion, 2 beyond or in extension; +1 when twisted or side bent.
pub fn band_neck(flexion: f64, twisted_or_side: bool) -> u8 {
    let base = if (0.0..20.0).contains(&flexion) { 1 } else { 2 };
    (base + u8::from(twisted_or_side)).min(3)
}

/// Legs: 1 with bilateral support, 2 otherwise; +1 for 30–60° knee flexion, +2 beyond.
pub fn band_legs(bilateral_support: bool, knee_flexion: f64) -> u8 {
    let base = if bilateral_support { 1 } else { 2 };
    let knee = match knee_flexion {
        k if k >= 60.0 => 2,
        k if k >= 30.0 => 1,
        _ => 0,
    };
    (base + knee).min(4)
}

/// Upper arm: 1 within ±20°, 2 for 20–45° flexion or 20°+ extension, 3 for
/// 45–90°, 4 beyond 90°; +1 abducted or rotated, +1 shoulder raised, -1 supported.
pub fn band_upper_arm(flexion: f64, abducted: bool, raised: bool, supported: bool) -> u8 {
    let base: i8 = match flexion {
        f if f < -20.0 => 2,
        f if f < 20.0 => 1,
        f if f < 45.0 => 2,
        f if f < 90.0 => 3,
        _ => 4,
    };
    let score = base + i8::from(abducted) + i8::from(raised) - i8::from(supported);
    score.clamp(1, 6) as u8
}

/// Lower arm: 1 for 60–100° elbow flexion, 2 otherwise.
pub fn band_lower_arm(elbow_flexion: f64) -> u8 {
    if (60.0..100.0).contains(&elbow_flexion) {
        1
    } else {
        2
    }
}

/// Wrist: 1 within 15° of neutral, 2 beyond; +1 when deviated or twisted.
pub fn band_wrist(flexion: f64, deviated: bool) -> u8 {
    let base = if flexion.abs() <= 15.0 { 1 } else { 2 };
    (base + u8::from(deviated)).min(3)
}

/// Lateral elevation of the upper arm out of the sagittal plane, outward positive.
pub fn upper_arm_lateral_elevation(arm: &ArmPose) -> f64 {
    asin_deg(cos_deg(arm.shoulder_flexion) * sin_deg(arm.shoulder_abduction))
}

/// Load/force, coupling and activity scores, each 0..=3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct TaskAdjustments {
    pub load: u8,
    pub coupling: u8,
    pub activity: u8,
}

impl TaskAdjustments {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, value) in [
            ("load", self.load),
            ("coupling", self.coupling),
            ("activity", self.activity),
        ] {
            if value > 3 {
                return Err(ModelError::InvalidAdjustment { field, value });
            }
        }
        Ok(())
    }
}

/// Per-arm component scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ArmScores {
    pub upper_arm: u8,
    pub lower_arm: u8,
    pub wrist: u8,
    pub table_b: u8,
}

/// Every intermediate of a REBA evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RebaBreakdown {
    pub trunk: u8,
    pub neck: u8,
    pub legs: u8,
    pub left: ArmScores,
    pub right: ArmScores,
    pub table_a: u8,
    pub score_a: u8,
    pub score_b: u8,
    pub table_c: u8,
    pub activity: u8,
    pub final_reba: u8,
    pub postural: u8,
}

impl RebaBreakdown {
    pub fn arm(&self, side: Side) -> &ArmScores {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

fn score_arm(arm: &ArmPose) -> ArmScores {
    let abducted = upper_arm_lateral_elevation(arm) >= ABDUCTION_THRESHOLD;
    let upper_arm = band_upper_arm(arm.shoulder_flexion, abducted, false, false);
    let lower_arm = band_lower_arm(arm.elbow_flexion);
    let wrist = band_wrist(arm.wrist_flexion, arm.wrist_deviated);
    let table_b = table_b(upper_arm, lower_arm, wrist).expect("bands are in range");
    ArmScores {
        upper_arm,
        lower_arm,
        wrist,
        table_b,
    }
}

/// Full REBA evaluation of a pose. Score B uses the worse arm.
pub fn score_pose(pose: &Pose, adj: &TaskAdjustments) -> RebaBreakdown {
    let twisted = pose.trunk_side.abs() > UPRIGHT_TOLERANCE || pose.trunk_twist.abs() > UPRIGHT_TOLERANCE;
    let trunk = band_trunk(pose.trunk_flexion, twisted);
    let neck = band_neck(pose.neck_flexion, pose.neck_twisted);
    let legs = band_legs(pose.bilateral_support, pose.knee_flexion);
    let left = score_arm(&pose.left);
    let right = score_arm(&pose.right);

    let table_a = table_a(neck, trunk, legs).expect("bands are in range");
    let load = adj.load.min(3);
    let coupling = adj.coupling.min(3);
    let activity = adj.activity.min(3);
    let score_a = table_a + load;
    let score_b = left.table_b.max(right.table_b) + coupling;
    let table_c = table_c(score_a, score_b).expect("scores are in range");

    RebaBreakdown {
        trunk,
        neck,
        legs,
        left,
        right,
        table_a,
        score_a,
        score_b,
        table_c,
        activity,
        final_reba: table_c + activity,
        postural: score_a + score_b,
    }
}
