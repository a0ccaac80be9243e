//! Bimanual reach solver.
//!
//! Each arm is a two-bone chain solved in closed form with the law of cosines.
//! When the hands cannot reach their targets from an upright stance the solver
//! recruits the trunk (flexion, then twist or side bend toward the targets) and
//! finally the knees, searching integer-degree grids in order of increasing
//! effort. The hand is kept as level as the wrist range allows so that side
//! handles are gripped with the fingers pointing forward.

use alloc::vec::Vec;

use crate::geometry::{acos_deg, asin_deg, atan2_deg, cos_deg, sin_deg, wrap_deg, Mat3, Vec3};
use crate::skeleton::{
    arm_rotation, forward_kinematics, lower_body, neutral_pose, plane_dir, shoulders,
    trunk_rotation, Anthropometry, ArmPose, Pose, Side, ELBOW_FLEXION_MAX,
};

/// Hand targets in the body-local frame.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HandTargets {
    pub left: Vec3,
    pub right: Vec3,
}

impl HandTargets {
    pub fn get(&self, side: Side) -> Vec3 {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    pub fn midpoint(&self) -> Vec3 {
        (self.left + self.right) * 0.5
    }

    /// Left hand to the right of the right hand.
    pub fn crossed(&self) -> bool {
        self.left.x > self.right.x
    }

    pub fn is_finite(&self) -> bool {
        self.left.is_finite() && self.right.is_finite()
    }

    pub fn mirrored(&self) -> HandTargets {
        HandTargets {
            left: self.right.mirror_x(),
            right: self.left.mirror_x(),
        }
    }
}

/// Shoulder and elbow angles of a two-bone solve, in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmAngles {
    pub shoulder_flexion: f64,
    pub shoulder_abduction: f64,
    pub elbow_flexion: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReachSolution {
    pub pose: Pose,
    pub reachable: bool,
    /// Distance between achieved and requested hand position, `[left, right]`.
    pub residual: [f64; 2],
}

const REACH_EPS: f64 = 1e-12;

/// Closed-form two-bone solve for a right arm (x pointing outward).
///
/// Returns `None` when the target lies outside the annulus
/// `[|upper - fore|, upper + fore]` around the shoulder.
pub fn two_bone_ik(shoulder: Vec3, target: Vec3, upper: f64, fore: f64) -> Option<ArmAngles> {
    let t = target - shoulder;
    let d = t.norm();
    if d > upper + fore + REACH_EPS || d < (upper - fore).abs() - REACH_EPS {
        return None;
    }
    let interior = acos_deg((upper * upper + fore * fore - d * d) / (2.0 * upper * fore));
    let elbow = 180.0 - interior;

    // Chain endpoint in the arm plane before shoulder rotation: (0, -r, s).
    let r = upper + fore * cos_deg(elbow);
    let s = fore * sin_deg(elbow);

    // Flexion brings the endpoint to the target's forward component, then
    // abduction swings the arm plane about the forward axis.
    let rho = libm::sqrt(t.x * t.x + t.y * t.y);
    let v_y = if t.y > 0.0 { rho } else { -rho };
    let flexion = wrap_deg(atan2_deg(s, -r) - atan2_deg(t.z, v_y));
    let abduction = if rho <= f64::EPSILON * d.max(1.0) {
        0.0
    } else {
        let sgn = v_y.signum();
        atan2_deg(-t.x * sgn, t.y * sgn)
    };
    Some(ArmAngles {
        shoulder_flexion: flexion,
        shoulder_abduction: abduction,
        elbow_flexion: elbow,
    })
}

/// Trunk and knee configuration tried by the cascade, in whole degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Stance {
    flexion: i16,
    side: i16,
    twist: i16,
    knee: i16,
}

impl Stance {
    const UPRIGHT: Stance = Stance {
        flexion: 0,
        side: 0,
        twist: 0,
        knee: 0,
    };

    fn trunk_effort(&self) -> u32 {
        u32::from(self.flexion.unsigned_abs())
            + u32::from(self.side.unsigned_abs())
            + u32::from(self.twist.unsigned_abs())
    }

    fn rotation(&self) -> Mat3 {
        trunk_rotation(
            f64::from(self.flexion),
            f64::from(self.side),
            f64::from(self.twist),
        )
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    stance: Stance,
    /// `[left, right]` shoulder joints in the body frame.
    shoulders: [Vec3; 2],
}

pub const TRUNK_FLEXION_RANGE: (i16, i16) = (-20, 90);
pub const TRUNK_TWIST_MAX: i16 = 45;
pub const TRUNK_SIDE_MAX: i16 = 30;
pub const KNEE_STEP: i16 = 5;
pub const KNEE_MAX: i16 = 150;
/// Wrist flexion/extension range used to level the hand.
pub const WRIST_LIMIT: f64 = 70.0;
/// Hand yaw out of the sagittal plane that counts as wrist deviation.
pub const WRIST_DEVIATION_THRESHOLD: f64 = 15.0;
const LEVEL_ITERATIONS: usize = 8;

/// Reusable solver with precomputed shoulder positions for every stance.
#[derive(Debug, Clone)]
pub struct ReachSolver {
    anthro: Anthropometry,
    reach_min: f64,
    reach_max: f64,
    upright: Candidate,
    flexion_only: Vec<Candidate>,
    /// Twist toward +x; the -x list is its exact mirror.
    twist: [Vec<Candidate>; 2],
    side: [Vec<Candidate>; 2],
    knees: Vec<Candidate>,
}

impl ReachSolver {
    pub fn new(anthro: &Anthropometry) -> Self {
        let anthro = *anthro;
        let fore = anthro.forearm + anthro.hand;
        let u = anthro.upper_arm;
        let reach_min = libm::sqrt(
            (u * u + fore * fore + 2.0 * u * fore * cos_deg(ELBOW_FLEXION_MAX)).max(0.0),
        );
        let reach_max = u + fore;
        let make = |stance: Stance| {
            let (hip_y, _, _) = lower_body(&anthro, f64::from(stance.knee));
            let (_, l, r) = shoulders(&anthro, &stance.rotation(), hip_y);
            Candidate {
                stance,
                shoulders: [l, r],
            }
        };
        let (fmin, fmax) = TRUNK_FLEXION_RANGE;

        let mut flexion_only = Vec::new();
        for m in 1..=fmax.max(-fmin) {
            if m <= fmax {
                flexion_only.push(make(Stance { flexion: m, ..Stance::UPRIGHT }));
            }
            if -m >= fmin {
                flexion_only.push(make(Stance { flexion: -m, ..Stance::UPRIGHT }));
            }
        }

        let lateral = |max: i16, twist: bool, sign: i16| {
            let mut stances = Vec::new();
            for lat in 1..=max {
                for flexion in fmin..=fmax {
                    let (side, tw) = if twist { (0, sign * lat) } else { (sign * lat, 0) };
                    stances.push(Stance {
                        flexion,
                        side,
                        twist: tw,
                        knee: 0,
                    });
                }
            }
            stances.sort_by_key(|s| (s.trunk_effort(), s.side.abs() + s.twist.abs(), s.flexion < 0));
            stances.into_iter().map(make).collect::<Vec<_>>()
        };

        let mut knees = Vec::new();
        for knee in (KNEE_STEP..=KNEE_MAX).step_by(KNEE_STEP as usize) {
            for flexion in 0..=fmax {
                knees.push(Stance {
                    flexion,
                    side: 0,
                    twist: 0,
                    knee,
                });
            }
        }
        knees.sort_by_key(|s| (s.trunk_effort() + s.knee as u32, s.knee));
        let knees = knees.into_iter().map(make).collect();

        ReachSolver {
            anthro,
            reach_min,
            reach_max,
            upright: make(Stance::UPRIGHT),
            flexion_only,
            twist: [lateral(TRUNK_TWIST_MAX, true, 1), lateral(TRUNK_TWIST_MAX, true, -1)],
            side: [lateral(TRUNK_SIDE_MAX, false, 1), lateral(TRUNK_SIDE_MAX, false, -1)],
            knees,
        }
    }

    pub fn anthropometry(&self) -> &Anthropometry {
        &self.anthro
    }

    /// Shortfall of both arms from the reachable shell, in meters.
    fn shortfall(&self, c: &Candidate, targets: &HandTargets) -> f64 {
        let mut total = 0.0;
        for (shoulder, target) in c.shoulders.iter().zip([targets.left, targets.right]) {
            let d = target.distance(*shoulder);
            total += (d - self.reach_max).max(0.0) + (self.reach_min - d).max(0.0);
        }
        total
    }

    /// Cascade search. Never fails: unreachable targets yield the pose with
    /// the least shortfall and `reachable = false`.
    pub fn solve(&self, targets: &HandTargets) -> ReachSolution {
        let mid = targets.midpoint();
        let lateral = if mid.x > 0.0 {
            Some(0)
        } else if mid.x < 0.0 {
            Some(1)
        } else {
            None
        };

        let mut stages: [&[Candidate]; 5] = [&[], &[], &[], &[], &[]];
        stages[0] = core::slice::from_ref(&self.upright);
        stages[1] = &self.flexion_only;
        if let Some(i) = lateral {
            stages[2] = &self.twist[i];
            stages[3] = &self.side[i];
        }
        if mid.y < self.anthro.hip_height {
            stages[4] = &self.knees;
        }

        let mut best: Option<(f64, u32, Candidate)> = None;
        for stage in stages {
            for c in stage {
                let short = self.shortfall(c, targets);
                if short == 0.0 {
                    return self.build(c, targets, true);
                }
                let effort = c.stance.trunk_effort();
                let better = match &best {
                    None => true,
                    Some((s, e, _)) => short < *s || (short == *s && effort < *e),
                };
                if better {
                    best = Some((short, effort, *c));
                }
            }
        }
        let (_, _, c) = best.expect("upright stance is always evaluated");
        self.build(&c, targets, false)
    }

    fn build(&self, c: &Candidate, targets: &HandTargets, reachable: bool) -> ReachSolution {
        let trunk = c.stance.rotation();
        let mut pose = neutral_pose();
        pose.trunk_flexion = f64::from(c.stance.flexion);
        pose.trunk_side = f64::from(c.stance.side);
        pose.trunk_twist = f64::from(c.stance.twist);
        pose.knee_flexion = f64::from(c.stance.knee);
        for (i, side) in Side::BOTH.into_iter().enumerate() {
            let local = trunk.tr_mul_vec(targets.get(side) - c.shoulders[i]);
            let canonical = match side {
                Side::Right => local,
                Side::Left => local.mirror_x(),
            };
            *pose.arm_mut(side) = self.level_arm(self.clamp_to_shell(canonical), &trunk, side);
        }
        let lm = forward_kinematics(&self.anthro, &pose).expect("solver poses are valid");
        let residual = [
            lm.hand_l.distance(targets.left),
            lm.hand_r.distance(targets.right),
        ];
        ReachSolution {
            pose,
            reachable,
            residual,
        }
    }

    /// Pulls an out-of-range target onto the reachable shell along its ray.
    fn clamp_to_shell(&self, t: Vec3) -> Vec3 {
        let d = t.norm();
        if d == 0.0 {
            return Vec3::new(0.0, 0.0, self.reach_min);
        }
        let clamped = d.clamp(self.reach_min, self.reach_max);
        if clamped == d {
            t
        } else {
            t * (clamped / d)
        }
    }

    /// Solves one arm for a given wrist flexion; `None` if the elbow would
    /// leave its range.
    fn solve_with_wrist(&self, t: Vec3, wrist: f64) -> Option<ArmPose> {
        let a = &self.anthro;
        let (f, h) = (a.forearm, a.hand);
        let virt = libm::sqrt(f * f + h * h + 2.0 * f * h * cos_deg(wrist));
        let offset = atan2_deg(h * sin_deg(wrist), f + h * cos_deg(wrist));
        let angles = two_bone_ik(Vec3::ZERO, t, a.upper_arm, virt)?;
        let elbow = angles.elbow_flexion - offset;
        if !(0.0..=ELBOW_FLEXION_MAX).contains(&elbow) {
            return None;
        }
        Some(ArmPose {
            shoulder_flexion: angles.shoulder_flexion,
            shoulder_abduction: angles.shoulder_abduction,
            elbow_flexion: elbow,
            wrist_flexion: wrist,
            wrist_deviated: false,
        })
    }

    fn hand_direction(arm: &ArmPose, trunk: &Mat3, side: Side) -> Vec3 {
        let local = arm_rotation(arm.shoulder_flexion, arm.shoulder_abduction)
            .mul_vec(plane_dir(arm.elbow_flexion + arm.wrist_flexion));
        let local = match side {
            Side::Right => local,
            Side::Left => local.mirror_x(),
        };
        trunk.mul_vec(local)
    }

    /// Iterates the wrist toward a level hand, keeping the hand on target.
    fn level_arm(&self, t: Vec3, trunk: &Mat3, side: Side) -> ArmPose {
        let mut arm = self
            .solve_with_wrist(t, 0.0)
            .or_else(|| {
                // Float edge of the shell: nudge inward.
                self.solve_with_wrist(t * (1.0 - 1e-12), 0.0)
            })
            .unwrap_or_default();
        for _ in 0..LEVEL_ITERATIONS {
            let pitch = asin_deg(Self::hand_direction(&arm, trunk, side).y);
            if pitch.abs() < 1e-9 {
                break;
            }
            let mut wrist = (arm.wrist_flexion - pitch).clamp(-WRIST_LIMIT, WRIST_LIMIT);
            let mut next = None;
            for _ in 0..8 {
                if let Some(s) = self.solve_with_wrist(t, wrist) {
                    next = Some(s);
                    break;
                }
                wrist *= 0.5;
            }
            match next {
                Some(s) if s != arm => arm = s,
                _ => break,
            }
        }
        let dir = Self::hand_direction(&arm, trunk, side);
        arm.wrist_deviated = asin_deg(dir.x.abs()) >= WRIST_DEVIATION_THRESHOLD;
        arm
    }
}

/// One-off cascade solve. Build a [`ReachSolver`] once for batches.
pub fn solve_reach(anthro: &Anthropometry, targets: &HandTargets) -> ReachSolution {
    ReachSolver::new(anthro).solve(targets)
}
