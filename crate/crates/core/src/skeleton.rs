//! Parametric humanoid: anthropometry, joint-angle pose and forward kinematics.
//!
//! Landmarks are expressed in the body-local frame whose origin lies on the
//! floor directly below the hip center (x lateral right, y up, z forward).
//! All angles are in degrees.

use crate::error::ModelError;
use crate::geometry::{cos_deg, sin_deg, Mat3, Vec3};

/// Body dimensions in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Anthropometry {
    pub height: f64,
    pub shoulder_width: f64,
    pub upper_arm: f64,
    pub forearm: f64,
    pub hand: f64,
    /// Hip center to the shoulder line.
    pub trunk: f64,
    pub neck: f64,
    pub hip_height: f64,
    pub knee_height: f64,
}

/// Anthropometry with optional fields; missing ones come from segment ratios.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PartialAnthropometry {
    pub height: Option<f64>,
    pub shoulder_width: Option<f64>,
    pub upper_arm: Option<f64>,
    pub forearm: Option<f64>,
    pub hand: Option<f64>,
    pub trunk: Option<f64>,
    pub neck: Option<f64>,
    pub hip_height: Option<f64>,
    pub knee_height: Option<f64>,
}

impl Anthropometry {
    pub const DEFAULT_HEIGHT: f64 = 1.75;

    // Segment lengths as fractions of stature.
    pub const SHOULDER_WIDTH_RATIO: f64 = 0.259;
    pub const UPPER_ARM_RATIO: f64 = 0.186;
    pub const FOREARM_RATIO: f64 = 0.146;
    pub const HAND_RATIO: f64 = 0.108;
    pub const TRUNK_RATIO: f64 = 0.288;
    pub const NECK_RATIO: f64 = 0.052;
    pub const HIP_HEIGHT_RATIO: f64 = 0.530;
    pub const KNEE_HEIGHT_RATIO: f64 = 0.285;

    /// Every segment derived from stature.
    pub fn from_height(height: f64) -> Result<Self, ModelError> {
        PartialAnthropometry {
            height: Some(height),
            ..Default::default()
        }
        .resolve()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("height", self.height),
            ("shoulder_width", self.shoulder_width),
            ("upper_arm", self.upper_arm),
            ("forearm", self.forearm),
            ("hand", self.hand),
            ("trunk", self.trunk),
            ("neck", self.neck),
            ("hip_height", self.hip_height),
            ("knee_height", self.knee_height),
        ];
        for (field, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::InvalidAnthropometry {
                    field,
                    reason: "must be finite and strictly positive",
                });
            }
        }
        if self.knee_height >= self.hip_height {
            return Err(ModelError::InvalidAnthropometry {
                field: "knee_height",
                reason: "must be below hip_height",
            });
        }
        if self.hip_height >= self.height {
            return Err(ModelError::InvalidAnthropometry {
                field: "hip_height",
                reason: "must be below height",
            });
        }
        if self.arm_reach() >= self.height {
            return Err(ModelError::InvalidAnthropometry {
                field: "upper_arm",
                reason: "upper_arm + forearm + hand must be below height",
            });
        }
        if self.head_length() <= 0.0 {
            return Err(ModelError::InvalidAnthropometry {
                field: "trunk",
                reason: "hip_height + trunk + neck must leave room for the head",
            });
        }
        Ok(())
    }

    pub fn arm_reach(&self) -> f64 {
        self.upper_arm + self.forearm + self.hand
    }

    /// Neck base to the top of the head, with the neutral stack summing to `height`.
    pub fn head_length(&self) -> f64 {
        self.height - self.hip_height - self.trunk - self.neck
    }

    pub fn shoulder_height(&self) -> f64 {
        self.hip_height + self.trunk
    }

    pub fn thigh(&self) -> f64 {
        self.hip_height - self.knee_height
    }

    pub fn shank(&self) -> f64 {
        self.knee_height
    }
}

impl Default for Anthropometry {
    fn default() -> Self {
        Self::from_height(Self::DEFAULT_HEIGHT).expect("ratio defaults are valid")
    }
}

impl PartialAnthropometry {
    pub fn resolve(&self) -> Result<Anthropometry, ModelError> {
        let h = self.height.unwrap_or(Anthropometry::DEFAULT_HEIGHT);
        let a = Anthropometry {
            height: h,
            shoulder_width: self
                .shoulder_width
                .unwrap_or(Anthropometry::SHOULDER_WIDTH_RATIO * h),
            upper_arm: self.upper_arm.unwrap_or(Anthropometry::UPPER_ARM_RATIO * h),
            forearm: self.forearm.unwrap_or(Anthropometry::FOREARM_RATIO * h),
            hand: self.hand.unwrap_or(Anthropometry::HAND_RATIO * h),
            trunk: self.trunk.unwrap_or(Anthropometry::TRUNK_RATIO * h),
            neck: self.neck.unwrap_or(Anthropometry::NECK_RATIO * h),
            hip_height: self.hip_height.unwrap_or(Anthropometry::HIP_HEIGHT_RATIO * h),
            knee_height: self
                .knee_height
                .unwrap_or(Anthropometry::KNEE_HEIGHT_RATIO * h),
        };
        a.validate()?;
        Ok(a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    /// +1 for the right side, -1 for the left (sign of the outward x direction).
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Joint angles of one arm, in degrees.
///
/// The upper arm hangs straight down at zero. Flexion swings it forward in the
/// sagittal plane, abduction then tilts the arm plane outward about the
/// forward axis. Elbow and wrist flexion bend within the arm plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ArmPose {
    pub shoulder_flexion: f64,
    pub shoulder_abduction: f64,
    pub elbow_flexion: f64,
    pub wrist_flexion: f64,
    pub wrist_deviated: bool,
}

/// Whole-body joint angles, in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pose {
    /// Positive bends forward.
    pub trunk_flexion: f64,
    /// Positive bends toward the right.
    pub trunk_side: f64,
    /// Positive turns the chest toward the right.
    pub trunk_twist: f64,
    pub neck_flexion: f64,
    pub neck_twisted: bool,
    pub left: ArmPose,
    pub right: ArmPose,
    /// Knee flexion of the more flexed leg.
    pub knee_flexion: f64,
    pub bilateral_support: bool,
}

pub const ELBOW_FLEXION_MAX: f64 = 160.0;
pub const KNEE_FLEXION_MAX: f64 = 150.0;

/// Upright standing with arms hanging and both feet on the floor.
pub fn neutral_pose() -> Pose {
    Pose {
        trunk_flexion: 0.0,
        trunk_side: 0.0,
        trunk_twist: 0.0,
        neck_flexion: 0.0,
        neck_twisted: false,
        left: ArmPose::default(),
        right: ArmPose::default(),
        knee_flexion: 0.0,
        bilateral_support: true,
    }
}

impl Pose {
    pub fn arm(&self, side: Side) -> &ArmPose {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn arm_mut(&mut self, side: Side) -> &mut ArmPose {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }

    /// Reflection across the sagittal plane.
    pub fn mirrored(&self) -> Pose {
        Pose {
            trunk_side: -self.trunk_side,
            trunk_twist: -self.trunk_twist,
            left: self.right,
            right: self.left,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let mut angles = [
            ("trunk_flexion", self.trunk_flexion),
            ("trunk_side", self.trunk_side),
            ("trunk_twist", self.trunk_twist),
            ("neck_flexion", self.neck_flexion),
            ("knee_flexion", self.knee_flexion),
            ("left.shoulder_flexion", self.left.shoulder_flexion),
            ("left.shoulder_abduction", self.left.shoulder_abduction),
            ("left.elbow_flexion", self.left.elbow_flexion),
            ("left.wrist_flexion", self.left.wrist_flexion),
            ("right.shoulder_flexion", self.right.shoulder_flexion),
            ("right.shoulder_abduction", self.right.shoulder_abduction),
            ("right.elbow_flexion", self.right.elbow_flexion),
            ("right.wrist_flexion", self.right.wrist_flexion),
        ]
        .into_iter();
        if let Some((field, value)) = angles.find(|(_, v)| !v.is_finite()) {
            return Err(ModelError::InvalidPose { field, value });
        }
        for (field, value) in [
            ("left.elbow_flexion", self.left.elbow_flexion),
            ("right.elbow_flexion", self.right.elbow_flexion),
        ] {
            if !(0.0..=ELBOW_FLEXION_MAX).contains(&value) {
                return Err(ModelError::InvalidPose { field, value });
            }
        }
        if !(0.0..=KNEE_FLEXION_MAX).contains(&self.knee_flexion) {
            return Err(ModelError::InvalidPose {
                field: "knee_flexion",
                value: self.knee_flexion,
            });
        }
        Ok(())
    }
}

/// Posed landmark positions in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Landmarks {
    pub head_top: Vec3,
    pub neck_base: Vec3,
    pub shoulder_l: Vec3,
    pub shoulder_r: Vec3,
    pub elbow_l: Vec3,
    pub elbow_r: Vec3,
    pub wrist_l: Vec3,
    pub wrist_r: Vec3,
    pub hand_l: Vec3,
    pub hand_r: Vec3,
    pub hip_center: Vec3,
    pub knee_l: Vec3,
    pub knee_r: Vec3,
}

impl Landmarks {
    pub fn named(&self) -> [(&'static str, Vec3); 13] {
        [
            ("head_top", self.head_top),
            ("neck_base", self.neck_base),
            ("shoulder_l", self.shoulder_l),
            ("shoulder_r", self.shoulder_r),
            ("elbow_l", self.elbow_l),
            ("elbow_r", self.elbow_r),
            ("wrist_l", self.wrist_l),
            ("wrist_r", self.wrist_r),
            ("hand_l", self.hand_l),
            ("hand_r", self.hand_r),
            ("hip_center", self.hip_center),
            ("knee_l", self.knee_l),
            ("knee_r", self.knee_r),
        ]
    }

    pub fn hand(&self, side: Side) -> Vec3 {
        match side {
            Side::Left => self.hand_l,
            Side::Right => self.hand_r,
        }
    }

    pub fn shoulder(&self, side: Side) -> Vec3 {
        match side {
            Side::Left => self.shoulder_l,
            Side::Right => self.shoulder_r,
        }
    }

    /// Reflection across x = 0, swapping sides.
    pub fn mirrored(&self) -> Landmarks {
        Landmarks {
            head_top: self.head_top.mirror_x(),
            neck_base: self.neck_base.mirror_x(),
            shoulder_l: self.shoulder_r.mirror_x(),
            shoulder_r: self.shoulder_l.mirror_x(),
            elbow_l: self.elbow_r.mirror_x(),
            elbow_r: self.elbow_l.mirror_x(),
            wrist_l: self.wrist_r.mirror_x(),
            wrist_r: self.wrist_l.mirror_x(),
            hand_l: self.hand_r.mirror_x(),
            hand_r: self.hand_l.mirror_x(),
            hip_center: self.hip_center.mirror_x(),
            knee_l: self.knee_r.mirror_x(),
            knee_r: self.knee_l.mirror_x(),
        }
    }
}

/// Trunk orientation: forward flexion, then side bend, then axial twist.
pub fn trunk_rotation(flexion: f64, side: f64, twist: f64) -> Mat3 {
    Mat3::rot_x(flexion) * Mat3::rot_z(-side) * Mat3::rot_y(twist)
}

/// Hip center height and knee forward offset for a symmetric squat.
pub(crate) fn lower_body(anthro: &Anthropometry, knee_flexion: f64) -> (f64, f64, f64) {
    let half = knee_flexion * 0.5;
    let (s, c) = (sin_deg(half), cos_deg(half));
    let hip_y = anthro.hip_height * c;
    let knee_y = anthro.shank() * c;
    let knee_z = anthro.thigh() * s;
    (hip_y, knee_y, knee_z)
}

/// Shoulder joint positions for a trunk configuration.
pub(crate) fn shoulders(
    anthro: &Anthropometry,
    trunk: &Mat3,
    hip_y: f64,
) -> (Vec3, Vec3, Vec3) {
    let hip = Vec3::new(0.0, hip_y, 0.0);
    let neck_base = hip + trunk.mul_vec(Vec3::new(0.0, anthro.trunk, 0.0));
    let half = anthro.shoulder_width * 0.5;
    let left = neck_base + trunk.mul_vec(Vec3::new(-half, 0.0, 0.0));
    let right = neck_base + trunk.mul_vec(Vec3::new(half, 0.0, 0.0));
    (neck_base, left, right)
}

/// Unit direction within the arm plane, `deg` measured from straight down
/// toward forward.
#[inline]
pub(crate) fn plane_dir(deg: f64) -> Vec3 {
    Vec3::new(0.0, -cos_deg(deg), sin_deg(deg))
}

/// Shoulder rotation of a right arm; the left arm uses its mirror image.
#[inline]
pub(crate) fn arm_rotation(flexion: f64, abduction: f64) -> Mat3 {
    Mat3::rot_z(abduction) * Mat3::rot_x(-flexion)
}

/// Elbow, wrist and hand offsets from the shoulder in the trunk frame.
pub(crate) fn arm_offsets(anthro: &Anthropometry, arm: &ArmPose, side: Side) -> [Vec3; 3] {
    let rot = arm_rotation(arm.shoulder_flexion, arm.shoulder_abduction);
    let upper = rot.mul_vec(plane_dir(0.0) * anthro.upper_arm);
    let fore = rot.mul_vec(plane_dir(arm.elbow_flexion) * anthro.forearm);
    let hand = rot.mul_vec(plane_dir(arm.elbow_flexion + arm.wrist_flexion) * anthro.hand);
    let elbow = upper;
    let wrist = elbow + fore;
    let tip = wrist + hand;
    match side {
        Side::Right => [elbow, wrist, tip],
        Side::Left => [elbow.mirror_x(), wrist.mirror_x(), tip.mirror_x()],
    }
}

/// Places every landmark for `pose`.
pub fn forward_kinematics(anthro: &Anthropometry, pose: &Pose) -> Result<Landmarks, ModelError> {
    pose.validate()?;
    let (hip_y, knee_y, knee_z) = lower_body(anthro, pose.knee_flexion);
    let trunk = trunk_rotation(pose.trunk_flexion, pose.trunk_side, pose.trunk_twist);
    let (neck_base, shoulder_l, shoulder_r) = shoulders(anthro, &trunk, hip_y);
    let head_dir = trunk.mul_vec(Mat3::rot_x(pose.neck_flexion).mul_vec(Vec3::new(0.0, 1.0, 0.0)));
    let head_top = neck_base + head_dir * (anthro.neck + anthro.head_length());

    let place = |shoulder: Vec3, side: Side| {
        let [e, w, h] = arm_offsets(anthro, pose.arm(side), side);
        [
            shoulder + trunk.mul_vec(e),
            shoulder + trunk.mul_vec(w),
            shoulder + trunk.mul_vec(h),
        ]
    };
    let [elbow_l, wrist_l, hand_l] = place(shoulder_l, Side::Left);
    let [elbow_r, wrist_r, hand_r] = place(shoulder_r, Side::Right);
    let knee_x = anthro.shoulder_width * 0.25;

    Ok(Landmarks {
        head_top,
        neck_base,
        shoulder_l,
        shoulder_r,
        elbow_l,
        elbow_r,
        wrist_l,
        wrist_r,
        hand_l,
        hand_r,
        hip_center: Vec3::new(0.0, hip_y, 0.0),
        knee_l: Vec3::new(-knee_x, knee_y, knee_z),
        knee_r: Vec3::new(knee_x, knee_y, knee_z),
    })
}
