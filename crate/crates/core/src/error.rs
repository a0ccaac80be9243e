use core::fmt;

/// Errors raised by model construction and validation.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// An anthropometric field violates its invariants.
    InvalidAnthropometry { field: &'static str, reason: &'static str },
    /// A pose angle is non-finite or outside its joint range.
    InvalidPose { field: &'static str, value: f64 },
    /// A task adjustment score is outside 0..=3.
    InvalidAdjustment { field: &'static str, value: u8 },
    /// Boundary, box or hyperparameter configuration is unusable.
    InvalidConfig { field: &'static str, reason: &'static str },
    /// Two artifacts were produced under different configurations.
    ConfigMismatch { expected: u64, found: u64 },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvalidAnthropometry { field, reason } => {
                write!(f, "invalid anthropometry `{field}`: {reason}")
            }
            ModelError::InvalidPose { field, value } => {
                write!(f, "invalid pose angle `{field}` = {value}")
            }
            ModelError::InvalidAdjustment { field, value } => {
                write!(f, "adjustment `{field}` = {value} is outside 0..=3")
            }
            ModelError::InvalidConfig { field, reason } => write!(f, "invalid `{field}`: {reason}"),
            ModelError::ConfigMismatch { expected, found } => write!(
                f,
                "configuration fingerprint mismatch: expected {expected:016x}, found {found:016x}"
            ),
        }
    }
}

impl core::error::Error for ModelError {}
