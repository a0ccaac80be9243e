//! Ergonomic handover-point optimization.
//!
//! A humanoid is posed by a deterministic bimanual reach solver, scored with
//! REBA, and a tabular Q-learner searches a discretized box in front of the
//! body for the handover point with the lowest postural score. An exhaustive
//! sweep provides the ground truth and a shortest-distance projection serves
//! as the ergonomically naive comparator.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod baseline;
pub mod error;
pub mod geometry;
pub mod ik;
pub mod optimizer;
pub mod oracle;
pub mod reba;
pub mod skeleton;

pub use error::ModelError;
pub use geometry::Vec3;
