//! Ergonomically naive comparator: hand the object over at the point of the
//! boundary nearest to where it starts.

use crate::geometry::Vec3;
use crate::optimizer::{Boundary, QState};

/// Euclidean projection onto the boundary box (per-axis clamp).
pub fn project_onto_boundary(start: Vec3, boundary: &Boundary) -> Vec3 {
    Vec3::new(
        start.x.clamp(boundary.min.x, boundary.max.x),
        start.y.clamp(boundary.min.y, boundary.max.y),
        start.z.clamp(boundary.min.z, boundary.max.z),
    )
}

/// Grid cell closest to `start`: the box projection snapped to the grid.
pub fn shortest_distance_target(start: Vec3, boundary: &Boundary) -> QState {
    boundary.nearest_cell(project_onto_boundary(start, boundary))
}
