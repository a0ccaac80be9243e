use crate::error::ModelError;
use crate::geometry::Vec3;
use crate::ik::HandTargets;
use crate::skeleton::Anthropometry;

/// Full-resolution spacing between neighbouring handover points, in meters.
pub const FINE_STEP: f64 = 0.003;

/// Integer grid indices of a handover point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QState {
    pub i: u32,
    pub j: u32,
    pub k: u32,
}

impl QState {
    pub const fn new(i: u32, j: u32, k: u32) -> Self {
        Self { i, j, k }
    }
}

/// Axis-aligned search box, discretized into a grid centered inside it.
///
/// Each axis carries `floor(extent / step) + 1` cells spaced `step` apart; the
/// grid is centered in the box, so a box symmetric about x = 0 yields a grid
/// whose mirror image is exactly itself.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Boundary {
    pub min: Vec3,
    pub max: Vec3,
    pub step: f64,
    dims: [u32; 3],
}

impl Boundary {
    pub fn new(min: Vec3, max: Vec3, step: f64) -> Result<Self, ModelError> {
        if !(step.is_finite() && step > 0.0) {
            return Err(ModelError::InvalidConfig {
                field: "boundary.step",
                reason: "must be finite and positive",
            });
        }
        if !(min.is_finite() && max.is_finite()) {
            return Err(ModelError::InvalidConfig {
                field: "boundary",
                reason: "corners must be finite",
            });
        }
        let mut dims = [0u32; 3];
        for (d, (lo, hi)) in dims
            .iter_mut()
            .zip([(min.x, max.x), (min.y, max.y), (min.z, max.z)])
        {
            let extent = hi - lo;
            if extent < 0.0 {
                return Err(ModelError::InvalidConfig {
                    field: "boundary",
                    reason: "max must not be below min on any axis",
                });
            }
            let cells = libm::floor(extent / step + 1e-9) + 1.0;
            if cells > u32::MAX as f64 {
                return Err(ModelError::InvalidConfig {
                    field: "boundary.step",
                    reason: "too many cells",
                });
            }
            *d = cells as u32;
        }
        Ok(Self { min, max, step, dims })
    }

    /// Shoulder width across x, knee height to the top of the head along y,
    /// and arm reach along z.
    pub fn from_anthropometry(anthro: &Anthropometry, step: f64) -> Result<Self, ModelError> {
        let half = anthro.shoulder_width * 0.5;
        let b = Self::new(
            Vec3::new(-half, anthro.knee_height, 0.0),
            Vec3::new(half, anthro.height, anthro.arm_reach()),
            step,
        )?;
        let extents = [2.0 * half, anthro.height - anthro.knee_height, anthro.arm_reach()];
        if extents.iter().any(|e| *e < step) {
            return Err(ModelError::InvalidConfig {
                field: "boundary.step",
                reason: "larger than a body-derived boundary extent",
            });
        }
        Ok(b)
    }

    pub fn dims(&self) -> [u32; 3] {
        self.dims
    }

    pub fn cell_count(&self) -> usize {
        self.dims.iter().map(|d| *d as usize).product()
    }

    pub fn contains(&self, s: QState) -> bool {
        s.i < self.dims[0] && s.j < self.dims[1] && s.k < self.dims[2]
    }

    pub fn contains_point(&self, p: Vec3) -> bool {
        const TOL: f64 = 1e-9;
        p.x >= self.min.x - TOL
            && p.x <= self.max.x + TOL
            && p.y >= self.min.y - TOL
            && p.y <= self.max.y + TOL
            && p.z >= self.min.z - TOL
            && p.z <= self.max.z + TOL
    }

    fn axis(&self, axis: usize) -> (f64, f64, u32) {
        match axis {
            0 => (self.min.x, self.max.x, self.dims[0]),
            1 => (self.min.y, self.max.y, self.dims[1]),
            _ => (self.min.z, self.max.z, self.dims[2]),
        }
    }

    fn coordinate(&self, axis: usize, index: u32) -> f64 {
        let (lo, hi, n) = self.axis(axis);
        let center = 0.5 * (lo + hi);
        let offset = f64::from(index) - 0.5 * f64::from(n - 1);
        center + offset * self.step
    }

    fn nearest_index(&self, axis: usize, value: f64) -> u32 {
        let (lo, hi, n) = self.axis(axis);
        let center = 0.5 * (lo + hi);
        let raw = (value - center) / self.step + 0.5 * f64::from(n - 1);
        // Ties round toward the lower index.
        let idx = libm::ceil(raw - 0.5);
        idx.clamp(0.0, f64::from(n - 1)) as u32
    }

    /// Cell position in meters.
    pub fn position(&self, s: QState) -> Vec3 {
        Vec3::new(
            self.coordinate(0, s.i),
            self.coordinate(1, s.j),
            self.coordinate(2, s.k),
        )
    }

    /// Grid cell closest to `p` (p need not lie inside the box).
    pub fn nearest_cell(&self, p: Vec3) -> QState {
        QState::new(
            self.nearest_index(0, p.x),
            self.nearest_index(1, p.y),
            self.nearest_index(2, p.z),
        )
    }

    /// Row-major linear index.
    pub fn linear_index(&self, s: QState) -> usize {
        let [_, ny, nz] = self.dims;
        (s.i as usize * ny as usize + s.j as usize) * nz as usize + s.k as usize
    }

    pub fn state_at(&self, index: usize) -> QState {
        let [_, ny, nz] = self.dims;
        let (ny, nz) = (ny as usize, nz as usize);
        QState::new(
            (index / (ny * nz)) as u32,
            ((index / nz) % ny) as u32,
            (index % nz) as u32,
        )
    }

    /// The cell nearest the box center.
    pub fn center(&self) -> QState {
        QState::new(
            (self.dims[0] - 1) / 2,
            (self.dims[1] - 1) / 2,
            (self.dims[2] - 1) / 2,
        )
    }

    /// Reflection of a cell across the box's mid-plane in x.
    pub fn mirror_x(&self, s: QState) -> QState {
        QState::new(self.dims[0] - 1 - s.i, s.j, s.k)
    }

    pub fn states(&self) -> impl Iterator<Item = QState> + '_ {
        (0..self.cell_count()).map(|i| self.state_at(i))
    }
}

/// The handed-over object: the optimized point is the midpoint between the
/// two grasp handles, which sit symmetrically along x.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoxSpec {
    pub handle_separation: f64,
}

impl BoxSpec {
    pub const DEFAULT_HANDLE_SEPARATION: f64 = 0.40;

    pub fn new(handle_separation: f64) -> Result<Self, ModelError> {
        if !(handle_separation.is_finite() && handle_separation > 0.0) {
            return Err(ModelError::InvalidConfig {
                field: "box.handle_separation",
                reason: "must be finite and positive",
            });
        }
        Ok(Self { handle_separation })
    }

    pub fn targets(&self, midpoint: Vec3) -> HandTargets {
        let half = Vec3::new(self.handle_separation * 0.5, 0.0, 0.0);
        HandTargets {
            left: midpoint - half,
            right: midpoint + half,
        }
    }
}

impl Default for BoxSpec {
    fn default() -> Self {
        Self {
            handle_separation: Self::DEFAULT_HANDLE_SEPARATION,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_count_formula() {
        let b = Boundary::new(Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.1, 0.05, 0.021), 0.01).unwrap();
        assert_eq!(b.dims(), [11, 6, 3]);
        assert_eq!(b.cell_count(), 198);
        for idx in [0, 17, 197] {
            assert_eq!(b.linear_index(b.state_at(idx)), idx);
        }
    }

    #[test]
    fn singleton_and_invalid() {
        let p = Vec3::new(0.1, 1.0, 0.3);
        let b = Boundary::new(p, p, 0.02).unwrap();
        assert_eq!(b.cell_count(), 1);
        assert_eq!(b.position(QState::default()), p);
        assert!(Boundary::new(p, p, 0.0).is_err());
        assert!(Boundary::new(p, p - Vec3::new(0.1, 0.0, 0.0), 0.02).is_err());
        let tiny = Anthropometry::default();
        assert!(Boundary::from_anthropometry(&tiny, 1.0).is_err());
    }

    #[test]
    fn grid_is_centered_and_mirror_exact() {
        let a = Anthropometry::default();
        let b = Boundary::from_anthropometry(&a, 0.02).unwrap();
        for s in b.states().step_by(97) {
            let m = b.mirror_x(s);
            assert_eq!(b.position(m).x, -b.position(s).x);
            assert!(b.contains_point(b.position(s)));
        }
        let c = b.position(b.center());
        assert!(c.x.abs() < 1e-12);
    }

    #[test]
    fn nearest_cell_round_trip() {
        let a = Anthropometry::default();
        let b = Boundary::from_anthropometry(&a, 0.02).unwrap();
        for s in b.states().step_by(101) {
            assert_eq!(b.nearest_cell(b.position(s)), s);
        }
    }

    #[test]
    fn box_targets_straddle_midpoint() {
        let t = BoxSpec::new(0.4).unwrap().targets(Vec3::new(0.1, 1.0, 0.3));
        assert!((t.left.x + 0.1).abs() < 1e-15);
        assert!((t.right.x - 0.3).abs() < 1e-15);
        assert!(BoxSpec::new(0.0).is_err());
    }
}
