//! Exhaustive evaluation of every grid cell: the ground-truth score
//! distribution and global optimum.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::ModelError;
use crate::geometry::Vec3;
use crate::optimizer::{Environment, QState, RunRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ArgminCell {
    pub cell: QState,
    pub position: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepReport {
    pub fingerprint: u64,
    pub cell_count: u64,
    /// Postural score → number of cells.
    pub histogram: BTreeMap<u8, u64>,
    pub fractions: BTreeMap<u8, f64>,
    pub global_min: u8,
    pub argmin_cells: Vec<ArgminCell>,
    pub elapsed_seconds: f64,
}

/// Postural scores for a contiguous range of linear cell indices.
pub fn score_cells(env: &Environment, range: Range<usize>) -> Vec<u8> {
    let b = env.boundary();
    range.map(|idx| env.postural(b.state_at(idx))).collect()
}

impl SweepReport {
    /// Assembles the report from per-cell scores in linear index order.
    pub fn from_scores(env: &Environment, scores: &[u8], elapsed_seconds: f64) -> Result<Self, ModelError> {
        let b = env.boundary();
        if scores.len() != b.cell_count() || scores.is_empty() {
            return Err(ModelError::InvalidConfig {
                field: "scores",
                reason: "length differs from the boundary cell count",
            });
        }
        let mut histogram = BTreeMap::new();
        for s in scores {
            *histogram.entry(*s).or_insert(0u64) += 1;
        }
        let total = scores.len() as f64;
        let fractions = histogram
            .iter()
            .map(|(k, v)| (*k, *v as f64 / total))
            .collect();
        let global_min = *histogram.keys().next().expect("non-empty");
        let argmin_cells = scores
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == global_min)
            .map(|(idx, _)| {
                let cell = b.state_at(idx);
                ArgminCell {
                    cell,
                    position: b.position(cell),
                }
            })
            .collect();
        Ok(SweepReport {
            fingerprint: env.fingerprint(),
            cell_count: scores.len() as u64,
            histogram,
            fractions,
            global_min,
            argmin_cells,
            elapsed_seconds,
        })
    }

    /// Score with the most cells (lowest score on ties).
    pub fn modal_score(&self) -> u8 {
        let mut best = (0u8, 0u64);
        for (score, count) in &self.histogram {
            if *count > best.1 {
                best = (*score, *count);
            }
        }
        best.0
    }

    pub fn fraction(&self, score: u8) -> f64 {
        self.fractions.get(&score).copied().unwrap_or(0.0)
    }

    pub fn is_argmin(&self, cell: QState) -> bool {
        self.argmin_cells.iter().any(|c| c.cell == cell)
    }

    /// The optimal cell closest to the body's mid-plane, lowest index first.
    pub fn preferred_optimum(&self) -> &ArgminCell {
        self.argmin_cells
            .iter()
            .min_by(|a, b| a.position.x.abs().total_cmp(&b.position.x.abs()))
            .expect("a sweep always has an optimum")
    }
}

/// Single-threaded sweep; returns the report and the per-cell scores.
pub fn sweep(env: &Environment) -> Result<(SweepReport, Vec<u8>), ModelError> {
    let scores = score_cells(env, 0..env.boundary().cell_count());
    let report = SweepReport::from_scores(env, &scores, 0.0)?;
    Ok((report, scores))
}

/// Comparison of a training run against the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verification {
    pub passed: bool,
    pub global_min: u8,
    pub found: u8,
    /// The run's best cell is one of the listed optima.
    pub position_matches: bool,
}

/// Passes when the run reached the global minimum score. Landing on a
/// different optimal cell than the first listed one still passes.
pub fn verify_against(report: &SweepReport, run: &RunRecord) -> Result<Verification, ModelError> {
    if report.fingerprint != run.fingerprint {
        return Err(ModelError::ConfigMismatch {
            expected: report.fingerprint,
            found: run.fingerprint,
        });
    }
    Ok(Verification {
        passed: run.best_postural == report.global_min,
        global_min: report.global_min,
        found: run.best_postural,
        position_matches: report.is_argmin(run.best_cell),
    })
}
