//! On-disk result formats. Commands assemble every file in memory first and
//! write them at the end, each through a temporary file renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use handover_core::optimizer::RunRecord;
use handover_core::oracle::SweepReport;
use handover_core::reba::RebaBreakdown;
use handover_core::skeleton::Landmarks;
use handover_core::Vec3;
use serde::{Deserialize, Serialize};

use crate::config::BudgetSpec;
use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// A named output file and its full contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, bytes: Vec<u8>) -> Self {
        Self {
            name: name.into(),
            bytes,
        }
    }
}

/// Writes all artifacts into `dir`, creating it if needed.
pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut written = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let path = dir.join(&a.name);
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| HarnessError::io(dir, e))?;
        tmp.write_all(&a.bytes).map_err(|e| HarnessError::io(&path, e))?;
        tmp.persist(&path).map_err(|e| HarnessError::io(&path, e.error))?;
        written.push(path);
    }
    Ok(written)
}

pub fn fingerprint_hex(f: u64) -> String {
    format!("{f:016x}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFile {
    pub schema_version: u32,
    pub config_fingerprint: String,
    pub budget: BudgetSpec,
    pub run: RunRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFile {
    pub schema_version: u32,
    pub config_fingerprint: String,
    pub step: f64,
    pub dims: [u32; 3],
    pub report: SweepReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownFile {
    pub schema_version: u32,
    pub point: Vec3,
    pub reachable: bool,
    pub residual: [f64; 2],
    pub pose: handover_core::skeleton::Pose,
    pub breakdown: RebaBreakdown,
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("artifact types serialize");
    bytes.push(b'\n');
    bytes
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

pub fn run_json(run: &RunRecord, budget: &BudgetSpec) -> Artifact {
    Artifact::new(
        format!("run_{}.json", run.seed),
        json(&RunFile {
            schema_version: SCHEMA_VERSION,
            config_fingerprint: fingerprint_hex(run.fingerprint),
            budget: *budget,
            run: run.clone(),
        }),
    )
}

pub fn sweep_json(report: &SweepReport, step: f64, dims: [u32; 3]) -> Artifact {
    Artifact::new(
        "sweep_report.json",
        json(&SweepFile {
            schema_version: SCHEMA_VERSION,
            config_fingerprint: fingerprint_hex(report.fingerprint),
            step,
            dims,
            report: report.clone(),
        }),
    )
}

pub fn breakdown_json(file: &BreakdownFile) -> Artifact {
    Artifact::new("breakdown.json", json(file))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SummaryRow {
    pub seed: u64,
    pub best_postural: u8,
    pub best_step: u64,
    pub steps: u64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub final_tau: f64,
    pub visited_states: usize,
}

pub fn runs_summary_csv(runs: &[RunRecord]) -> Artifact {
    Artifact::new(
        "runs_summary.csv",
        csv_bytes(runs.iter().map(|r| SummaryRow {
            seed: r.seed,
            best_postural: r.best_postural,
            best_step: r.best_step,
            steps: r.steps,
            x: r.best_position.x,
            y: r.best_position.y,
            z: r.best_position.z,
            final_tau: r.final_tau,
            visited_states: r.visited_states,
        })),
    )
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct PositionRow {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// The best position across runs; ties go to the earliest run listed.
pub fn best_position_csv(runs: &[RunRecord]) -> Option<Artifact> {
    let best = runs.iter().min_by_key(|r| r.best_postural)?;
    let p = best.best_position;
    Some(Artifact::new(
        "best_position.csv",
        csv_bytes([PositionRow { x: p.x, y: p.y, z: p.z }]),
    ))
}

pub fn read_best_position(path: &Path) -> Result<Vec3> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::Artifact {
        path: path.into(),
        reason: e.to_string(),
    })?;
    let row: PositionRow = r
        .deserialize()
        .next()
        .ok_or_else(|| HarnessError::Artifact {
            path: path.into(),
            reason: "no position row".into(),
        })?
        .map_err(|e| HarnessError::Artifact {
            path: path.into(),
            reason: e.to_string(),
        })?;
    Ok(Vec3::new(row.x, row.y, row.z))
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct HistogramRow {
    pub postural: u8,
    pub cells: u64,
    pub fraction: f64,
}

pub fn histogram_csv(report: &SweepReport) -> Artifact {
    Artifact::new(
        "histogram.csv",
        csv_bytes(report.histogram.iter().map(|(s, c)| HistogramRow {
            postural: *s,
            cells: *c,
            fraction: report.fraction(*s),
        })),
    )
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct CellRow {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub postural: u8,
}

pub fn cells_csv(positions: impl IntoIterator<Item = (Vec3, u8)>) -> Artifact {
    Artifact::new(
        "cells.csv",
        csv_bytes(positions.into_iter().map(|(p, s)| CellRow {
            x: p.x,
            y: p.y,
            z: p.z,
            postural: s,
        })),
    )
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct LandmarkRow {
    pub landmark: String,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub fn landmarks_csv(lm: &Landmarks) -> Artifact {
    Artifact::new(
        "landmarks.csv",
        csv_bytes(lm.named().iter().map(|(name, p)| LandmarkRow {
            landmark: (*name).to_string(),
            x: p.x,
            y: p.y,
            z: p.z,
        })),
    )
}

/// Optimized versus shortest-distance handover for one start point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ComparisonRow {
    pub start_x: f64,
    pub start_y: f64,
    pub start_z: f64,
    pub baseline_x: f64,
    pub baseline_y: f64,
    pub baseline_z: f64,
    pub optimized_postural: u8,
    pub baseline_postural: u8,
    pub optimized_final_reba: u8,
    pub baseline_final_reba: u8,
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> Artifact {
    Artifact::new("comparison.csv", csv_bytes(rows.iter()))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Artifact {
        path: path.into(),
        reason: e.to_string(),
    })
}
