//! Subcommand implementations. Each returns the files it would write plus a
//! human-readable summary; nothing touches the disk here.

use std::fmt::Write as _;
use std::path::Path;

use handover_core::baseline::shortest_distance_target;
use handover_core::optimizer::{Environment, QState, RunRecord};
use handover_core::oracle::{verify_against, SweepReport, Verification};
use handover_core::skeleton::forward_kinematics;
use handover_core::Vec3;

use crate::artifacts::{self, Artifact, BreakdownFile, ComparisonRow, RunFile, SweepFile};
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::runner::{parallel_sweep, train_seeds, ScoreSource};

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub artifacts: Vec<Artifact>,
    pub summary: String,
}

fn start_cell(cfg: &ExperimentConfig, env: &Environment) -> Option<QState> {
    cfg.start.map(|p| env.boundary().nearest_cell(p))
}

pub fn train(cfg: &ExperimentConfig, workers: usize) -> Result<(Output, Vec<RunRecord>)> {
    let env = cfg.environment()?;
    let runs = train_seeds(
        &env,
        &cfg.hyper,
        &cfg.budget,
        &cfg.seeds,
        start_cell(cfg, &env),
        ScoreSource::Lazy,
        workers,
    )?;
    let mut out: Vec<Artifact> = runs.iter().map(|r| artifacts::run_json(r, &cfg.budget)).collect();
    out.push(artifacts::runs_summary_csv(&runs));
    out.extend(artifacts::best_position_csv(&runs));

    let mut summary = String::from("seed  best  at_step      x       y       z\n");
    for r in &runs {
        let p = r.best_position;
        let _ = writeln!(
            summary,
            "{:>4}  {:>4}  {:>7}  {:>6.3}  {:>6.3}  {:>6.3}",
            r.seed, r.best_postural, r.best_step, p.x, p.y, p.z
        );
    }
    Ok((
        Output {
            artifacts: out,
            summary,
        },
        runs,
    ))
}

pub fn sweep(cfg: &ExperimentConfig, workers: usize, with_cells: bool) -> Result<(Output, SweepReport)> {
    let env = cfg.environment()?;
    let (report, scores) = parallel_sweep(&env, workers)?;
    let b = env.boundary();
    let mut out = vec![
        artifacts::sweep_json(&report, cfg.step, b.dims()),
        artifacts::histogram_csv(&report),
    ];
    if with_cells {
        out.push(artifacts::cells_csv(
            b.states().map(|s| (b.position(s), scores[b.linear_index(s)])),
        ));
    }
    let mut summary = format!(
        "{} cells in {:.2} s, global minimum {} on {} cells\npostural  cells  fraction\n",
        report.cell_count,
        report.elapsed_seconds,
        report.global_min,
        report.argmin_cells.len()
    );
    for (score, count) in &report.histogram {
        let _ = writeln!(summary, "{score:>8}  {count:>5}  {:.5}", report.fraction(*score));
    }
    Ok((
        Output {
            artifacts: out,
            summary,
        },
        report,
    ))
}

pub fn load_sweep(path: &Path) -> Result<SweepFile> {
    let file: SweepFile = artifacts::read_json(path)?;
    if file.schema_version != artifacts::SCHEMA_VERSION {
        return Err(HarnessError::Artifact {
            path: path.into(),
            reason: format!("unsupported schema_version {}", file.schema_version),
        });
    }
    Ok(file)
}

pub fn load_run(path: &Path) -> Result<RunFile> {
    let file: RunFile = artifacts::read_json(path)?;
    if file.schema_version != artifacts::SCHEMA_VERSION {
        return Err(HarnessError::Artifact {
            path: path.into(),
            reason: format!("unsupported schema_version {}", file.schema_version),
        });
    }
    Ok(file)
}

/// Where the optimized handover point comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimum {
    /// A sweep report; the optimum nearest the mid-plane is used.
    Sweep(QState),
    /// A learned position in meters, snapped to the grid.
    Position(Vec3),
}

/// Reads `--optimum`: a sweep report (`.json`) or a best-position CSV.
pub fn load_optimum(path: &Path, env: &Environment) -> Result<Optimum> {
    if !path.exists() {
        return Err(HarnessError::config(
            "--optimum",
            format!(
                "{} does not exist; run `handover sweep` or `handover train` first",
                path.display()
            ),
        ));
    }
    if path.extension().is_some_and(|e| e == "json") {
        let file = load_sweep(path)?;
        if file.report.fingerprint != env.fingerprint() {
            return Err(handover_core::ModelError::ConfigMismatch {
                expected: env.fingerprint(),
                found: file.report.fingerprint,
            }
            .into());
        }
        Ok(Optimum::Sweep(file.report.preferred_optimum().cell))
    } else {
        Ok(Optimum::Position(artifacts::read_best_position(path)?))
    }
}

pub fn compare(cfg: &ExperimentConfig, optimum: Optimum) -> Result<(Output, Vec<ComparisonRow>)> {
    if cfg.compare_starts.is_empty() {
        return Err(HarnessError::config("compare.starts", "at least one start point is required"));
    }
    let env = cfg.environment()?;
    let b = env.boundary();
    let target = match optimum {
        Optimum::Sweep(cell) => cell,
        Optimum::Position(p) => {
            if !b.contains_point(p) {
                return Err(HarnessError::config("--optimum", "position lies outside the boundary"));
            }
            b.nearest_cell(p)
        }
    };
    let opt = env.evaluate(target).reba;
    let rows: Vec<ComparisonRow> = cfg
        .compare_starts
        .iter()
        .map(|start| {
            let cell = shortest_distance_target(*start, b);
            let base = env.evaluate(cell);
            ComparisonRow {
                start_x: start.x,
                start_y: start.y,
                start_z: start.z,
                baseline_x: base.midpoint.x,
                baseline_y: base.midpoint.y,
                baseline_z: base.midpoint.z,
                optimized_postural: opt.postural,
                baseline_postural: base.reba.postural,
                optimized_final_reba: opt.final_reba,
                baseline_final_reba: base.reba.final_reba,
            }
        })
        .collect();

    let mut summary = String::from(
        "start (x, y, z)              optimized  baseline  optimized REBA  baseline REBA\n",
    );
    for r in &rows {
        let _ = writeln!(
            summary,
            "({:>6.3}, {:>6.3}, {:>6.3})  {:>9}  {:>8}  {:>14}  {:>13}",
            r.start_x,
            r.start_y,
            r.start_z,
            r.optimized_postural,
            r.baseline_postural,
            r.optimized_final_reba,
            r.baseline_final_reba
        );
    }
    let output = Output {
        artifacts: vec![artifacts::comparison_csv(&rows)],
        summary,
    };
    if let Some(r) = rows.iter().find(|r| r.baseline_postural < r.optimized_postural) {
        return Err(HarnessError::Verification(format!(
            "baseline beats the supplied optimum ({} < {}) from start ({}, {}, {}); \
             the optimum is not globally optimal",
            r.baseline_postural, r.optimized_postural, r.start_x, r.start_y, r.start_z
        )));
    }
    Ok((output, rows))
}

pub fn pose_dump(cfg: &ExperimentConfig, point: Vec3) -> Result<(Output, BreakdownFile)> {
    let env = cfg.environment()?;
    if !(point.is_finite() && env.boundary().contains_point(point)) {
        return Err(HarnessError::config(
            "--point",
            format!("({}, {}, {}) lies outside the boundary", point.x, point.y, point.z),
        ));
    }
    let eval = env.evaluate_point(point);
    let lm = forward_kinematics(env.anthropometry(), &eval.reach.pose)?;
    let file = BreakdownFile {
        schema_version: artifacts::SCHEMA_VERSION,
        point,
        reachable: eval.reach.reachable,
        residual: eval.reach.residual,
        pose: eval.reach.pose,
        breakdown: eval.reba,
    };
    let r = &eval.reba;
    let summary = format!(
        "trunk {} neck {} legs {} | upper arm {}/{} lower arm {}/{} wrist {}/{} | \
         A {} B {} | postural {} final {}\n",
        r.trunk,
        r.neck,
        r.legs,
        r.left.upper_arm,
        r.right.upper_arm,
        r.left.lower_arm,
        r.right.lower_arm,
        r.left.wrist,
        r.right.wrist,
        r.score_a,
        r.score_b,
        r.postural,
        r.final_reba
    );
    Ok((
        Output {
            artifacts: vec![artifacts::breakdown_json(&file), artifacts::landmarks_csv(&lm)],
            summary,
        },
        file,
    ))
}

/// Checks every run against the sweep; fails if any run missed the minimum.
pub fn verify(report: &SweepReport, runs: &[RunRecord]) -> Result<(String, Vec<Verification>)> {
    let mut summary = String::new();
    let mut results = Vec::with_capacity(runs.len());
    for run in runs {
        let v = verify_against(report, run)?;
        let _ = writeln!(
            summary,
            "seed {:>4}: {} (found {}, global minimum {}{})",
            run.seed,
            if v.passed { "pass" } else { "FAIL" },
            v.found,
            v.global_min,
            if v.position_matches { "" } else { ", cell not listed as optimal" }
        );
        results.push(v);
    }
    if results.iter().any(|v| !v.passed) {
        return Err(HarnessError::Verification(summary));
    }
    Ok((summary, results))
}
