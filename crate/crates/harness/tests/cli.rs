use std::fs;
use std::path::Path;

use handover::artifacts::{self, ComparisonRow, RunFile, SweepFile};
use handover::cli::main_with_args;
use handover::commands::{self, Optimum};
use handover::runner::parallel_sweep;
use handover::{ExperimentConfig, HarnessError};
use handover_core::Vec3;

const QUICK: &str = "boundary.step = 0.05\nrl.runs = 3\nrl.budget_steps = 20000\n";

fn run(args: &[&str]) -> i32 {
    let mut full = vec!["handover"];
    full.extend_from_slice(args);
    main_with_args(full)
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("experiment.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv" || e == "json"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn train_twice_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), QUICK);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(run(&["train", "--config", &cfg, "--out", a.to_str().unwrap()]), 0);
    assert_eq!(run(&["train", "--config", &cfg, "--out", b.to_str().unwrap(), "--workers", "1"]), 0);
    let (fa, fb) = (files(&a), files(&b));
    assert_eq!(fa.len(), 5, "{:?}", fa.iter().map(|f| &f.0).collect::<Vec<_>>());
    assert_eq!(fa, fb);

    let summary = fs::read_to_string(a.join("runs_summary.csv")).unwrap();
    assert!(summary.starts_with("seed,best_postural,"));
    assert_eq!(summary.lines().count(), 4);
    let best = fs::read_to_string(a.join("best_position.csv")).unwrap();
    assert!(best.starts_with("x,y,z\n"));
}

#[test]
fn sweep_report_ignores_worker_count() {
    let cfg = ExperimentConfig::from_toml_str("boundary.step = 0.04", Path::new(".")).unwrap();
    let env = cfg.environment().unwrap();
    let (one, s1) = parallel_sweep(&env, 1).unwrap();
    for workers in [2, 3, 8, 64] {
        let (many, sn) = parallel_sweep(&env, workers).unwrap();
        assert_eq!(s1, sn);
        assert_eq!(one.histogram, many.histogram);
        assert_eq!(one.argmin_cells, many.argmin_cells);
    }
}

#[test]
fn sweep_rerun_differs_only_in_elapsed() {
    let cfg = ExperimentConfig::from_toml_str("boundary.step = 0.05", Path::new(".")).unwrap();
    let (_, mut a) = commands::sweep(&cfg, 4, false).unwrap();
    let (_, mut b) = commands::sweep(&cfg, 2, false).unwrap();
    a.elapsed_seconds = 0.0;
    b.elapsed_seconds = 0.0;
    assert_eq!(a, b);
}

#[test]
fn config_errors_exit_2_without_writing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let out_s = out.to_str().unwrap();
    for text in ["rl.runs = 0", "rl.gamma = 2.0", "[rl]\nlearning_rate = 0.3", "anthro.height = -1"] {
        let cfg = write_config(tmp.path(), text);
        assert_eq!(run(&["train", "--config", &cfg, "--out", out_s]), 2, "{text}");
    }
    assert_eq!(run(&["train", "--budget-steps", "0", "--out", out_s]), 2);
    assert_eq!(run(&["sweep", "--step=-0.1", "--out", out_s]), 2);
    assert_eq!(run(&["pose-dump", "--point", "0,3,0", "--out", out_s]), 2);
    assert_eq!(run(&["compare", "--optimum", "/nonexistent/sweep.json", "--out", out_s]), 2);
    assert!(!out.exists());
}

#[test]
fn zero_seeds_name_the_field() {
    match ExperimentConfig::from_toml_str("rl.seeds = []", Path::new(".")) {
        Err(HarnessError::Config { field, .. }) => assert_eq!(field, "rl.runs"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn verify_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), QUICK);
    let out = tmp.path().join("out");
    let o = out.to_str().unwrap();
    assert_eq!(run(&["sweep", "--config", &cfg, "--out", o]), 0);
    assert_eq!(run(&["train", "--config", &cfg, "--out", o]), 0);
    let report = out.join("sweep_report.json");
    let run0 = out.join("run_0.json");
    let args = ["verify", "--report", report.to_str().unwrap(), run0.to_str().unwrap()];
    assert_eq!(run(&args), 0);

    let mut file: RunFile = artifacts::read_json(&run0).unwrap();
    file.run.best_postural += 1;
    let bad = tmp.path().join("run_bad.json");
    fs::write(&bad, serde_json::to_vec(&file).unwrap()).unwrap();
    assert_eq!(run(&["verify", "--report", report.to_str().unwrap(), bad.to_str().unwrap()]), 3);

    file.run.best_postural -= 1;
    file.run.fingerprint ^= 0xff;
    fs::write(&bad, serde_json::to_vec(&file).unwrap()).unwrap();
    assert_eq!(run(&["verify", "--report", report.to_str().unwrap(), bad.to_str().unwrap()]), 2);
}

#[test]
fn compare_from_sweep_and_from_training() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = write_config(tmp.path(), QUICK);
    let out = tmp.path().join("out");
    let o = out.to_str().unwrap();
    assert_eq!(run(&["sweep", "--config", &cfg_path, "--out", o]), 0);
    assert_eq!(run(&["train", "--config", &cfg_path, "--out", o]), 0);

    let report = out.join("sweep_report.json");
    assert_eq!(run(&["compare", "--config", &cfg_path, "--optimum", report.to_str().unwrap(), "--out", o]), 0);
    let mut r = csv::Reader::from_path(out.join("comparison.csv")).unwrap();
    let rows: Vec<ComparisonRow> = r.deserialize().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 5);
    let sweep: SweepFile = artifacts::read_json(&report).unwrap();
    for row in &rows {
        assert_eq!(row.optimized_postural, sweep.report.global_min);
        assert!(row.baseline_postural >= row.optimized_postural);
    }

    let best = out.join("best_position.csv");
    assert_eq!(run(&["compare", "--config", &cfg_path, "--optimum", best.to_str().unwrap(), "--out", o]), 0);

    // A sweep made under another configuration is refused.
    assert_eq!(run(&["compare", "--step", "0.04", "--optimum", report.to_str().unwrap(), "--out", o]), 2);
}

#[test]
fn compare_rejects_empty_starts_and_handles_degenerate_start() {
    let cfg = ExperimentConfig::from_toml_str("boundary.step = 0.05\ncompare.starts = []", Path::new("."))
        .unwrap();
    let env = cfg.environment().unwrap();
    let (_, report) = commands::sweep(&cfg, 2, false).unwrap();
    let opt = report.preferred_optimum();
    assert!(matches!(
        commands::compare(&cfg, Optimum::Sweep(opt.cell)),
        Err(HarnessError::Config { .. })
    ));

    let at_optimum = ExperimentConfig {
        compare_starts: vec![opt.position],
        ..cfg
    };
    let (_, rows) = commands::compare(&at_optimum, Optimum::Sweep(opt.cell)).unwrap();
    assert_eq!(rows[0].baseline_postural, rows[0].optimized_postural);
    assert_eq!(rows[0].baseline_final_reba, rows[0].optimized_final_reba);
    assert_eq!(env.boundary().nearest_cell(opt.position), opt.cell);
}

#[test]
fn pose_dump_matches_sweep_and_mirror() {
    let cfg = ExperimentConfig::from_toml_str("boundary.step = 0.05", Path::new(".")).unwrap();
    let (_, report) = commands::sweep(&cfg, 2, false).unwrap();
    let opt = report.argmin_cells[0].position;
    let (out, file) = commands::pose_dump(&cfg, opt).unwrap();
    assert_eq!(file.breakdown.postural, report.global_min);
    let landmarks = String::from_utf8(out.artifacts[1].bytes.clone()).unwrap();
    assert!(landmarks.starts_with("landmark,x,y,z\nhead_top,"));
    assert_eq!(landmarks.lines().count(), 14);

    let p = Vec3::new(0.11, 0.9, 0.45);
    let (_, a) = commands::pose_dump(&cfg, p).unwrap();
    let (_, b) = commands::pose_dump(&cfg, p.mirror_x()).unwrap();
    assert_eq!(a.breakdown.postural, b.breakdown.postural);
    assert_eq!(a.breakdown.final_reba, b.breakdown.final_reba);
    assert_eq!((a.breakdown.left, a.breakdown.right), (b.breakdown.right, b.breakdown.left));

    // Knee-height handover loads trunk and legs more than the optimum.
    let low = Vec3::new(0.0, cfg.anthro.knee_height, 0.5);
    let (_, l) = commands::pose_dump(&cfg, low).unwrap();
    let o = &file.breakdown;
    assert!(l.breakdown.trunk + l.breakdown.legs > o.trunk + o.legs);
}

#[test]
fn anthropometry_file_is_read() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("worker.toml"), "height = 1.9\nupper_arm = 0.34\n").unwrap();
    let text = "[anthro]\nfile = \"worker.toml\"\nforearm = 0.27\n";
    let cfg = ExperimentConfig::from_toml_str(text, tmp.path()).unwrap();
    assert_eq!(cfg.anthro.height, 1.9);
    assert_eq!(cfg.anthro.upper_arm, 0.34);
    assert_eq!(cfg.anthro.forearm, 0.27);
    assert!((cfg.anthro.hand - 0.108 * 1.9).abs() < 1e-12);

    fs::write(tmp.path().join("bad.toml"), "height = 1.9\nwingspan = 2.0\n").unwrap();
    match ExperimentConfig::from_toml_str("anthro.file = \"bad.toml\"", tmp.path()) {
        Err(HarnessError::Config { field, .. }) => assert_eq!(field, "anthro.wingspan"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn wall_clock_budget_stops_runs() {
    let cfg = ExperimentConfig::from_toml_str(
        "boundary.step = 0.05\nrl.runs = 2\nrl.budget_seconds = 0.2",
        Path::new("."),
    )
    .unwrap();
    let started = std::time::Instant::now();
    let (_, runs) = commands::train(&cfg, 2).unwrap();
    assert!(started.elapsed().as_secs_f64() < 5.0);
    assert!(runs.iter().all(|r| r.steps > 0));
}

#[test]
fn singleton_grid_sweep() {
    // A step larger than the x extent but no larger than the others would be
    // rejected; a tiny worker with a big step gives the smallest legal grid.
    let cfg = ExperimentConfig::from_toml_str("boundary.step = 0.4", Path::new(".")).unwrap();
    let (out, report) = commands::sweep(&cfg, 3, true).unwrap();
    assert_eq!(report.histogram.values().sum::<u64>(), report.cell_count);
    let cells = String::from_utf8(out.artifacts[2].bytes.clone()).unwrap();
    assert_eq!(cells.lines().count() as u64, report.cell_count + 1);
}

#[derive(serde::Deserialize)]
struct Golden {
    config_fingerprint: String,
    dims: [u32; 3],
    cell_count: u64,
    global_min: u8,
    argmin_cells: usize,
    histogram: std::collections::BTreeMap<u8, u64>,
}

#[test]
fn default_sweep_matches_pinned_distribution() {
    let golden: Golden =
        serde_json::from_str(include_str!("data/golden_sweep_step002.json")).unwrap();
    let cfg = ExperimentConfig::default();
    let env = cfg.environment().unwrap();
    assert_eq!(artifacts::fingerprint_hex(env.fingerprint()), golden.config_fingerprint);
    assert_eq!(env.boundary().dims(), golden.dims);
    let (report, _) = parallel_sweep(&env, 4).unwrap();
    assert_eq!(report.cell_count, golden.cell_count);
    assert_eq!(report.global_min, golden.global_min);
    assert_eq!(report.argmin_cells.len(), golden.argmin_cells);
    assert_eq!(report.histogram, golden.histogram);
}
