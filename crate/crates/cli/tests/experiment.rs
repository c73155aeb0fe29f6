//! End-to-end harness tests: plan execution, CSV schema, and the
//! best-platform/scheme decision table.

use std::fs;
use std::path::PathBuf;

use vanet_cli::plan::ExperimentPlan;
use vanet_cli::run::run_experiment;
use vanet_cli::summarize::{summarize_best, Objective};
use vanet_core::config::User;
use vanet_core::error::Error;

fn temp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vanet-test-{name}"));
    let _ = fs::remove_dir_all(&dir);
    dir
}

#[test]
fn empty_sweep_yields_single_row_per_metric_engine() {
    let dir = temp_dir("single");
    let text = format!(
        "base.geometry.window_radius = 1000\n\
         base.geometry.disk_radius = 1000\n\
         base.geometry.n_uav = 20\n\
         engines = both\n\
         metrics = op_d1\n\
         trials = 200\n\
         output = {}\n",
        dir.display()
    );
    let plan = ExperimentPlan::from_text(&text).unwrap();
    let out = run_experiment(&plan).unwrap();
    assert_eq!(out.rows, 2);
    let csv = fs::read_to_string(&out.csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "metric,engine,value,half_width,config_hash"
    );
    let analytical = lines.next().unwrap();
    assert!(analytical.starts_with("op_d1,analytical,"));
    // Analytical rows leave half_width empty.
    assert_eq!(analytical.split(',').nth(3).unwrap(), "");
    let mc = lines.next().unwrap();
    assert!(mc.starts_with("op_d1,mc,"));
    assert!(!mc.split(',').nth(3).unwrap().is_empty());
}

#[test]
fn csv_columns_are_sorted_sweep_paths() {
    let dir = temp_dir("columns");
    let text = format!(
        "base.geometry.window_radius = 1000\n\
         base.geometry.disk_radius = 1000\n\
         base.geometry.n_uav = 20\n\
         sweep.scenario.platform = ntfp, rsu\n\
         sweep.noma.r1 = 0.4, 0.8\n\
         engines = analytical\n\
         metrics = op_d1\n\
         output = {}\n",
        dir.display()
    );
    let plan = ExperimentPlan::from_text(&text).unwrap();
    let out = run_experiment(&plan).unwrap();
    let csv = fs::read_to_string(&out.csv_path).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "noma.r1,scenario.platform,metric,engine,value,half_width,config_hash"
    );
    assert_eq!(out.rows, 4);
    // Row order follows the sorted sweep paths: r1 outermost.
    let first_col: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(first_col, vec!["0.4", "0.4", "0.8", "0.8"]);
}

#[test]
fn unknown_sweep_path_fails_with_named_path() {
    let err = ExperimentPlan::from_text("sweep.geometry.bogus = 1, 2\n").unwrap_err();
    match err {
        Error::ConfigReport(v) => {
            assert!(v.iter().any(|e| e.to_string().contains("geometry.bogus")));
        }
        other => panic!("expected report, got {other}"),
    }
}

#[test]
fn decision_table_reproduces_platform_scheme_choices() {
    // Platform x scheme sweep at a short and a long source-destination
    // separation. Short range favors the RSU with hybrid transmission;
    // long range favors the NTFP, where relay and hybrid become
    // equivalent and the simpler relay scheme wins the tie.
    let dir = temp_dir("decision");
    let text = format!(
        "sweep.geometry.d_sd1 = 20, 600\n\
         sweep.scenario.platform = ntfp, rsu\n\
         sweep.scenario.scheme = dt, rt, ht\n\
         engines = analytical\n\
         metrics = op_d1\n\
         output = {}\n",
        dir.display()
    );
    let plan = ExperimentPlan::from_text(&text).unwrap();
    run_experiment(&plan).unwrap();
    let summary_path = summarize_best(&dir, Objective::Op, User::D1).unwrap();
    let summary = fs::read_to_string(summary_path).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert!(
        lines[0].starts_with('#'),
        "tie-break preference recorded in header"
    );
    assert_eq!(
        lines[1],
        "geometry.d_sd1,objective,engine,best_platform,best_scheme,value"
    );
    let short: Vec<&str> = lines[2].split(',').collect();
    assert_eq!((short[0], short[3], short[4]), ("20", "rsu", "ht"));
    let long: Vec<&str> = lines[3].split(',').collect();
    assert_eq!((long[0], long[3], long[4]), ("600", "ntfp", "rt"));
}

#[test]
fn summarize_requires_platform_and_scheme_dimensions() {
    let dir = temp_dir("missing-dims");
    let text = format!(
        "base.geometry.window_radius = 1000\n\
         base.geometry.disk_radius = 1000\n\
         base.geometry.n_uav = 20\n\
         sweep.noma.r1 = 0.4, 0.8\n\
         engines = analytical\n\
         metrics = op_d1\n\
         output = {}\n",
        dir.display()
    );
    let plan = ExperimentPlan::from_text(&text).unwrap();
    run_experiment(&plan).unwrap();
    let err = summarize_best(&dir, Objective::Op, User::D1).unwrap_err();
    assert!(err.to_string().contains("scenario.platform"), "{err}");
}

#[test]
fn config_hash_recomputable_from_row() {
    let dir = temp_dir("hash");
    let text = format!(
        "base.geometry.window_radius = 1000\n\
         base.geometry.disk_radius = 1000\n\
         base.geometry.n_uav = 20\n\
         sweep.noma.r1 = 0.4, 0.8\n\
         engines = analytical\n\
         metrics = op_d1\n\
         output = {}\n",
        dir.display()
    );
    let plan = ExperimentPlan::from_text(&text).unwrap();
    let out = run_experiment(&plan).unwrap();
    let csv = fs::read_to_string(&out.csv_path).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let hash_col = header.iter().position(|h| *h == "config_hash").unwrap();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let mut cfg = plan.base.clone();
        cfg.set_path("noma.r1", cols[0]).unwrap();
        assert_eq!(
            cfg.config_hash(),
            cols[hash_col],
            "hash not recomputable from row"
        );
    }
}

#[test]
fn plot_script_emitted_for_single_sweep() {
    let dir = temp_dir("plot");
    let text = format!(
        "base.geometry.window_radius = 1000\n\
         base.geometry.disk_radius = 1000\n\
         base.geometry.n_uav = 20\n\
         sweep.noma.r1 = 0.4, 0.8\n\
         engines = both\n\
         metrics = op_d1\n\
         trials = 200\n\
         output = {}\n",
        dir.display()
    );
    let plan = ExperimentPlan::from_text(&text).unwrap();
    let out = run_experiment(&plan).unwrap();
    let plot = fs::read_to_string(out.plot_path.unwrap()).unwrap();
    assert!(plot.contains("results.csv"));
    assert!(plot.contains("op_d1"));
}
