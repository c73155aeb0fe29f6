//! Sweep execution and deterministic CSV emission.
//!
//! One row per (sweep point x metric x engine). Columns are the sorted
//! sweep paths followed by metric, engine, value, half_width (Monte-Carlo
//! only), and the config hash of the fully applied point. Values carry 10
//! significant digits; re-running an identical plan with an identical
//! seed reproduces the bytes.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;

use vanet_core::config::{Scheme, SystemConfig, User};
use vanet_core::error::{Error, Result};
use vanet_core::montecarlo::{McSummary, Metric, Simulator};
use vanet_core::outage::OutageModel;
use vanet_core::rate::{aar_dt, aar_ht, aar_rt, RateIntegralSpec};

use crate::plan::{metric_name, Engine, ExperimentPlan};

/// Format with 10 significant digits, locale-free.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.9e}")
}

/// Where the artifacts landed.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv_path: PathBuf,
    pub plot_path: Option<PathBuf>,
    pub rows: usize,
}

struct PointResult {
    values: Vec<(String, String)>,
    hash: String,
    analytical: Vec<(Metric, f64)>,
    mc: Option<McSummary>,
}

fn apply_point(base: &SystemConfig, values: &[(String, String)]) -> Result<SystemConfig> {
    let mut cfg = base.clone();
    for (path, value) in values {
        cfg.set_path(path, value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn analytical_metrics(model: &OutageModel, metrics: &[Metric]) -> Result<Vec<(Metric, f64)>> {
    let rate_spec = RateIntegralSpec::default();
    let scheme = model.config().scenario.scheme;
    metrics
        .iter()
        .map(|&metric| {
            let value = match metric {
                Metric::OpD1 => model.op_total(User::D1)?,
                Metric::OpD2 => model.op_total(User::D2)?,
                Metric::AarD1 | Metric::AarD2 => {
                    let user = if metric == Metric::AarD1 {
                        User::D1
                    } else {
                        User::D2
                    };
                    match scheme {
                        Scheme::Dt => aar_dt(model, user, &rate_spec)?,
                        Scheme::Rt => aar_rt(model, user, &rate_spec)?,
                        Scheme::Ht => aar_ht(model, user, &rate_spec)?,
                    }
                }
            };
            Ok((metric, value))
        })
        .collect()
}

/// Run every sweep point under the requested engines.
///
/// Points sweeping only NOMA rate targets share one batch of Monte-Carlo
/// draws (SIRs are threshold-independent) and one set of Laplace caches.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<RunOutput> {
    fs::create_dir_all(&plan.output_dir).map_err(io_error)?;

    // Expand points in sorted-path nesting so the CSV row order is the
    // sorted sweep order.
    let mut sorted_plan = plan.clone();
    sorted_plan.sweeps.sort_by(|a, b| a.0.cmp(&b.0));
    let points = sorted_plan.sweep_points();

    let want_mc = plan.engines.contains(&Engine::Mc);
    let want_analytical = plan.engines.contains(&Engine::Analytical);
    let rate_only_sweep = !points.is_empty()
        && sorted_plan
            .sweeps
            .iter()
            .all(|(p, _)| p == "noma.r1" || p == "noma.r2");

    let results: Vec<PointResult> = if rate_only_sweep {
        // Shared draws and shared Laplace caches across the rate grid.
        let base_model = if want_analytical {
            Some(OutageModel::new(&plan.base)?)
        } else {
            None
        };
        let sim = if want_mc {
            Some(Simulator::new(&plan.base)?)
        } else {
            None
        };
        let sirs = sim
            .as_ref()
            .map(|s| s.sample_trials(plan.trials, plan.seed));
        points
            .iter()
            .map(|values| {
                let cfg = apply_point(&plan.base, values)?;
                let analytical = match &base_model {
                    Some(model) => {
                        let model = model.with_noma(cfg.noma);
                        analytical_metrics(&model, &plan.metrics)?
                    }
                    None => Vec::new(),
                };
                let mc = match (&sim, &sirs) {
                    (Some(sim), Some(sirs)) => {
                        Some(sim.summarize_at(sirs, cfg.noma.r1, cfg.noma.r2, plan.seed))
                    }
                    _ => None,
                };
                Ok(PointResult {
                    values: values.clone(),
                    hash: cfg.config_hash(),
                    analytical,
                    mc,
                })
            })
            .collect::<Result<_>>()?
    } else {
        points
            .par_iter()
            .map(|values| {
                let cfg = apply_point(&plan.base, values)?;
                let analytical = if want_analytical {
                    let model = OutageModel::new(&cfg)?;
                    analytical_metrics(&model, &plan.metrics)?
                } else {
                    Vec::new()
                };
                let mc = if want_mc {
                    let sim = Simulator::new(&cfg)?;
                    Some(sim.run(plan.trials, plan.seed))
                } else {
                    None
                };
                Ok(PointResult {
                    values: values.clone(),
                    hash: cfg.config_hash(),
                    analytical,
                    mc,
                })
            })
            .collect::<Result<_>>()?
    };

    // Assemble the CSV: single-writer ordered merge.
    let sorted_paths = sorted_plan.sorted_sweep_paths();
    let mut csv = String::new();
    for path in &sorted_paths {
        csv.push_str(path);
        csv.push(',');
    }
    csv.push_str("metric,engine,value,half_width,config_hash\n");

    let mut rows = 0usize;
    for point in &results {
        for &metric in &plan.metrics {
            for engine in &plan.engines {
                for path in &sorted_paths {
                    let value = point
                        .values
                        .iter()
                        .find(|(p, _)| p == path)
                        .map(|(_, v)| v.as_str())
                        .unwrap_or_default();
                    csv.push_str(value);
                    csv.push(',');
                }
                let (value, half_width) = match engine {
                    Engine::Analytical => {
                        let v = point
                            .analytical
                            .iter()
                            .find(|(m, _)| *m == metric)
                            .map(|(_, v)| *v)
                            .expect("analytical metric computed");
                        (format_value(v), String::new())
                    }
                    Engine::Mc => {
                        let est = point
                            .mc
                            .as_ref()
                            .expect("mc summary computed")
                            .metric(metric);
                        (format_value(est.mean), format_value(est.half_width_95))
                    }
                };
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    metric_name(metric),
                    engine.name(),
                    value,
                    half_width,
                    point.hash
                ));
                rows += 1;
            }
        }
    }

    let csv_path = plan.output_dir.join("results.csv");
    let mut file = fs::File::create(&csv_path).map_err(io_error)?;
    file.write_all(csv.as_bytes()).map_err(io_error)?;

    let plot_path = if sorted_paths.len() == 1 {
        let path = plan.output_dir.join("plot.gnu");
        fs::write(&path, plot_script(&sorted_paths[0], plan)).map_err(io_error)?;
        Some(path)
    } else {
        None
    };

    Ok(RunOutput {
        csv_path,
        plot_path,
        rows,
    })
}

fn io_error(e: std::io::Error) -> Error {
    Error::invalid("io", e.to_string())
}

/// A gnuplot script reading only the emitted CSV: analytical curves as
/// lines, Monte-Carlo marks with error bars.
fn plot_script(sweep_path: &str, plan: &ExperimentPlan) -> String {
    let mut s = String::new();
    s.push_str("# gnuplot script generated alongside results.csv\n");
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str(&format!("set xlabel '{sweep_path}'\n"));
    for &metric in &plan.metrics {
        let name = metric_name(metric);
        s.push_str(&format!("\nset output '{name}.png'\nset ylabel '{name}'\n"));
        let mut series = Vec::new();
        if plan.engines.contains(&Engine::Analytical) {
            series.push(format!(
                "'results.csv' skip 1 using (strcol(2) eq '{name}' && strcol(3) eq 'analytical' ? column(1) : NaN):4 with lines title 'analytical'"
            ));
        }
        if plan.engines.contains(&Engine::Mc) {
            series.push(format!(
                "'results.csv' skip 1 using (strcol(2) eq '{name}' && strcol(3) eq 'mc' ? column(1) : NaN):4:5 with yerrorbars title 'mc'"
            ));
        }
        s.push_str(&format!("plot {}\n", series.join(", \\\n     ")));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_formatting_is_ten_digits() {
        assert_eq!(format_value(0.5), "5.000000000e-1");
        assert_eq!(format_value(123.456), "1.234560000e2");
        assert_eq!(format_value(f64::INFINITY), "inf");
    }
}
