//! Plan files: flat `key = value` text with dotted config paths.
//!
//! ```text
//! # overrides of the scenario defaults
//! base.scenario.scheme = rt
//! base.noma.gamma = 0.0
//!
//! # one line per swept parameter: a comma list or range(start, stop, step)
//! sweep.noma.r1 = range(0.1, 2.3, 0.1)
//! sweep.scenario.platform = ntfp, rsu
//!
//! engines = analytical, mc
//! metrics = op_d1, op_d2
//! trials = 100000
//! seed = 1
//! output = results
//! ```

use std::path::PathBuf;

use vanet_core::config::SystemConfig;
use vanet_core::error::{Error, Result};
use vanet_core::montecarlo::Metric;

/// Evaluation engine selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Engine {
    Analytical,
    Mc,
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Analytical => "analytical",
            Engine::Mc => "mc",
        }
    }
}

pub fn metric_name(metric: Metric) -> &'static str {
    match metric {
        Metric::OpD1 => "op_d1",
        Metric::OpD2 => "op_d2",
        Metric::AarD1 => "aar_d1",
        Metric::AarD2 => "aar_d2",
    }
}

/// A parsed experiment plan.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub base: SystemConfig,
    /// Swept parameter paths with their value lists, in file order.
    pub sweeps: Vec<(String, Vec<String>)>,
    pub engines: Vec<Engine>,
    pub metrics: Vec<Metric>,
    pub output_dir: PathBuf,
    pub trials: u64,
    pub seed: u64,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            base: SystemConfig::default(),
            sweeps: Vec::new(),
            engines: vec![Engine::Analytical, Engine::Mc],
            metrics: vec![Metric::OpD1, Metric::OpD2],
            output_dir: PathBuf::from("results"),
            trials: 100_000,
            seed: 1,
        }
    }
}

fn parse_values(path: &str, text: &str) -> Result<Vec<String>> {
    let text = text.trim();
    if let Some(args) = text
        .strip_prefix("range(")
        .and_then(|t| t.strip_suffix(')'))
    {
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::invalid(
                path,
                "range(start, stop, step) takes three arguments",
            ));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|_| Error::invalid(path, format!("cannot parse `{p}` in range()")))
            })
            .collect::<Result<_>>()?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0 && stop >= start) {
            return Err(Error::invalid(
                path,
                "range() requires stop >= start and step > 0",
            ));
        }
        let count = ((stop - start) / step + 0.5).floor() as usize + 1;
        Ok((0..count)
            .map(|i| format!("{:?}", start + step * i as f64))
            .collect())
    } else {
        let values: Vec<String> = text.split(',').map(|v| v.trim().to_string()).collect();
        if values.iter().any(String::is_empty) {
            return Err(Error::invalid(path, "empty value in sweep list"));
        }
        Ok(values)
    }
}

impl ExperimentPlan {
    /// Parse a plan over the defaults, aggregating violations.
    pub fn from_text(text: &str) -> Result<ExperimentPlan> {
        let mut plan = ExperimentPlan::default();
        let mut engines: Option<Vec<Engine>> = None;
        let mut metrics: Option<Vec<Metric>> = None;
        let mut violations: Vec<Error> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                violations.push(Error::invalid(
                    format!("line {}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                ));
                continue;
            };
            let key = key.trim();
            let value = value.trim();
            let result = if let Some(path) = key.strip_prefix("base.") {
                plan.base.set_path(path, value)
            } else if let Some(path) = key.strip_prefix("sweep.") {
                parse_values(path, value).and_then(|values| {
                    // The path must resolve and each value must parse.
                    let mut scratch = plan.base.clone();
                    for v in &values {
                        scratch.set_path(path, v)?;
                    }
                    plan.sweeps.push((path.to_string(), values));
                    Ok(())
                })
            } else {
                match key {
                    "engines" => parse_engines(value).map(|e| engines = Some(e)),
                    "metrics" => parse_metrics(value).map(|m| metrics = Some(m)),
                    "trials" => value
                        .parse::<u64>()
                        .map(|t| plan.trials = t)
                        .map_err(|_| Error::invalid("trials", "must be a nonnegative integer")),
                    "seed" => value
                        .parse::<u64>()
                        .map(|s| plan.seed = s)
                        .map_err(|_| Error::invalid("seed", "must be a nonnegative integer")),
                    "output" => {
                        plan.output_dir = PathBuf::from(value);
                        Ok(())
                    }
                    other => Err(Error::UnknownPath(other.to_string())),
                }
            };
            if let Err(e) = result {
                violations.push(e);
            }
        }

        if let Some(e) = engines {
            plan.engines = e;
        }
        if let Some(m) = metrics {
            plan.metrics = m;
        }
        if let Err(e) = plan.validate() {
            violations.push(e);
        }
        if violations.is_empty() {
            Ok(plan)
        } else {
            Err(Error::ConfigReport(violations))
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.engines.is_empty() {
            return Err(Error::invalid("engines", "at least one engine required"));
        }
        if self.metrics.is_empty() {
            return Err(Error::invalid("metrics", "at least one metric required"));
        }
        if self.engines.contains(&Engine::Mc) && self.trials < 100 {
            return Err(Error::invalid(
                "trials",
                "Monte-Carlo runs need at least 100 trials",
            ));
        }
        self.base.validate()
    }

    /// Sweep paths in the sorted order used for CSV columns.
    pub fn sorted_sweep_paths(&self) -> Vec<String> {
        let mut paths: Vec<String> = self.sweeps.iter().map(|(p, _)| p.clone()).collect();
        paths.sort();
        paths
    }

    /// Cartesian product of sweep values in file order (first sweep
    /// outermost); an empty sweep list yields the single base point.
    pub fn sweep_points(&self) -> Vec<Vec<(String, String)>> {
        let mut points: Vec<Vec<(String, String)>> = vec![Vec::new()];
        for (path, values) in &self.sweeps {
            let mut next = Vec::with_capacity(points.len() * values.len());
            for point in &points {
                for value in values {
                    let mut p = point.clone();
                    p.push((path.clone(), value.clone()));
                    next.push(p);
                }
            }
            points = next;
        }
        points
    }
}

fn parse_engines(text: &str) -> Result<Vec<Engine>> {
    let mut engines = Vec::new();
    for token in text.split(',').map(str::trim) {
        match token {
            "analytical" => engines.push(Engine::Analytical),
            "mc" | "montecarlo" => engines.push(Engine::Mc),
            "both" => {
                engines.push(Engine::Analytical);
                engines.push(Engine::Mc);
            }
            other => {
                return Err(Error::invalid(
                    "engines",
                    format!("unknown engine `{other}`"),
                ))
            }
        }
    }
    engines.sort();
    engines.dedup();
    Ok(engines)
}

fn parse_metrics(text: &str) -> Result<Vec<Metric>> {
    let mut metrics = Vec::new();
    for token in text.split(',').map(str::trim) {
        match token {
            "op_d1" => metrics.push(Metric::OpD1),
            "op_d2" => metrics.push(Metric::OpD2),
            "aar_d1" => metrics.push(Metric::AarD1),
            "aar_d2" => metrics.push(Metric::AarD2),
            other => {
                return Err(Error::invalid(
                    "metrics",
                    format!("unknown metric `{other}`"),
                ))
            }
        }
    }
    metrics.sort_by_key(|m| metric_name(*m));
    metrics.dedup();
    Ok(metrics)
}
