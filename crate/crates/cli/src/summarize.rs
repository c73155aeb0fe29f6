//! Decision tables: for each cell of the remaining sweep dimensions, the
//! platform and scheme pair with the best metric value.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use vanet_core::config::User;
use vanet_core::error::{Error, Result};

/// What "best" means.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Minimize outage probability.
    Op,
    /// Maximize average achievable rate.
    Aar,
}

impl Objective {
    fn metric_name(&self, user: User) -> String {
        let prefix = match self {
            Objective::Op => "op",
            Objective::Aar => "aar",
        };
        format!("{prefix}_{user}")
    }
}

/// Preference order for ties: DT < RT < HT, then NTFP < RSU.
fn preference_rank(scheme: &str, platform: &str) -> (u8, u8) {
    let s = match scheme {
        "dt" => 0,
        "rt" => 1,
        "ht" => 2,
        _ => 3,
    };
    let p = match platform {
        "ntfp" => 0,
        "rsu" => 1,
        _ => 2,
    };
    (s, p)
}

/// Candidates within this relative distance count as tied, so that an
/// equivalent-but-more-complex scheme (e.g. HT over RT when the direct
/// path is dead) does not displace the simpler preferred one.
const TIE_REL_TOL: f64 = 0.02;

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_REL_TOL * a.abs().max(b.abs())
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_results_csv(path: &Path) -> Result<Table> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::invalid("io", format!("{}: {e}", path.display())))?;
    let mut lines = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::invalid("results", "empty CSV"))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>())
        .collect();
    Ok(Table { header, rows })
}

fn column(table: &Table, name: &str) -> Result<usize> {
    table
        .header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::invalid("results", format!("missing required column `{name}`")))
}

/// Build the best-platform/scheme table from a results directory (or a
/// results.csv path directly) and write `summary.csv` beside it.
///
/// The plan behind the results must have swept `scenario.platform` and
/// `scenario.scheme`; every other sweep column becomes a row key of the
/// decision table. Analytical rows are preferred over Monte-Carlo ones
/// when both exist.
pub fn summarize_best(results: &Path, objective: Objective, user: User) -> Result<PathBuf> {
    let csv_path = if results.is_dir() {
        results.join("results.csv")
    } else {
        results.to_path_buf()
    };
    let table = read_results_csv(&csv_path)?;

    let platform_col = column(&table, "scenario.platform")?;
    let scheme_col = column(&table, "scenario.scheme")?;
    let metric_col = column(&table, "metric")?;
    let engine_col = column(&table, "engine")?;
    let value_col = column(&table, "value")?;
    let metric = objective.metric_name(user);

    // Sweep columns are everything before `metric`.
    let sweep_cols: Vec<usize> = (0..metric_col).collect();
    let key_cols: Vec<usize> = sweep_cols
        .iter()
        .copied()
        .filter(|&c| c != platform_col && c != scheme_col)
        .collect();

    // Keep the preferred engine per (full sweep key, metric).
    let mut cells: BTreeMap<(Vec<String>, String, String), (String, f64)> = BTreeMap::new();
    for row in &table.rows {
        if row[metric_col] != metric {
            continue;
        }
        let value: f64 = row[value_col]
            .parse()
            .map_err(|_| Error::invalid("results", format!("bad value `{}`", row[value_col])))?;
        let key = (
            key_cols.iter().map(|&c| row[c].clone()).collect::<Vec<_>>(),
            row[platform_col].clone(),
            row[scheme_col].clone(),
        );
        let engine = row[engine_col].clone();
        match cells.get(&key) {
            Some((existing, _)) if existing == "analytical" => {}
            _ if engine == "analytical" => {
                cells.insert(key, (engine, value));
            }
            Some(_) => {}
            None => {
                cells.insert(key, (engine, value));
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::invalid(
            "results",
            format!("no rows for metric `{metric}`; was it part of the plan?"),
        ));
    }

    // Reduce each remaining-dimension cell over (platform, scheme).
    let mut best: BTreeMap<Vec<String>, (String, String, f64, String)> = BTreeMap::new();
    for ((key, platform, scheme), (engine, value)) in &cells {
        let better = |current: f64, candidate: f64| match objective {
            Objective::Op => candidate < current,
            Objective::Aar => candidate > current,
        };
        match best.get_mut(key) {
            None => {
                best.insert(
                    key.clone(),
                    (platform.clone(), scheme.clone(), *value, engine.clone()),
                );
            }
            Some(slot) => {
                let is_tie = tied(slot.2, *value);
                let strictly_better = !is_tie && better(slot.2, *value);
                let tie_preferred =
                    is_tie && preference_rank(scheme, platform) < preference_rank(&slot.1, &slot.0);
                if strictly_better || tie_preferred {
                    *slot = (platform.clone(), scheme.clone(), *value, engine.clone());
                }
            }
        }
    }

    let key_names: Vec<&String> = key_cols.iter().map(|&c| &table.header[c]).collect();
    let mut out = String::new();
    out.push_str("# candidates within 2% relative count as tied; ties broken by scheme dt < rt < ht, then platform ntfp < rsu\n");
    for name in &key_names {
        out.push_str(name);
        out.push(',');
    }
    out.push_str("objective,engine,best_platform,best_scheme,value\n");
    let objective_name = match objective {
        Objective::Op => "op",
        Objective::Aar => "aar",
    };
    for (key, (platform, scheme, value, engine)) in &best {
        for v in key {
            out.push_str(v);
            out.push(',');
        }
        out.push_str(&format!(
            "{objective_name}_{user},{engine},{platform},{scheme},{}\n",
            crate::run::format_value(*value)
        ));
    }

    let out_path = csv_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join("summary.csv");
    fs::write(&out_path, out).map_err(|e| Error::invalid("io", e.to_string()))?;
    Ok(out_path)
}
