use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vanet_cli::plan::{Engine, ExperimentPlan};
use vanet_cli::run::run_experiment;
use vanet_cli::summarize::{summarize_best, Objective};
use vanet_core::config::{Scheme, SystemConfig, User};
use vanet_core::crosspoint::{
    crosspoint_gamma, crosspoint_ht_rate_user1, crosspoint_user1, crosspoint_user2_power,
    crosspoint_user2_rate, Given,
};
use vanet_core::error::Error;

/// Outage and rate analysis for aerial-aided mmWave NOMA vehicular
/// networks: closed-form curves cross-validated by Monte-Carlo simulation.
#[derive(Parser)]
#[command(name = "vanet", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Analytical,
    Mc,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Op,
    Aar,
}

#[derive(Clone, Copy, ValueEnum)]
enum UserArg {
    D1,
    D2,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment plan and emit CSV results.
    Run {
        /// Plan file (flat `key = value` text).
        plan: PathBuf,
        /// Override the plan's engines.
        #[arg(long)]
        engine: Option<EngineArg>,
        /// Override the plan's Monte-Carlo trial count.
        #[arg(long)]
        trials: Option<u64>,
        /// Override the plan's base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the plan's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and validate a scenario config, printing the full form.
    Validate {
        /// Config file (flat `path = value` text; empty file = defaults).
        config: PathBuf,
    },
    /// Print the NOMA-vs-OMA cross-point values for a scenario.
    Crosspoints {
        config: PathBuf,
        /// Also bisect the HT rate cross-point (slower).
        #[arg(long)]
        ht: bool,
    },
    /// Build the best-platform/scheme decision table from results.
    Summarize {
        /// Results directory (or a results.csv path).
        results: PathBuf,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        #[arg(long, value_enum)]
        user: UserArg,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::NonConvergence { .. } => 3,
        Error::InvalidConfig { path, .. } if path == "io" => 4,
        _ => 2,
    }
}

fn load_config(path: &PathBuf) -> Result<SystemConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::invalid("io", e.to_string()))?;
    SystemConfig::from_flat_text(&text)
}

fn run() -> Result<(), Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            plan,
            engine,
            trials,
            seed,
            out,
        } => {
            let text =
                std::fs::read_to_string(&plan).map_err(|e| Error::invalid("io", e.to_string()))?;
            let mut plan = ExperimentPlan::from_text(&text)?;
            if let Some(engine) = engine {
                plan.engines = match engine {
                    EngineArg::Analytical => vec![Engine::Analytical],
                    EngineArg::Mc => vec![Engine::Mc],
                    EngineArg::Both => vec![Engine::Analytical, Engine::Mc],
                };
            }
            if let Some(t) = trials {
                plan.trials = t;
            }
            if let Some(s) = seed {
                plan.seed = s;
            }
            if let Some(o) = out {
                plan.output_dir = o;
            }
            plan.validate()?;
            let output = run_experiment(&plan)?;
            println!(
                "wrote {} rows to {}",
                output.rows,
                output.csv_path.display()
            );
            if let Some(plot) = output.plot_path {
                println!("plot script: {}", plot.display());
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load_config(&config)?;
            print!("{}", cfg.canonical_string());
            println!("config_hash = {}", cfg.config_hash());
            Ok(())
        }
        Command::Crosspoints { config, ht } => {
            let cfg = load_config(&config)?;
            let noma = cfg.noma;
            println!(
                "# cross-points at a1={}, r1={}, r2={}, gamma={}",
                noma.a1, noma.r1, noma.r2, noma.gamma
            );
            println!("kind,value,feasible,branch");
            let print_res = |name: &str, res: vanet_core::crosspoint::CrosspointResult| {
                let branch = match res.branch {
                    Some(vanet_core::crosspoint::CrossBranch::G1Dominant) => "g1",
                    Some(vanet_core::crosspoint::CrossBranch::G2Dominant) => "g2",
                    None => "",
                };
                println!("{name},{:.6},{},{branch}", res.value, res.feasible);
            };
            for scheme in [Scheme::Dt, Scheme::Rt] {
                let tag = if scheme == Scheme::Dt { "dt" } else { "rt" };
                print_res(
                    &format!("r1c_{tag}"),
                    crosspoint_user1(scheme, Given::PowerA1(noma.a1))?,
                );
                print_res(
                    &format!("a1c_{tag}"),
                    crosspoint_user1(scheme, Given::RateR1(noma.r1))?,
                );
                print_res(&format!("r2c_{tag}"), crosspoint_user2_rate(scheme, &noma)?);
                print_res(
                    &format!("a2c_{tag}"),
                    crosspoint_user2_power(scheme, &noma)?,
                );
                print_res(&format!("gamma_c_{tag}"), crosspoint_gamma(scheme, &noma)?);
            }
            if ht {
                print_res("r1c_ht", crosspoint_ht_rate_user1(&cfg)?);
            }
            Ok(())
        }
        Command::Summarize {
            results,
            objective,
            user,
        } => {
            let objective = match objective {
                ObjectiveArg::Op => Objective::Op,
                ObjectiveArg::Aar => Objective::Aar,
            };
            let user = match user {
                UserArg::D1 => User::D1,
                UserArg::D2 => User::D2,
            };
            let out = summarize_best(&results, objective, user)?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
