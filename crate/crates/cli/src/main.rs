//! `gapped-ent` command line: runs one registered experiment per invocation
//! and writes a CSV table plus a JSON summary.

mod config;
mod error;
mod experiments;
mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{parse_assignment, ExperimentConfig, Params};
use error::CliError;
use experiments::REGISTRY;

#[derive(Parser)]
#[command(name = "gapped-ent", version, about = "Numerical experiments on correlated spin chains and channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        /// Experiment name; overrides the config file.
        experiment: Option<String>,
        /// JSON config: {"experiment", "params", "seed", "output_path"}.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Parameter override `key=value`, value read as JSON; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Seed for every random draw; overrides the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; overrides the config file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List experiments and their parameters.
    List {
        /// Emit the registry as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn list(json: bool) {
    if json {
        let items: Vec<_> = REGISTRY
            .iter()
            .map(|e| {
                let params: Vec<_> = e
                    .params
                    .iter()
                    .map(|p| {
                        serde_json::json!({
                            "name": p.name,
                            "type": p.kind.label(),
                            "default": serde_json::from_str::<serde_json::Value>(p.default).expect("valid default"),
                            "help": p.help,
                        })
                    })
                    .collect();
                serde_json::json!({ "name": e.name, "description": e.description, "params": params })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&items).expect("registry serializes"));
        return;
    }
    for e in REGISTRY {
        println!("{}\n    {}", e.name, e.description);
        for p in e.params {
            println!("    --set {}=<{}>  (default {})  {}", p.name, p.kind.label(), p.default, p.help);
        }
    }
}

fn run(
    experiment: Option<String>,
    config: Option<PathBuf>,
    set: Vec<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<bool, CliError> {
    let cfg = match &config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let name = experiment
        .or(cfg.experiment)
        .ok_or_else(|| CliError::ConfigInvalid("no experiment given".into()))?;
    let exp = experiments::find(&name)?;
    let mut given: BTreeMap<String, serde_json::Value> = cfg.params;
    for s in &set {
        let (k, v) = parse_assignment(s)?;
        given.insert(k, v);
    }
    let params = Params::resolve(exp.params, &given)?;
    let seed = seed.or(cfg.seed).unwrap_or(0);
    let dir = out.or(cfg.output_path).unwrap_or_else(|| PathBuf::from("results"));

    let start = Instant::now();
    let outcome = (exp.run)(&params, seed)?;
    let elapsed = start.elapsed().as_secs_f64();
    let (csv, json) = output::write_outputs(&dir, exp.name, seed, &params, &outcome)?;
    for c in &outcome.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        if c.detail.is_empty() {
            println!("{tag}  {}", c.name);
        } else {
            println!("{tag}  {}  ({})", c.name, c.detail);
        }
    }
    println!("{} rows -> {}", outcome.rows.len(), csv.display());
    println!("summary -> {}", json.display());
    println!("wall time {elapsed:.2} s");
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List { json } => {
            list(json);
            ExitCode::SUCCESS
        }
        Command::Run { experiment, config, set, seed, out } => match run(experiment, config, set, seed, out) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
