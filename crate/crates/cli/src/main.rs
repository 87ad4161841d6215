//! Command-line front end for the offloading simulator.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use offload_core::config::validate_config;
use offload_core::experiment::{oracle_gap_audit, run_experiment, trace_single, ExperimentOutput};
use offload_core::{load_config, parse_config, ResolvedConfig, Sweep, SweepVar};

#[derive(Parser)]
#[command(
    name = "offload-sim",
    version,
    about = "Monte-Carlo simulator for auction-based mining-cluster selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VarArg {
    Clusters,
    Delta,
    Epsilon,
}

impl From<VarArg> for SweepVar {
    fn from(v: VarArg) -> Self {
        match v {
            VarArg::Clusters => SweepVar::Clusters,
            VarArg::Delta => SweepVar::Delta,
            VarArg::Epsilon => SweepVar::Epsilon,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker thread count (results do not depend on it).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run a one-variable sweep, overriding any sweep in the config.
    Sweep {
        /// Base config; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        var: VarArg,
        /// Comma-separated grid values.
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Audit the auction against the exact matching oracle.
    Validate {
        /// Number of randomized instances to check.
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Dump the per-round auction trace of the first replication.
    Trace {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<(ResolvedConfig, Vec<String>)> {
    load_config(path).with_context(|| format!("loading {}", path.display()))
}

fn announce(out: &ExperimentOutput) {
    println!("wrote {} ({} rows)", out.csv_path.display(), out.rows);
    println!("wrote {}", out.summary_path.display());
    if let Some(t) = &out.trace_path {
        println!("wrote {}", t.display());
    }
    for notice in &out.notices {
        println!("notice: {notice}");
    }
}

fn main() {
    if let Err(e) = dispatch(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            threads,
        } => {
            let (mut cfg, defaults) = load(&config)?;
            if let Some(s) = seed {
                cfg.run.seed = s;
            }
            let result = run_experiment(&cfg, &defaults, out.as_deref(), threads)?;
            announce(&result);
        }
        Command::Sweep {
            config,
            var,
            grid,
            seed,
            out,
            threads,
        } => {
            let (mut cfg, defaults) = match config {
                Some(path) => load(&path)?,
                None => parse_config("")?,
            };
            cfg.run.sweep = Some(Sweep {
                var: var.into(),
                grid,
            });
            if let Some(s) = seed {
                cfg.run.seed = s;
            }
            validate_config(&cfg)?;
            let result = run_experiment(&cfg, &defaults, out.as_deref(), threads)?;
            announce(&result);
        }
        Command::Validate {
            instances,
            seed,
            out,
        } => {
            let (result, audit) = oracle_gap_audit(instances, seed, &out)?;
            announce(&result);
            println!(
                "validate: {} checks, worst gap {:.3e} (bound {:.3e})",
                audit.checks, audit.worst_gap, audit.worst_bound
            );
            if audit.violations > 0 {
                bail!(
                    "{} of {} checks exceeded the optimality gap bound",
                    audit.violations,
                    audit.checks
                );
            }
        }
        Command::Trace {
            config,
            seed,
            out,
        } => {
            let (mut cfg, _) = load(&config)?;
            if let Some(s) = seed {
                cfg.run.seed = s;
            }
            let records = trace_single(&cfg)?;
            let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.run.out_dir));
            std::fs::create_dir_all(&dir)?;
            let path = dir.join("trace.ndjson");
            let mut lines = String::new();
            for r in &records {
                lines.push_str(&serde_json::to_string(r)?);
                lines.push('\n');
            }
            std::fs::write(&path, lines)?;
            println!("wrote {} ({} rounds)", path.display(), records.len());
        }
    }
    Ok(())
}
